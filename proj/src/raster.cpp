#include "cresi/raster.hpp"

#include "cresi/errors.hpp"

#include <nlohmann/json.hpp>

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

namespace cresi {

std::string to_string(MaskKind k) {
  switch (k) {
    case MaskKind::binary: return "binary";
    case MaskKind::continuous: return "continuous";
    case MaskKind::multiclass: return "multiclass";
  }
  return "binary";
}

MaskKind parse_mask_kind(const std::string& s) {
  if (s == "binary") return MaskKind::binary;
  if (s == "continuous") return MaskKind::continuous;
  if (s == "multiclass") return MaskKind::multiclass;
  throw DomainError("unknown mask kind '" + s + "'");
}

RasterMask::RasterMask(MaskKind k, int band_count, const GeoTransform& t, float fill) : kind(k), transform(t) {
  transform.validate();
  if (band_count < 1) throw DomainError("raster needs at least one band");
  bands.assign(band_count, Band::Constant(t.height, t.width, fill));
}

void RasterMask::validate() const {
  transform.validate();
  if (bands.empty()) throw DomainError("raster has no bands");
  for (std::size_t b = 0; b < bands.size(); ++b) {
    if (bands[b].rows() != transform.height || bands[b].cols() != transform.width)
      throw DomainError("band " + std::to_string(b) + " does not match the transform dimensions");
    if (!bands[b].allFinite() || (bands[b] < 0.0f).any() || (bands[b] > 1.0f).any())
      throw DomainError("band " + std::to_string(b) + " has values outside [0, 1]");
  }
  if (kind == MaskKind::multiclass && bands.size() != kMulticlassBands)
    throw DomainError("multiclass mask must have 8 bands");
}

bool RasterMask::same_shape(const RasterMask& o) const {
  return bands.size() == o.bands.size() && transform.width == o.transform.width &&
         transform.height == o.transform.height;
}

Band flatten(const RasterMask& mask) {
  if (mask.kind != MaskKind::multiclass || mask.bands.size() == 1) return mask.bands.front();
  Band out = mask.bands[0];
  for (int c = 1; c < kBackgroundBand; ++c) out = out.max(mask.bands[c]);
  return out;
}

namespace {

static_assert(std::endian::native == std::endian::little, "raster container assumes a little-endian host");

}  // namespace

void write_raster(const RasterMask& mask, const std::string& stem, SampleType type) {
  nlohmann::json meta = {
      {"format", "cresi-raster"},
      {"version", 1},
      {"dtype", type == SampleType::float32 ? "float32" : "uint8"},
      {"byte_order", "little"},
      {"interleave", "band"},
      {"kind", to_string(mask.kind)},
      {"bands", mask.band_count()},
      {"width", mask.width()},
      {"height", mask.height()},
      {"transform",
       {{"origin_x", mask.transform.origin_x},
        {"origin_y", mask.transform.origin_y},
        {"pixel_size", mask.transform.pixel_size},
        {"crs", mask.transform.crs_tag}}}};
  std::ofstream bin(stem + ".bin", std::ios::binary);
  if (!bin) throw IoError("cannot write " + stem + ".bin");
  for (const auto& band : mask.bands) {
    if (type == SampleType::float32) {
      bin.write(reinterpret_cast<const char*>(band.data()), static_cast<std::streamsize>(band.size() * sizeof(float)));
    } else {
      std::vector<std::uint8_t> buf(band.size());
      for (Eigen::Index i = 0; i < band.size(); ++i)
        buf[i] = static_cast<std::uint8_t>(std::lround(std::clamp(band.data()[i], 0.0f, 1.0f) * 255.0f));
      bin.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
    }
  }
  if (!bin) throw IoError("write failed for " + stem + ".bin");
  std::ofstream js(stem + ".json");
  if (!js) throw IoError("cannot write " + stem + ".json");
  js << meta.dump(2) << '\n';
}

RasterMask read_raster(const std::string& stem) {
  std::ifstream js(stem + ".json");
  if (!js) throw IoError("cannot open " + stem + ".json");
  nlohmann::json meta;
  try {
    js >> meta;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(stem + ".json: " + e.what(), 0, 0);
  }
  GeoTransform t;
  try {
    t.width = meta.at("width").get<int>();
    t.height = meta.at("height").get<int>();
    const auto& tr = meta.at("transform");
    t.origin_x = tr.at("origin_x").get<double>();
    t.origin_y = tr.at("origin_y").get<double>();
    t.pixel_size = tr.at("pixel_size").get<double>();
    t.crs_tag = tr.value("crs", std::string{});
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(stem + ".json: " + e.what(), 0, 0);
  }
  const int band_count = meta.value("bands", 1);
  const std::string dtype = meta.value("dtype", "float32");
  RasterMask mask(parse_mask_kind(meta.value("kind", "binary")), band_count, t);
  std::ifstream bin(stem + ".bin", std::ios::binary);
  if (!bin) throw IoError("cannot open " + stem + ".bin");
  for (auto& band : mask.bands) {
    if (dtype == "float32") {
      bin.read(reinterpret_cast<char*>(band.data()), static_cast<std::streamsize>(band.size() * sizeof(float)));
    } else if (dtype == "uint8") {
      std::vector<std::uint8_t> buf(band.size());
      bin.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
      for (Eigen::Index i = 0; i < band.size(); ++i) band.data()[i] = buf[i] / 255.0f;
    } else {
      throw ParseError(stem + ".json: unsupported dtype " + dtype, 0, 0);
    }
    if (!bin) throw IoError(stem + ".bin is truncated");
  }
  return mask;
}

}  // namespace cresi
