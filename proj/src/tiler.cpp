#include "cresi/tiler.hpp"

#include "cresi/errors.hpp"

#include <exception>
#include <filesystem>
#include <thread>

namespace cresi {

namespace {

std::vector<int> axis_offsets(int extent, int window, int stride) {
  std::vector<int> offs{0};
  if (window >= extent) return offs;
  while (offs.back() + window < extent) {
    const int next = offs.back() + stride;
    offs.push_back(next + window >= extent ? extent - window : next);
  }
  return offs;
}

/// out += (in - out) / k, band by band; exact when in == out.
void accumulate_mean(Band& out, const Band& in, float k) { out += (in - out) / k; }

}  // namespace

std::vector<WindowSpec> split(int width, int height, int window_px, int overlap_px) {
  if (width < 1 || height < 1) throw DomainError("extent must be positive");
  if (window_px < 1) throw DomainError("window must be positive");
  if (overlap_px < 0 || overlap_px >= window_px) throw DomainError("overlap must lie in [0, window)");
  const int stride = window_px - overlap_px;
  const int ww = std::min(window_px, width), wh = std::min(window_px, height);
  std::vector<WindowSpec> out;
  for (int r : axis_offsets(height, window_px, stride))
    for (int c : axis_offsets(width, window_px, stride)) out.push_back({c, r, ww, wh, overlap_px});
  return out;
}

RasterMask merge_fold_predictions(const std::vector<RasterMask>& masks) {
  if (masks.empty()) throw DomainError("no fold predictions to merge");
  RasterMask out = masks.front();
  for (std::size_t k = 1; k < masks.size(); ++k) {
    if (!out.same_shape(masks[k])) throw DomainError("fold predictions differ in shape");
    for (int b = 0; b < out.band_count(); ++b)
      accumulate_mean(out.bands[b], masks[k].bands[b], static_cast<float>(k + 1));
  }
  return out;
}

Stitcher::Stitcher(const GeoTransform& full) : full_(full) {}

void Stitcher::add(const WindowSpec& w, const RasterMask& mask) {
  if (w.col_off < 0 || w.row_off < 0 || w.width < 1 || w.height < 1 || w.col_off + w.width > full_.width ||
      w.row_off + w.height > full_.height)
    throw DomainError("window outside the stitch extent");
  if (mask.width() != w.width || mask.height() != w.height) throw DomainError("window mask does not match its spec");
  if (!started_) {
    out_ = RasterMask(mask.kind, mask.band_count(), full_);
    count_ = Grid<std::uint16_t>::Zero(full_.height, full_.width);
    started_ = true;
  } else if (mask.band_count() != out_.band_count() || mask.kind != out_.kind) {
    throw DomainError("window masks differ in kind or band count");
  }
  auto cnt = count_.block(w.row_off, w.col_off, w.height, w.width);
  cnt += 1;
  const Band k = cnt.cast<float>();
  for (int b = 0; b < mask.band_count(); ++b) {
    auto dst = out_.bands[b].block(w.row_off, w.col_off, w.height, w.width);
    dst += (mask.bands[b] - dst) / k;
  }
}

std::int64_t Stitcher::uncovered_pixels() const {
  if (!started_) return static_cast<std::int64_t>(full_.width) * full_.height;
  return static_cast<std::int64_t>((count_ == 0).count());
}

RasterMask Stitcher::finish() {
  if (!started_) return RasterMask(MaskKind::binary, 1, full_);
  count_.resize(0, 0);
  started_ = false;
  return std::move(out_);
}

RasterMask stitch(const std::vector<std::pair<WindowSpec, RasterMask>>& windows, const GeoTransform& full) {
  Stitcher s(full);
  for (const auto& [w, m] : windows) s.add(w, m);
  return s.finish();
}

OracleSource::OracleSource(RoadGraph truth, std::vector<OracleNoise> folds, double halfwidth_m)
    : truth_(std::move(truth)), noise_(std::move(folds)), halfwidth_m_(halfwidth_m) {
  if (noise_.empty()) noise_.emplace_back();
  for (const auto& n : noise_) n.validate();
}

RasterMask OracleSource::predict(const GeoTransform& base, const WindowSpec& w, int fold) const {
  return oracle_predict(truth_, PixelFrame{base, w.col_off, w.row_off, w.width, w.height}, noise_.at(fold),
                        halfwidth_m_);
}

std::string DirectorySource::stem_for(const std::string& dir, const WindowSpec& w) {
  return (std::filesystem::path(dir) / ("mask_r" + std::to_string(w.row_off) + "_c" + std::to_string(w.col_off)))
      .string();
}

RasterMask DirectorySource::predict(const GeoTransform& base, const WindowSpec& w, int) const {
  RasterMask m = read_raster(stem_for(dir_, w));
  if (m.width() != w.width || m.height() != w.height)
    throw DomainError("mask for window r" + std::to_string(w.row_off) + " c" + std::to_string(w.col_off) +
                      " has the wrong size");
  m.transform = base.window(w.col_off, w.row_off, w.width, w.height);
  return m;
}

CityScaleResult run_city_scale(const SegmentationSource& source, const GeoTransform& extent,
                               const TilingConfig& tiling, ExtractConfig cfg, bool keep_mask) {
  CityScaleResult res;
  const auto windows = run_stage("split", &res.timings, [&] {
    return split(extent.width, extent.height, tiling.window_px, tiling.overlap_px);
  });
  res.windows = windows.size();

  Stitcher stitcher(extent);
  run_stage("predict", &res.timings, [&] {
    const std::size_t workers = static_cast<std::size_t>(std::max(1, tiling.threads));
    auto predict_window = [&](const WindowSpec& w) {
      std::vector<RasterMask> folds;
      for (int f = 0; f < source.folds(); ++f) folds.push_back(source.predict(extent, w, f));
      return folds.size() == 1 ? std::move(folds.front()) : merge_fold_predictions(folds);
    };
    // Windows are predicted in chunks of `workers` and stitched in window order.
    for (std::size_t start = 0; start < windows.size(); start += workers) {
      const std::size_t n = std::min(workers, windows.size() - start);
      std::vector<RasterMask> out(n);
      std::vector<std::exception_ptr> err(n);
      auto job = [&](std::size_t i) {
        try {
          out[i] = predict_window(windows[start + i]);
        } catch (...) {
          err[i] = std::current_exception();
        }
      };
      if (n == 1) {
        job(0);
      } else {
        std::vector<std::thread> pool;
        for (std::size_t i = 0; i < n; ++i) pool.emplace_back(job, i);
        for (auto& t : pool) t.join();
      }
      for (std::size_t i = 0; i < n; ++i) {
        if (err[i]) std::rethrow_exception(err[i]);
        stitcher.add(windows[start + i], out[i]);
      }
    }
  });
  res.uncovered_pixels = stitcher.uncovered_pixels();
  RasterMask mask = run_stage("stitch", &res.timings, [&] { return stitcher.finish(); });

  cfg.city_scale = true;
  ExtractResult ex = extract_graph(mask, cfg);
  res.graph = std::move(ex.graph);
  res.timings.insert(res.timings.end(), ex.timings.begin(), ex.timings.end());
  if (keep_mask) res.mask = std::move(mask);
  return res;
}

}  // namespace cresi
