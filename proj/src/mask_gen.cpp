#include "cresi/mask_gen.hpp"

#include "cresi/errors.hpp"
#include "cresi/speed.hpp"

#include <numbers>
#include <random>
#include <sstream>

namespace cresi {

namespace {

void check_halfwidth(double halfwidth_m) {
  if (!(halfwidth_m > 0.0)) throw DomainError("mask halfwidth must be > 0");
}

double required_speed(const RoadGraph& g, std::size_t i) {
  const auto& e = g.edges()[i];
  if (!e.speed_mph) {
    std::ostringstream os;
    os << "edge " << i << " (" << e.u << " -> " << e.v << ") has no speed_mph";
    throw PreconditionError(os.str());
  }
  return *e.speed_mph;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

double unit_open(std::uint64_t bits) {
  // (0, 1]: never zero so log() stays finite.
  return (static_cast<double>(bits >> 11) + 1.0) * (1.0 / 9007199254740992.0);
}

}  // namespace

RasterMask render_binary_mask(const RoadGraph& g, const PixelFrame& frame, double halfwidth_m) {
  check_halfwidth(halfwidth_m);
  RasterMask mask(MaskKind::binary, 1, frame.transform());
  Band& band = mask.bands[0];
  for (const auto& e : g.edges())
    for_each_buffer_pixel(frame, e.geometry, halfwidth_m, [&](int r, int c) { band(r, c) = 1.0f; });
  return mask;
}

RasterMask render_binary_mask(const RoadGraph& g, const GeoTransform& t, double halfwidth_m) {
  return render_binary_mask(g, PixelFrame::whole(t), halfwidth_m);
}

RasterMask render_continuous_mask(const RoadGraph& g, const PixelFrame& frame, double halfwidth_m,
                                  double max_speed_mph) {
  check_halfwidth(halfwidth_m);
  if (!(max_speed_mph > 0.0)) throw DomainError("max speed must be > 0");
  RasterMask mask(MaskKind::continuous, 1, frame.transform());
  Band& band = mask.bands[0];
  for (std::size_t i = 0; i < g.edges().size(); ++i) {
    const float value = static_cast<float>(std::min(1.0, required_speed(g, i) / max_speed_mph));
    for_each_buffer_pixel(frame, g.edges()[i].geometry, halfwidth_m,
                          [&](int r, int c) { band(r, c) = std::max(band(r, c), value); });
  }
  return mask;
}

RasterMask render_continuous_mask(const RoadGraph& g, const GeoTransform& t, double halfwidth_m,
                                  double max_speed_mph) {
  return render_continuous_mask(g, PixelFrame::whole(t), halfwidth_m, max_speed_mph);
}

RasterMask render_multiclass_mask(const RoadGraph& g, const PixelFrame& frame, double halfwidth_m) {
  check_halfwidth(halfwidth_m);
  RasterMask mask(MaskKind::multiclass, kMulticlassBands, frame.transform());
  mask.bands[kBackgroundBand].setOnes();
  for (std::size_t i = 0; i < g.edges().size(); ++i) {
    Band& channel = mask.bands[speed_to_channel(std::min(required_speed(g, i), 70.0))];
    Band& background = mask.bands[kBackgroundBand];
    for_each_buffer_pixel(frame, g.edges()[i].geometry, halfwidth_m, [&](int r, int c) {
      channel(r, c) = 1.0f;
      background(r, c) = 0.0f;
    });
  }
  return mask;
}

RasterMask render_multiclass_mask(const RoadGraph& g, const GeoTransform& t, double halfwidth_m) {
  return render_multiclass_mask(g, PixelFrame::whole(t), halfwidth_m);
}

void OracleNoise::validate() const {
  if (!(gaussian_sigma >= 0.0 && gaussian_sigma <= 1.0)) throw DomainError("gaussian_sigma must lie in [0, 1]");
  if (!(dropout_prob >= 0.0 && dropout_prob <= 1.0)) throw DomainError("dropout_prob must lie in [0, 1]");
  if (!(dropout_len_m >= 0.0)) throw DomainError("dropout_len_m must be >= 0");
}

double counter_normal(std::uint64_t seed, std::uint64_t band, std::uint64_t row, std::uint64_t col) {
  std::uint64_t h = splitmix64(seed);
  h = splitmix64(h ^ band);
  h = splitmix64(h ^ row);
  h = splitmix64(h ^ col);
  const double u1 = unit_open(h);
  const double u2 = unit_open(splitmix64(h));
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::vector<DropoutGap> plan_dropouts(const RoadGraph& g, const OracleNoise& noise, double halfwidth_m) {
  std::vector<DropoutGap> gaps;
  if (noise.dropout_prob <= 0.0 || noise.dropout_len_m <= 0.0) return gaps;
  // Keep gaps clear of junctions so they cut only their own edge.
  const double margin = 3.0 * halfwidth_m;
  for (std::size_t i = 0; i < g.edges().size(); ++i) {
    std::mt19937_64 rng(splitmix64(noise.seed ^ splitmix64(0xd509ULL + i)));
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    if (unit(rng) >= noise.dropout_prob) continue;
    const double len = g.edges()[i].length_m;
    const double gap = std::min(noise.dropout_len_m, len);
    const double room = len - gap - 2.0 * margin;
    const double start = room > 0.0 ? margin + unit(rng) * room : (len - gap) / 2.0;
    gaps.push_back({i, start, start + gap});
  }
  return gaps;
}

RasterMask oracle_predict(const RoadGraph& g, const PixelFrame& frame, const OracleNoise& noise, double halfwidth_m) {
  noise.validate();
  RasterMask mask = render_multiclass_mask(g, frame, halfwidth_m);
  for (const auto& gap : plan_dropouts(g, noise, halfwidth_m)) {
    const auto& line = g.edges()[gap.edge].geometry;
    const Polyline piece = slice(line, gap.start_m, gap.end_m);
    for_each_buffer_pixel(frame, piece, halfwidth_m + frame.base.pixel_size, [&](int r, int c) {
      const Point center = frame.base.pixel_center(r + frame.row_off, c + frame.col_off);
      const auto proj = project_onto_polyline(center, line);
      // Pad by a pixel so the cleared run along the centerline is never shorter than the gap.
      const double pad = frame.base.pixel_size;
      if (proj.arc_position < gap.start_m - pad || proj.arc_position > gap.end_m + pad) return;
      for (int b = 0; b < kBackgroundBand; ++b) mask.bands[b](r, c) = 0.0f;
      mask.bands[kBackgroundBand](r, c) = 1.0f;
    });
  }
  if (noise.gaussian_sigma > 0.0) {
    for (int b = 0; b < mask.band_count(); ++b) {
      Band& band = mask.bands[b];
      for (int r = 0; r < band.rows(); ++r) {
        const auto gr = static_cast<std::uint64_t>(r + frame.row_off);
        for (int c = 0; c < band.cols(); ++c) {
          const double z = counter_normal(noise.seed, b, gr, static_cast<std::uint64_t>(c + frame.col_off));
          band(r, c) = static_cast<float>(std::clamp(band(r, c) + noise.gaussian_sigma * z, 0.0, 1.0));
        }
      }
    }
  }
  return mask;
}

RasterMask oracle_predict(const RoadGraph& g, const GeoTransform& t, const OracleNoise& noise, double halfwidth_m) {
  return oracle_predict(g, PixelFrame::whole(t), noise, halfwidth_m);
}

}  // namespace cresi
