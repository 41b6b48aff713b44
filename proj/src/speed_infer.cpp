#include "cresi/speed_infer.hpp"

#include "cresi/errors.hpp"
#include "cresi/speed.hpp"

#include <algorithm>
#include <array>

namespace cresi {

SpeedMode speed_mode_for(MaskKind kind) {
  return kind == MaskKind::multiclass ? SpeedMode::multiclass : SpeedMode::continuous;
}

std::optional<double> patch_speed(const RasterMask& mask, int row, int col, SpeedMode mode,
                                  const SpeedInferConfig& cfg) {
  const int half = cfg.patch_size / 2;
  const int r0 = std::max(0, row - half), r1 = std::min(mask.height() - 1, row + cfg.patch_size - half - 1);
  const int c0 = std::max(0, col - half), c1 = std::min(mask.width() - 1, col + cfg.patch_size - half - 1);
  if (r0 > r1 || c0 > c1) return std::nullopt;
  const float thr = static_cast<float>(cfg.background_filter);

  if (mode == SpeedMode::multiclass) {
    if (mask.band_count() < kSpeedChannels) throw DomainError("multiclass speed inference needs 7 speed channels");
    std::array<int, kSpeedChannels> count{};
    for (int ch = 0; ch < kSpeedChannels; ++ch)
      count[ch] = static_cast<int>(
          (mask.bands[ch].block(r0, c0, r1 - r0 + 1, c1 - c0 + 1) >= thr).count());
    const auto best = std::max_element(count.begin(), count.end());  // first max -> lower channel
    if (*best == 0) return std::nullopt;
    return channel_to_speed(static_cast<int>(best - count.begin()));
  }

  const auto block = mask.bands.front().block(r0, c0, r1 - r0 + 1, c1 - c0 + 1);
  double sum = 0.0;
  int n = 0;
  for (Eigen::Index r = 0; r < block.rows(); ++r)
    for (Eigen::Index c = 0; c < block.cols(); ++c)
      if (block(r, c) >= thr) {
        sum += block(r, c);
        ++n;
      }
  if (n == 0) return std::nullopt;
  return sum / n * cfg.max_speed_mph;
}

std::optional<double> edge_speed(const RasterMask& mask, const RoadEdge& edge, SpeedMode mode,
                                 const SpeedInferConfig& cfg) {
  double sum = 0.0;
  int n = 0;
  auto sample = [&](const Point& p) {
    const Eigen::Vector2i px = mask.transform.pixel_of(p);
    if (!mask.transform.contains_pixel(px.y(), px.x())) return;
    if (auto s = patch_speed(mask, px.y(), px.x(), mode, cfg)) {
      sum += *s;
      ++n;
    }
  };
  if (edge.geometry.size() == 1) sample(edge.geometry.front());
  for (std::size_t i = 0; i + 1 < edge.geometry.size(); ++i) sample(0.5 * (edge.geometry[i] + edge.geometry[i + 1]));
  if (n == 0) return std::nullopt;
  return sum / n;
}

RoadGraph infer_speeds(const RoadGraph& g, const RasterMask& mask, const SpeedInferConfig& cfg) {
  if (!(cfg.fallback_mph > 0.0)) throw ConfigError("speed.fallback_mph", "must be > 0");
  if (cfg.patch_size < 1) throw ConfigError("speed.patch_size", "must be >= 1");
  RoadGraph out = g;
  const SpeedMode mode = speed_mode_for(mask.kind);
  for (auto& e : out.mutable_edges()) {
    std::optional<double> s;
    if (mask.kind != MaskKind::binary) s = edge_speed(mask, e, mode, cfg);
    e.speed_mph = std::clamp(s.value_or(cfg.fallback_mph), 1.0, 65.0);
    e.travel_time_s = travel_time(e.length_m, *e.speed_mph);
  }
  return out;
}

}  // namespace cresi
