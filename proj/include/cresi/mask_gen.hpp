#pragma once

#include "cresi/graph.hpp"
#include "cresi/raster.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>

namespace cresi {

inline constexpr double kDefaultHalfwidthM = 2.0;

/// Pixel window [col_off, col_off + width) x [row_off, row_off + height) of a base grid.
/// Pixel centers are always computed from the base transform, so a window renders
/// exactly the pixels the full raster would.
struct PixelFrame {
  GeoTransform base;
  int col_off = 0;
  int row_off = 0;
  int width = 0;
  int height = 0;

  static PixelFrame whole(const GeoTransform& t) { return {t, 0, 0, t.width, t.height}; }
  GeoTransform transform() const { return base.window(col_off, row_off, width, height); }
};

/// Calls fn(row, col) (window-local) for every pixel whose center lies within
/// `halfwidth_m` of the polyline. Pixels may be visited more than once.
template <typename Fn>
void for_each_buffer_pixel(const PixelFrame& frame, std::span<const Point> line, double halfwidth_m, Fn&& fn);

RasterMask render_binary_mask(const RoadGraph& g, const GeoTransform& t, double halfwidth_m = kDefaultHalfwidthM);
RasterMask render_binary_mask(const RoadGraph& g, const PixelFrame& frame, double halfwidth_m = kDefaultHalfwidthM);

/// Road pixels carry min(1, speed / max_speed); overlapping roads take the max.
RasterMask render_continuous_mask(const RoadGraph& g, const GeoTransform& t, double halfwidth_m = kDefaultHalfwidthM,
                                  double max_speed_mph = 65.0);
RasterMask render_continuous_mask(const RoadGraph& g, const PixelFrame& frame, double halfwidth_m = kDefaultHalfwidthM,
                                  double max_speed_mph = 65.0);

/// Seven speed channels plus a background band (1 where no speed channel is set).
RasterMask render_multiclass_mask(const RoadGraph& g, const GeoTransform& t, double halfwidth_m = kDefaultHalfwidthM);
RasterMask render_multiclass_mask(const RoadGraph& g, const PixelFrame& frame, double halfwidth_m = kDefaultHalfwidthM);

struct OracleNoise {
  double gaussian_sigma = 0.0;
  double dropout_prob = 0.0;
  double dropout_len_m = 10.0;
  std::uint64_t seed = 0;

  bool is_zero() const { return gaussian_sigma == 0.0 && dropout_prob == 0.0; }
  void validate() const;
};

/// Where a dropout gap was cut: arc-length interval along edge `edge`.
struct DropoutGap {
  std::size_t edge = 0;
  double start_m = 0.0;
  double end_m = 0.0;
};

/// Gaps the oracle cuts for `noise` (a pure function of the graph and seed).
std::vector<DropoutGap> plan_dropouts(const RoadGraph& g, const OracleNoise& noise, double halfwidth_m);

/// Synthetic segmenter: multiclass render, dropout gaps, then clipped Gaussian noise.
/// Noise is a counter-based function of (seed, band, global pixel), so windows of a
/// frame reproduce the full-frame prediction exactly.
RasterMask oracle_predict(const RoadGraph& g, const PixelFrame& frame, const OracleNoise& noise,
                          double halfwidth_m = kDefaultHalfwidthM);
RasterMask oracle_predict(const RoadGraph& g, const GeoTransform& t, const OracleNoise& noise,
                          double halfwidth_m = kDefaultHalfwidthM);

/// Standard normal deviate determined by its arguments alone.
double counter_normal(std::uint64_t seed, std::uint64_t band, std::uint64_t row, std::uint64_t col);

// --- reference losses -------------------------------------------------------

inline constexpr double kLossClip = 1e-7;
inline constexpr double kDiceSmoothing = 1e-6;

/// alpha * mean focal loss + (1 - alpha) * (1 - mean per-band Dice).
double combined_loss_multiclass(const RasterMask& pred, const RasterMask& truth, double alpha = 0.75,
                                double focal_gamma = 2.0);

/// alpha * mean binary cross entropy + (1 - alpha) * (1 - mean per-band Dice).
double combined_loss_continuous(const RasterMask& pred, const RasterMask& truth, double alpha = 0.75);

double focal_loss(const RasterMask& pred, const RasterMask& truth, double gamma = 2.0);
double cross_entropy_loss(const RasterMask& pred, const RasterMask& truth);
double dice_loss(const RasterMask& pred, const RasterMask& truth);

// --- implementation ---------------------------------------------------------

template <typename Fn>
void for_each_buffer_pixel(const PixelFrame& frame, std::span<const Point> line, double halfwidth_m, Fn&& fn) {
  const GeoTransform& t = frame.base;
  const double ps = t.pixel_size;
  const double r2 = halfwidth_m * halfwidth_m;
  auto visit_segment = [&](const Point& a, const Point& b) {
    const double ymin = std::min(a.y(), b.y()) - halfwidth_m;
    const double ymax = std::max(a.y(), b.y()) + halfwidth_m;
    // Global rows whose centers can fall inside [ymin, ymax].
    int row_lo = static_cast<int>(std::floor((t.origin_y - ymax) / ps - 0.5)) - 1;
    int row_hi = static_cast<int>(std::ceil((t.origin_y - ymin) / ps - 0.5)) + 1;
    row_lo = std::max(row_lo, frame.row_off);
    row_hi = std::min(row_hi, frame.row_off + frame.height - 1);
    const double dy = b.y() - a.y();
    for (int gr = row_lo; gr <= row_hi; ++gr) {
      const double yc = t.origin_y - (gr + 0.5) * ps;
      double t0 = 0.0, t1 = 1.0;
      if (dy != 0.0) {
        double ta = (yc - halfwidth_m - a.y()) / dy;
        double tb = (yc + halfwidth_m - a.y()) / dy;
        if (ta > tb) std::swap(ta, tb);
        t0 = std::max(0.0, ta);
        t1 = std::min(1.0, tb);
        if (t0 > t1) continue;
      } else if (std::abs(yc - a.y()) > halfwidth_m) {
        continue;
      }
      const double x0 = a.x() + t0 * (b.x() - a.x());
      const double x1 = a.x() + t1 * (b.x() - a.x());
      const double xmin = std::min(x0, x1) - halfwidth_m;
      const double xmax = std::max(x0, x1) + halfwidth_m;
      int col_lo = static_cast<int>(std::floor((xmin - t.origin_x) / ps - 0.5)) - 1;
      int col_hi = static_cast<int>(std::ceil((xmax - t.origin_x) / ps - 0.5)) + 1;
      col_lo = std::max(col_lo, frame.col_off);
      col_hi = std::min(col_hi, frame.col_off + frame.width - 1);
      for (int gc = col_lo; gc <= col_hi; ++gc) {
        const Point c(t.origin_x + (gc + 0.5) * ps, yc);
        if ((c - closest_on_segment(c, a, b)).squaredNorm() <= r2) fn(gr - frame.row_off, gc - frame.col_off);
      }
    }
  };
  if (line.size() == 1) visit_segment(line[0], line[0]);
  for (std::size_t i = 0; i + 1 < line.size(); ++i) visit_segment(line[i], line[i + 1]);
}

}  // namespace cresi
