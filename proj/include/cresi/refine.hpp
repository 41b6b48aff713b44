#pragma once

#include "cresi/raster.hpp"

#include <cstdint>
#include <vector>

namespace cresi {

// --- separable Gaussian blur ---------------------------------------------------

/// Index into [0, n) under half-sample symmetric reflection (d c b a | a b c d | d c b a).
inline Eigen::Index reflect_index(Eigen::Index i, Eigen::Index n) {
  const Eigen::Index period = 2 * n;
  i %= period;
  if (i < 0) i += period;
  return i < n ? i : period - 1 - i;
}

/// Normalised 1-D Gaussian taps for standard deviation `sigma_px`, truncated at 4 sigma.
std::vector<double> gaussian_kernel(double sigma_px);

/// 2-D Gaussian blur with reflect padding.
template <typename Scalar>
Grid<Scalar> gaussian_blur(const Grid<Scalar>& in, double sigma_px);

/// Per-band blur with sigma = kernel_m / pixel_size; output clamped to [0, 1].
RasterMask gaussian_smooth(const RasterMask& mask, double kernel_m = 2.0);

// --- binary operations -----------------------------------------------------------

/// 1 where value >= threshold.
BinaryMask binarize(const Band& band, double threshold = 0.3);

/// Exact squared Euclidean distance (in pixels^2) to the nearest foreground pixel.
/// Pixels farther than the grid diagonal report a value larger than any real distance.
Grid<std::int32_t> squared_distance_to_foreground(const BinaryMask& mask);

/// Dilation / erosion by the disk {d : |d| <= radius_px}; the element is clipped at borders.
BinaryMask dilate_disk(const BinaryMask& mask, double radius_px);
BinaryMask erode_disk(const BinaryMask& mask, double radius_px);

/// Closing followed by opening with a disk of radius kernel_m / pixel_size.
BinaryMask morph_refine(const BinaryMask& mask, double pixel_size, double kernel_m = 2.0);

/// Deletes 8-connected foreground components and fills 4-connected background
/// components whose area (pixels * pixel_size^2) is below `min_area_m2`.
BinaryMask remove_small(const BinaryMask& mask, double pixel_size, double min_area_m2 = 30.0);

/// Connected components of pixels equal to `value`; one entry per component.
struct ComponentSummary {
  std::vector<std::int64_t> areas;  ///< pixel counts
};
ComponentSummary component_areas(const BinaryMask& mask, std::uint8_t value, bool eight_connected);

struct RefineConfig {
  double smooth_kernel_m = 2.0;  ///< Gaussian sigma, meters
  double threshold = 0.3;
  double morph_kernel_m = 2.0;   ///< disk radius, meters
  double min_area_m2 = 30.0;
  /// Continuous masks are scaled by this gain before flattening so the slowest
  /// road class (15 mph of 65) reaches full strength.
  double continuous_gain = 65.0 / 15.0;
};

/// Road band used for thresholding: max over speed channels (multiclass),
/// min(1, gain * v) (continuous) or the band itself (binary).
Band road_band(const RasterMask& mask, const RefineConfig& cfg);

/// flatten -> smooth -> binarize -> morph_refine -> remove_small.
BinaryMask refine_pipeline(const RasterMask& mask, const RefineConfig& cfg = {});

// --- implementation ----------------------------------------------------------------

template <typename Scalar>
Grid<Scalar> gaussian_blur(const Grid<Scalar>& in, double sigma_px) {
  const auto taps64 = gaussian_kernel(sigma_px);
  const Eigen::Index radius = static_cast<Eigen::Index>(taps64.size() / 2);
  std::vector<Scalar> taps(taps64.begin(), taps64.end());
  const Eigen::Index rows = in.rows();
  const Eigen::Index cols = in.cols();

  Grid<Scalar> tmp(rows, cols);
  std::vector<Scalar> padded(static_cast<std::size_t>(cols + 2 * radius));
  std::vector<Scalar> acc(static_cast<std::size_t>(cols));
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index i = 0; i < cols + 2 * radius; ++i) padded[i] = in(r, reflect_index(i - radius, cols));
    std::fill(acc.begin(), acc.end(), Scalar(0));
    for (std::size_t k = 0; k < taps.size(); ++k) {
      const Scalar w = taps[k];
      const Scalar* src = padded.data() + k;
      for (Eigen::Index c = 0; c < cols; ++c) acc[c] += w * src[c];
    }
    for (Eigen::Index c = 0; c < cols; ++c) tmp(r, c) = acc[c];
  }

  Grid<Scalar> out = Grid<Scalar>::Zero(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (std::size_t k = 0; k < taps.size(); ++k) {
      const Eigen::Index src = reflect_index(r + static_cast<Eigen::Index>(k) - radius, rows);
      out.row(r) += taps[k] * tmp.row(src);
    }
  }
  return out;
}

}  // namespace cresi
