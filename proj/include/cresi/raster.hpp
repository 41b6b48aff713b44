#pragma once

#include "cresi/geometry.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <string>
#include <vector>

namespace cresi {

/// Row-major 2-D grid; row index = image row (north to south), column = east.
template <typename Scalar>
using Grid = Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

using Band = Grid<float>;
/// Binary raster with values in {0, 1}.
using BinaryMask = Grid<std::uint8_t>;

enum class MaskKind { binary, continuous, multiclass };

/// Number of bands of a multiclass mask: seven speed channels plus background.
inline constexpr int kMulticlassBands = 8;
inline constexpr int kBackgroundBand = 7;

std::string to_string(MaskKind k);
MaskKind parse_mask_kind(const std::string& s);

/// Multi-band floating-point raster with values in [0, 1].
struct RasterMask {
  MaskKind kind = MaskKind::binary;
  std::vector<Band> bands;
  GeoTransform transform;

  RasterMask() = default;
  RasterMask(MaskKind kind, int band_count, const GeoTransform& transform, float fill = 0.0f);

  int band_count() const { return static_cast<int>(bands.size()); }
  int width() const { return transform.width; }
  int height() const { return transform.height; }

  /// Throws DomainError if dimensions disagree with the transform or values leave [0, 1].
  void validate() const;
  bool same_shape(const RasterMask& other) const;
};

/// Single band obtained by taking the max over the road channels
/// (speed channels for multiclass, the only band otherwise).
Band flatten(const RasterMask& mask);

enum class SampleType { float32, uint8 };

/// Writes `<stem>.bin` (band-sequential little-endian samples) and `<stem>.json`
/// (shape, kind, dtype and geotransform). float32 round trips bit-exactly;
/// uint8 stores round(255 v).
void write_raster(const RasterMask& mask, const std::string& stem, SampleType type = SampleType::float32);
RasterMask read_raster(const std::string& stem);

}  // namespace cresi
