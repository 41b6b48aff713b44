#pragma once

#include "cresi/mask_gen.hpp"
#include "cresi/pipeline.hpp"
#include "cresi/raster.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace cresi {

struct WindowSpec {
  int col_off = 0;
  int row_off = 0;
  int width = 0;
  int height = 0;
  int overlap = 0;

  bool operator==(const WindowSpec&) const = default;
};

/// Regular window grid with stride window_px - overlap_px; the last row and column
/// shift inward so no window leaves the extent. Windows larger than the extent are clamped.
std::vector<WindowSpec> split(int width, int height, int window_px, int overlap_px);

/// Per-pixel, per-band mean of equally shaped masks.
RasterMask merge_fold_predictions(const std::vector<RasterMask>& masks);

/// Accumulates window masks into a full-extent mean. Pixels no window covers stay 0.
class Stitcher {
 public:
  explicit Stitcher(const GeoTransform& full);

  /// Throws DomainError when the window leaves the extent or the mask does not match it.
  void add(const WindowSpec& w, const RasterMask& mask);
  std::int64_t uncovered_pixels() const;
  /// Moves the result out; the stitcher is empty afterwards.
  RasterMask finish();

 private:
  GeoTransform full_;
  RasterMask out_;
  Grid<std::uint16_t> count_;
  bool started_ = false;
};

RasterMask stitch(const std::vector<std::pair<WindowSpec, RasterMask>>& windows, const GeoTransform& full);

/// Anything that yields a prediction mask per window and fold. predict() must be
/// safe to call from several threads at once.
class SegmentationSource {
 public:
  virtual ~SegmentationSource() = default;
  virtual int folds() const = 0;
  virtual RasterMask predict(const GeoTransform& base, const WindowSpec& w, int fold) const = 0;
};

/// Rasterises a ground-truth graph with one OracleNoise per fold.
class OracleSource : public SegmentationSource {
 public:
  OracleSource(RoadGraph truth, std::vector<OracleNoise> folds, double halfwidth_m = kDefaultHalfwidthM);
  int folds() const override { return static_cast<int>(noise_.size()); }
  RasterMask predict(const GeoTransform& base, const WindowSpec& w, int fold) const override;

 private:
  RoadGraph truth_;
  std::vector<OracleNoise> noise_;
  double halfwidth_m_;
};

/// Reads `<dir>/mask_r{row_off}_c{col_off}` rasters written by write_raster.
class DirectorySource : public SegmentationSource {
 public:
  explicit DirectorySource(std::string dir) : dir_(std::move(dir)) {}
  int folds() const override { return 1; }
  RasterMask predict(const GeoTransform& base, const WindowSpec& w, int fold) const override;
  static std::string stem_for(const std::string& dir, const WindowSpec& w);

 private:
  std::string dir_;
};

struct TilingConfig {
  int window_px = 2000;
  int overlap_px = 500;
  int threads = 1;
};

struct CityScaleResult {
  RoadGraph graph;
  std::vector<StageTiming> timings;
  std::size_t windows = 0;
  std::int64_t uncovered_pixels = 0;
  std::optional<RasterMask> mask;  ///< stitched prediction when requested
};

/// split -> predict (fold merge) -> stitch -> extract_graph with the city-scale
/// subgraph threshold. Errors carry the failing stage name.
CityScaleResult run_city_scale(const SegmentationSource& source, const GeoTransform& extent,
                               const TilingConfig& tiling, ExtractConfig cfg, bool keep_mask = false);

}  // namespace cresi
