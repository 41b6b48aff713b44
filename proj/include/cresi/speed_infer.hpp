#pragma once

#include "cresi/graph.hpp"
#include "cresi/raster.hpp"

#include <optional>

namespace cresi {

enum class SpeedMode { multiclass, continuous };

struct SpeedInferConfig {
  int patch_size = 8;
  double background_filter = 0.3;
  double fallback_mph = 20.0;
  double max_speed_mph = 65.0;  ///< continuous full-scale value
};

/// Speed read from a patch_size x patch_size window around (row, col), clipped at
/// the raster border. Empty when no pixel passes the background filter.
std::optional<double> patch_speed(const RasterMask& mask, int row, int col, SpeedMode mode,
                                  const SpeedInferConfig& cfg = {});

/// Mean of patch speeds at the midpoints of the edge's segments; midpoints outside
/// the raster are skipped.
std::optional<double> edge_speed(const RasterMask& mask, const RoadEdge& edge, SpeedMode mode,
                                 const SpeedInferConfig& cfg = {});

/// Speed and travel time for every edge; edges without signal get cfg.fallback_mph.
/// Binary masks carry no speed, so every edge gets the fallback.
/// Throws ConfigError when the fallback is not positive.
RoadGraph infer_speeds(const RoadGraph& g, const RasterMask& mask, const SpeedInferConfig& cfg = {});

SpeedMode speed_mode_for(MaskKind kind);

}  // namespace cresi
