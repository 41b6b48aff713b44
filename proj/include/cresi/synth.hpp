#pragma once

#include "cresi/graph.hpp"
#include "cresi/speed.hpp"

#include <cstdint>

namespace cresi {

struct SynthConfig {
  double extent_m = 2000.0;
  double density = 50.0;       ///< grid intersections per km^2
  double margin_m = 40.0;      ///< keep-out band along the scene border
  double jitter = 0.15;        ///< node jitter as a fraction of the grid spacing
  double bend = 0.08;          ///< perpendicular offset of the interior vertex, fraction of spacing
  double extra_edge_prob = 0.85;  ///< chance a non-tree grid edge is kept
  std::uint64_t seed = 0;
};

/// Jittered-grid street network: a random spanning tree plus most remaining grid
/// edges, one bent interior vertex per edge, metadata drawn per grid line and
/// speeds from `table`. Connected, planar and deterministic in the seed.
/// A density too low for a 2x2 grid yields a single road across the scene.
RoadGraph gen_synthetic_city(const SynthConfig& cfg, const SpeedTable& table = SpeedTable::defaults());
RoadGraph gen_synthetic_city(double extent_m, double density, std::uint64_t seed);

/// Square raster frame covering [0, extent_m]^2 at `pixel_size`.
GeoTransform scene_transform(double extent_m, double pixel_size);

}  // namespace cresi
