#pragma once

#include "cresi/graph.hpp"
#include "cresi/routing.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace cresi {

// --- APLS ----------------------------------------------------------------------

enum class Symmetrize { mean, harmonic };

struct AplsConfig {
  double buffer_m = 4.0;
  RouteWeight weight = RouteWeight::length;
  bool large_mode = false;        ///< no midpoints
  int max_control_nodes = 500;
  double midpoint_spacing_m = 50.0;
  std::uint64_t seed = 0;
  Symmetrize symmetrize = Symmetrize::mean;

  void validate() const;
};

/// Splits edges into equal pieces no longer than spacing_m. Geometry and total length are kept.
RoadGraph inject_midpoints(const RoadGraph& g, double spacing_m);

struct SnapResult {
  RoadGraph target;                          ///< target with snap points inserted as nodes
  std::vector<std::optional<NodeId>> mapping;  ///< per control node, in input order
};

/// Maps each control node of `source` to the nearest point of `target`'s edges within
/// buffer_m, splitting the target edge there. Farther nodes stay unmatched.
SnapResult snap_control_nodes(const RoadGraph& source, std::span<const NodeId> control, const RoadGraph& target,
                              double buffer_m);

struct DirectionalScore {
  double score = 0.0;
  std::size_t pairs = 0;  ///< control-node pairs with a path in the source graph
  bool defined = false;
};

/// Mean pair term over unordered control pairs (a, b) joined in G:
/// 1 - min(1, |L_G - L_Gp| / L_G), or 0 when a or b is unmatched or disconnected in Gp.
DirectionalScore apls_directional_mapped(const RoadGraph& G, std::span<const NodeId> control, const RoadGraph& Gp,
                                         std::span<const std::optional<NodeId>> mapping, RouteWeight weight);

/// Control nodes of G per cfg (midpoints unless large_mode, seeded subsample), snapped into Gp.
DirectionalScore apls_directional(const RoadGraph& G, const RoadGraph& Gp, const AplsConfig& cfg);

struct AplsResult {
  double score = 0.0;
  bool defined = false;  ///< false when neither graph has two control nodes
  DirectionalScore forward;  ///< truth -> proposal
  DirectionalScore reverse;  ///< proposal -> truth
};

/// Symmetric APLS. A direction without control nodes scores 0 when the other graph is not empty.
/// Throws DomainError for time weighting when an edge lacks travel_time_s.
AplsResult apls(const RoadGraph& G, const RoadGraph& Gp, const AplsConfig& cfg = {});

// --- TOPO ----------------------------------------------------------------------

struct TopoConfig {
  double hole_m = 4.0;
  double radius_m = 300.0;
  int n_seeds = 100;
  std::uint64_t seed = 0;

  void validate() const;
};

struct TopoResult {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::int64_t true_pos = 0;
  std::int64_t false_pos = 0;
  std::int64_t false_neg = 0;
  int seeds = 0;
};

/// Locations every `interval_m` along the graph reachable within radius_m of `start`
/// (which is snapped to the nearest edge point): nodes plus interior edge points.
std::vector<Point> reachable_samples(const RoadGraph& g, const Point& start, double radius_m, double interval_m);

/// Seeds drawn uniformly along G's length.
std::vector<Point> topo_seeds(const RoadGraph& G, int n_seeds, std::uint64_t seed);

TopoResult topo(const RoadGraph& G, const RoadGraph& Gp, const TopoConfig& cfg = {});
TopoResult topo_at_seeds(const RoadGraph& G, const RoadGraph& Gp, std::span<const Point> seeds,
                         const TopoConfig& cfg = {});

}  // namespace cresi
