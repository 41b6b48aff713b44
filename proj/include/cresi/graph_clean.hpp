#pragma once

#include "cresi/graph.hpp"

namespace cresi {

/// Drops every connected component whose summed edge length is < min_total_length_m.
RoadGraph prune_subgraphs(const RoadGraph& g, double min_total_length_m);

/// Repeatedly deletes degree-1 nodes whose incident edge is shorter than max_spur_m,
/// then merges the edges around nodes left with degree 2.
RoadGraph remove_spurs(const RoadGraph& g, double max_spur_m = 3.0);

/// Links each degree-1 node to its nearest node closer than max_gap_m that is not
/// already one edge away (or, with exclude_component, not in the same component).
/// Closest pairs go first; each terminal proposes at most one new edge per pass.
RoadGraph connect_terminals(const RoadGraph& g, double max_gap_m = 6.0, bool exclude_component = false);

/// Direction a terminal points along: from the point `window_m` back along its edge to the terminal.
Eigen::Vector2d terminal_heading(const RoadGraph& g, NodeId terminal, double window_m = 5.0);

/// Joins pairs of degree-1 nodes closer than max_gap_m whose headings both point at
/// the other terminal within max_angle_deg; greedy by distance, one new edge per terminal.
RoadGraph close_gaps_directional(const RoadGraph& g, double max_gap_m = 25.0, double max_angle_deg = 30.0,
                                 double heading_window_m = 5.0);

/// Contracts edges shorter than max_edge_m whose endpoints both have degree >= 3 into
/// one node at their midpoint (thinning splits a four-way crossing into two three-way
/// junctions). Incident geometry is re-anchored on the merged node.
RoadGraph merge_close_junctions(const RoadGraph& g, double max_edge_m = 5.0);

/// Douglas-Peucker on every edge geometry; lengths are recomputed.
RoadGraph simplify_edges(const RoadGraph& g, double tolerance_m);

struct CleanConfig {
  double min_subgraph_m = 6.0;
  double max_spur_m = 3.0;
  double max_terminal_gap_m = 6.0;
  bool exclude_component = false;
  double junction_merge_m = 5.0;
  double directional_gap_m = 25.0;
  double directional_angle_deg = 30.0;
  double heading_window_m = 5.0;
  /// Simplification tolerance in pixels (scaled by the graph's pixel size); <= 0 disables.
  /// Large enough to flatten pixel staircases and the kinks thinning leaves at junctions.
  double simplify_tolerance_px = 5.0;
};

inline constexpr double kChipSubgraphM = 6.0;
inline constexpr double kCitySubgraphM = 80.0;

/// prune -> spurs -> merge junctions -> connect terminals -> directional gaps -> prune -> simplify.
RoadGraph clean_graph(const RoadGraph& g, const CleanConfig& cfg, double pixel_size);

}  // namespace cresi
