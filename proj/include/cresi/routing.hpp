#pragma once

#include "cresi/graph.hpp"

#include <vector>

namespace cresi {

enum class RouteWeight { length, time };

struct Route {
  bool found = false;
  std::vector<NodeId> nodes;      ///< src ... dst
  std::vector<std::size_t> edges; ///< edge indices in traversal order
  double total_weight = 0.0;      ///< meters or seconds per the query
  double total_length_m = 0.0;
  double total_time_s = 0.0;      ///< NaN when an edge on the route lacks a travel time
  std::size_t impassable_edges = 0;  ///< edges ignored for lacking a travel time (time queries)

  /// Concatenated geometry in traversal order.
  Polyline geometry(const RoadGraph& g) const;
};

/// Minimum-weight route. Ties between equal-weight routes resolve to the
/// lexicographically smallest node-id sequence. Throws NotFoundError for unknown nodes.
Route shortest_route(const RoadGraph& g, NodeId src, NodeId dst, RouteWeight weight);

/// Edge weight under `weight`; NaN when a time weight is unavailable.
double edge_weight(const RoadEdge& e, RouteWeight weight);

/// Single-source distances (by node index) over edges with finite non-negative weights.
std::vector<double> dijkstra(const RoadGraph& g, const Adjacency& adj, std::size_t source, RouteWeight weight,
                             double cutoff = std::numeric_limits<double>::infinity());

}  // namespace cresi
