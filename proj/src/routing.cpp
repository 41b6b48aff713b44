#include "cresi/routing.hpp"

#include "cresi/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

namespace cresi {

double edge_weight(const RoadEdge& e, RouteWeight weight) {
  if (weight == RouteWeight::length) return e.length_m;
  return e.travel_time_s ? *e.travel_time_s : std::numeric_limits<double>::quiet_NaN();
}

std::vector<double> dijkstra(const RoadGraph& g, const Adjacency& adj, std::size_t source, RouteWeight weight,
                             double cutoff) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  std::vector<double> dist(adj.size(), inf);
  using Item = std::pair<double, std::size_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  dist[source] = 0.0;
  heap.emplace(0.0, source);
  while (!heap.empty()) {
    auto [d, u] = heap.top();
    heap.pop();
    if (d > dist[u]) continue;
    for (const auto& inc : adj[u]) {
      const double w = edge_weight(g.edges()[inc.edge], weight);
      if (!(w >= 0.0)) continue;
      const double nd = d + w;
      if (nd < dist[inc.neighbor] && nd <= cutoff) {
        dist[inc.neighbor] = nd;
        heap.emplace(nd, inc.neighbor);
      }
    }
  }
  return dist;
}

Polyline Route::geometry(const RoadGraph& g) const {
  Polyline out;
  if (nodes.empty()) return out;
  out.push_back(g.node(nodes.front()).pos);
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const auto& e = g.edges()[edges[i]];
    const bool forward = e.u == nodes[i];
    if (forward) out.insert(out.end(), e.geometry.begin() + 1, e.geometry.end());
    else out.insert(out.end(), e.geometry.rbegin() + 1, e.geometry.rend());
  }
  return out;
}

Route shortest_route(const RoadGraph& g, NodeId src, NodeId dst, RouteWeight weight) {
  const std::size_t s = g.index_of(src);
  const std::size_t t = g.index_of(dst);
  Route route;
  if (weight == RouteWeight::time)
    for (const auto& e : g.edges())
      if (!e.travel_time_s) ++route.impassable_edges;
  if (s == t) {
    route.found = true;
    route.nodes = {src};
    return route;
  }
  const Adjacency adj = build_adjacency(g);
  const auto from_src = dijkstra(g, adj, s, weight);
  if (!std::isfinite(from_src[t])) return route;
  const auto to_dst = dijkstra(g, adj, t, weight);
  const double total = from_src[t];
  const double tol = 1e-12 * std::max(1.0, total);

  // Walk forward choosing the smallest-id successor that stays on some optimal route.
  std::size_t cur = s;
  std::vector<char> visited(adj.size(), 0);
  visited[s] = 1;
  route.nodes.push_back(src);
  while (cur != t) {
    std::size_t best_edge = 0, best_next = 0;
    NodeId best_id = std::numeric_limits<NodeId>::max();
    double best_w = std::numeric_limits<double>::infinity();
    for (const auto& inc : adj[cur]) {
      if (inc.neighbor == cur) continue;
      const double w = edge_weight(g.edges()[inc.edge], weight);
      if (!(w >= 0.0)) continue;
      const double through = from_src[cur] + w;
      if (std::abs(through - from_src[inc.neighbor]) > tol) continue;
      if (std::abs(through + to_dst[inc.neighbor] - total) > tol) continue;
      if (visited[inc.neighbor]) continue;
      const NodeId nid = g.nodes()[inc.neighbor].id;
      if (nid < best_id || (nid == best_id && w < best_w)) {
        best_id = nid;
        best_w = w;
        best_edge = inc.edge;
        best_next = inc.neighbor;
      }
    }
    if (best_id == std::numeric_limits<NodeId>::max()) break;
    route.edges.push_back(best_edge);
    route.nodes.push_back(best_id);
    cur = best_next;
    visited[cur] = 1;
  }
  route.found = cur == t;
  if (!route.found) {
    route.nodes.clear();
    route.edges.clear();
    return route;
  }
  route.total_weight = total;
  for (auto e : route.edges) {
    route.total_length_m += g.edges()[e].length_m;
    const auto& tt = g.edges()[e].travel_time_s;
    route.total_time_s += tt ? *tt : std::numeric_limits<double>::quiet_NaN();
  }
  return route;
}

}  // namespace cresi
