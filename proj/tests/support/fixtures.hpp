#pragma once

#include "cresi/graph.hpp"
#include "cresi/speed.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <vector>

namespace fixtures {

using cresi::NodeId;
using cresi::Point;
using cresi::Polyline;
using cresi::RoadEdge;
using cresi::RoadGraph;

inline RoadEdge straight(NodeId u, NodeId v, const RoadGraph& g) {
  return cresi::make_edge(u, v, {g.node(u).pos, g.node(v).pos});
}

inline void set_speed(RoadEdge& e, double mph) {
  e.speed_mph = mph;
  e.travel_time_s = cresi::travel_time(e.length_m, mph);
}

/// Nodes 0..n-1 on the x axis `spacing` apart, joined in order.
inline RoadGraph path_graph(int n, double spacing) {
  RoadGraph g;
  for (int i = 0; i < n; ++i) g.add_node(i, Point(i * spacing, 0.0));
  for (int i = 0; i + 1 < n; ++i) g.add_edge(straight(i, i + 1, g));
  return g;
}

/// Triangle A(0)-B(1) 100 m at 65 mph, B-C(2) 100 m at 65 mph, A-C 150 m at 20 mph.
/// Geometry bends so the straight-line lengths do not matter.
inline RoadGraph triangle() {
  RoadGraph g;
  g.add_node(0, Point(0, 0));
  g.add_node(1, Point(50, 86.60254037844386));
  g.add_node(2, Point(100, 0));
  auto ab = cresi::make_edge(0, 1, {Point(0, 0), Point(50, 86.60254037844386)});
  auto bc = cresi::make_edge(1, 2, {Point(50, 86.60254037844386), Point(100, 0)});
  // A-C detours south so it is 150 m long: two legs of 75 m.
  const double dip = std::sqrt(75.0 * 75.0 - 50.0 * 50.0);
  auto ac = cresi::make_edge(0, 2, {Point(0, 0), Point(50, -dip), Point(100, 0)});
  set_speed(ab, 65);
  set_speed(bc, 65);
  set_speed(ac, 20);
  g.add_edge(ab);
  g.add_edge(bc);
  g.add_edge(ac);
  return g;
}

/// Random graph on up to n nodes in a square; polylines have an optional bend.
/// Edges may cross (metrics and routing do not need planarity).
inline RoadGraph random_graph(std::mt19937_64& rng, int n_nodes, int n_edges, double extent, bool speeds,
                              bool bends = true) {
  std::uniform_real_distribution<double> pos(0.0, extent);
  std::uniform_int_distribution<int> pick(0, std::max(0, n_nodes - 1));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  RoadGraph g;
  for (int i = 0; i < n_nodes; ++i) g.add_node(i, Point(pos(rng), pos(rng)));
  for (int k = 0; k < n_edges && n_nodes > 1; ++k) {
    const int a = pick(rng);
    int b = pick(rng);
    if (a == b) b = (b + 1) % n_nodes;
    Polyline line{g.node(a).pos};
    if (bends && unit(rng) < 0.5) line.push_back(0.5 * (g.node(a).pos + g.node(b).pos) + Point(pos(rng), pos(rng)) * 0.1);
    line.push_back(g.node(b).pos);
    auto e = cresi::make_edge(a, b, line);
    if (speeds) set_speed(e, 10.0 + 55.0 * unit(rng));
    g.add_edge(e);
  }
  return g;
}

// --- independent oracles ----------------------------------------------------------

using Matrix = std::vector<std::vector<double>>;

inline double oracle_weight(const RoadEdge& e, bool time) {
  if (!time) return e.length_m;
  return e.travel_time_s ? *e.travel_time_s : std::numeric_limits<double>::quiet_NaN();
}

/// Floyd-Warshall over node indices.
inline Matrix all_pairs(const RoadGraph& g, bool time) {
  const double inf = std::numeric_limits<double>::infinity();
  const std::size_t n = g.node_count();
  Matrix d(n, std::vector<double>(n, inf));
  for (std::size_t i = 0; i < n; ++i) d[i][i] = 0.0;
  for (const auto& e : g.edges()) {
    const double w = oracle_weight(e, time);
    if (!(w >= 0.0)) continue;
    const auto a = g.index_of(e.u), b = g.index_of(e.v);
    d[a][b] = std::min(d[a][b], w);
    d[b][a] = std::min(d[b][a], w);
  }
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (d[i][k] + d[k][j] < d[i][j]) d[i][j] = d[i][k] + d[k][j];
  return d;
}

/// Minimum weight over every simple path from s to t (node indices), by exhaustive DFS.
inline double brute_force_route(const RoadGraph& g, std::size_t s, std::size_t t, bool time) {
  double best = std::numeric_limits<double>::infinity();
  std::vector<char> on(g.node_count(), 0);
  auto dfs = [&](auto&& self, std::size_t at, double acc) -> void {
    if (at == t) {
      best = std::min(best, acc);
      return;
    }
    on[at] = 1;
    for (const auto& e : g.edges()) {
      const auto a = g.index_of(e.u), b = g.index_of(e.v);
      if (a != at && b != at) continue;
      const std::size_t next = a == at ? b : a;
      const double w = oracle_weight(e, time);
      if (on[next] || !(w >= 0.0)) continue;
      self(self, next, acc + w);
    }
    on[at] = 0;
  };
  dfs(dfs, s, 0.0);
  return best;
}

struct OracleSnap {
  bool matched = false;
  std::size_t edge = 0;
  double arc = 0.0;
  double dist = 0.0;
};

/// Nearest point of any target edge to p, by scanning every segment.
inline OracleSnap oracle_nearest(const RoadGraph& target, const Point& p) {
  OracleSnap best;
  best.dist = std::numeric_limits<double>::infinity();
  for (std::size_t ei = 0; ei < target.edge_count(); ++ei) {
    const Polyline& line = target.edges()[ei].geometry;
    double before = 0.0;
    for (std::size_t s = 0; s + 1 < line.size(); ++s) {
      const Point a = line[s], b = line[s + 1];
      const double len2 = (b - a).squaredNorm();
      const double t = len2 > 0 ? std::clamp((p - a).dot(b - a) / len2, 0.0, 1.0) : 0.0;
      const double d = (a + t * (b - a) - p).norm();
      if (d < best.dist) best = {true, ei, before + t * std::sqrt(len2), d};
      before += std::sqrt(len2);
    }
  }
  return best;
}

/// One-direction score straight from the definition, no midpoints: every node of G is
/// a control node; snap points are spliced into a dense distance matrix of Gp.
inline double oracle_apls_directional(const RoadGraph& G, const RoadGraph& Gp, double buffer, bool time,
                                      bool* defined = nullptr) {
  const double inf = std::numeric_limits<double>::infinity();
  const std::size_t nc = G.node_count();
  if (defined) *defined = false;
  if (nc < 2) return 0.0;

  // Augmented proposal: original nodes, then one extra node per matched control node.
  std::vector<OracleSnap> snap(nc);
  for (std::size_t i = 0; i < nc; ++i) {
    snap[i] = oracle_nearest(Gp, G.nodes()[i].pos);
    if (!(snap[i].dist <= buffer)) snap[i].matched = false;
  }
  const std::size_t base = Gp.node_count();
  const std::size_t n = base + nc;
  Matrix d(n, std::vector<double>(n, inf));
  for (std::size_t i = 0; i < n; ++i) d[i][i] = 0.0;
  auto link = [&](std::size_t a, std::size_t b, double w) {
    d[a][b] = std::min(d[a][b], w);
    d[b][a] = std::min(d[b][a], w);
  };
  for (std::size_t ei = 0; ei < Gp.edge_count(); ++ei) {
    const RoadEdge& e = Gp.edges()[ei];
    const double total = oracle_weight(e, time);
    if (!(total >= 0.0)) continue;
    const double len = cresi::polyline_length(e.geometry);
    const double scale = len > 0 ? total / len : 0.0;
    // Stops along the edge: u at 0, v at len, plus snap points on this edge.
    std::vector<std::pair<double, std::size_t>> stops{{0.0, Gp.index_of(e.u)}, {len, Gp.index_of(e.v)}};
    for (std::size_t i = 0; i < nc; ++i)
      if (snap[i].matched && snap[i].edge == ei) stops.push_back({snap[i].arc, base + i});
    std::sort(stops.begin(), stops.end());
    for (std::size_t k = 0; k + 1 < stops.size(); ++k)
      link(stops[k].second, stops[k + 1].second, (stops[k + 1].first - stops[k].first) * scale);
    if (e.u == e.v) link(stops.front().second, stops.back().second, 0.0);
  }
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (d[i][k] + d[k][j] < d[i][j]) d[i][j] = d[i][k] + d[k][j];

  const Matrix dg = all_pairs(G, time);
  double sum = 0.0;
  std::size_t pairs = 0;
  for (std::size_t a = 0; a < nc; ++a)
    for (std::size_t b = 0; b < nc; ++b) {
      if (a == b) continue;  // ordered pairs; every unordered pair counted twice
      const double lg = dg[a][b];
      if (!std::isfinite(lg) || !(lg > 0.0)) continue;
      ++pairs;
      if (!snap[a].matched || !snap[b].matched) continue;
      const double lp = d[base + a][base + b];
      if (!std::isfinite(lp)) continue;
      sum += 1.0 - std::min(1.0, std::abs(lg - lp) / lg);
    }
  if (pairs == 0) return 0.0;
  if (defined) *defined = true;
  return sum / static_cast<double>(pairs);
}

}  // namespace fixtures

namespace fixtures {

/// Structural equality: same node ids/positions and the same edge list in order.
inline bool same_graph(const cresi::RoadGraph& a, const cresi::RoadGraph& b) {
  if (a.node_count() != b.node_count() || a.edge_count() != b.edge_count()) return false;
  for (std::size_t i = 0; i < a.node_count(); ++i)
    if (a.nodes()[i].id != b.nodes()[i].id || a.nodes()[i].pos != b.nodes()[i].pos) return false;
  for (std::size_t i = 0; i < a.edge_count(); ++i) {
    const auto& x = a.edges()[i];
    const auto& y = b.edges()[i];
    if (x.u != y.u || x.v != y.v || x.geometry != y.geometry || x.length_m != y.length_m) return false;
  }
  return true;
}

/// Adds nodes at the polyline ends when missing (matched by exact position) and the edge.
inline void add_road(cresi::RoadGraph& g, cresi::Polyline line) {
  auto node_at = [&](const cresi::Point& p) {
    for (const auto& n : g.nodes())
      if (n.pos == p) return n.id;
    return g.add_node(p);
  };
  const auto u = node_at(line.front());
  const auto v = node_at(line.back());
  g.add_edge(cresi::make_edge(u, v, std::move(line)));
}

}  // namespace fixtures
