#include "cresi/graph_clean.hpp"

#include "cresi/errors.hpp"
#include "cresi/speed.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <tuple>

namespace cresi {

RoadGraph prune_subgraphs(const RoadGraph& g, double min_total_length_m) {
  if (min_total_length_m < 0.0) throw DomainError("min subgraph length must be >= 0");
  std::vector<int> label;
  const int n = connected_components(g, label);
  std::vector<double> length(n, 0.0);
  for (const auto& e : g.edges()) length[label[g.index_of(e.u)]] += e.length_m;
  RoadGraph out;
  out.transform = g.transform;
  for (std::size_t i = 0; i < g.node_count(); ++i)
    if (!(length[label[i]] < min_total_length_m)) out.add_node(g.nodes()[i].id, g.nodes()[i].pos);
  for (const auto& e : g.edges())
    if (out.has_node(e.u)) out.add_edge(e);
  return out;
}

namespace {

/// Mutable edge soup used by the cleaning passes.
struct WorkGraph {
  const RoadGraph& src;
  std::vector<RoadEdge> edges;
  std::vector<char> edge_alive;
  std::vector<char> node_alive;
  std::vector<std::vector<std::size_t>> incident;  // by node index

  explicit WorkGraph(const RoadGraph& g)
      : src(g), edges(g.edges()), edge_alive(g.edge_count(), 1), node_alive(g.node_count(), 1),
        incident(g.node_count()) {
    for (std::size_t e = 0; e < edges.size(); ++e) {
      incident[g.index_of(edges[e].u)].push_back(e);
      if (edges[e].u != edges[e].v) incident[g.index_of(edges[e].v)].push_back(e);
    }
  }
  std::size_t idx(NodeId id) const { return src.index_of(id); }
  int degree(std::size_t n) const {
    int d = 0;
    for (auto e : incident[n])
      if (edge_alive[e]) d += edges[e].u == edges[e].v ? 2 : 1;
    return d;
  }
  std::vector<std::size_t> alive_incident(std::size_t n) const {
    std::vector<std::size_t> out;
    for (auto e : incident[n])
      if (edge_alive[e]) out.push_back(e);
    return out;
  }
  void kill_edge(std::size_t e) { edge_alive[e] = 0; }
  std::size_t add_edge(RoadEdge e) {
    edges.push_back(std::move(e));
    edge_alive.push_back(1);
    const auto& ne = edges.back();
    incident[idx(ne.u)].push_back(edges.size() - 1);
    if (ne.u != ne.v) incident[idx(ne.v)].push_back(edges.size() - 1);
    return edges.size() - 1;
  }
  RoadGraph build() const {
    RoadGraph out;
    out.transform = src.transform;
    for (std::size_t i = 0; i < src.node_count(); ++i)
      if (node_alive[i]) out.add_node(src.nodes()[i].id, src.nodes()[i].pos);
    for (std::size_t e = 0; e < edges.size(); ++e)
      if (edge_alive[e]) out.add_edge(edges[e]);
    return out;
  }
};

/// Geometry of `e` oriented to end at node `at`.
Polyline oriented_into(const RoadEdge& e, NodeId at) {
  Polyline line = e.geometry;
  if (e.v != at) std::reverse(line.begin(), line.end());
  return line;
}

RoadEdge merge_through(const RoadEdge& a, const RoadEdge& b, NodeId via) {
  Polyline first = oriented_into(a, via);
  Polyline second = oriented_into(b, via);
  std::reverse(second.begin(), second.end());
  first.insert(first.end(), second.begin() + 1, second.end());
  RoadEdge out = make_edge(a.other(via), b.other(via), std::move(first));
  out.length_m = a.length_m + b.length_m;
  if (a.speed_mph && b.speed_mph && *a.speed_mph == *b.speed_mph) out.speed_mph = a.speed_mph;
  if (a.metadata && b.metadata && *a.metadata == *b.metadata) out.metadata = a.metadata;
  if (out.speed_mph && a.travel_time_s && b.travel_time_s) out.travel_time_s = *a.travel_time_s + *b.travel_time_s;
  return out;
}

/// Uniform grid over node positions for radius queries.
class NodeGrid {
 public:
  NodeGrid(const RoadGraph& g, double cell) : g_(g), cell_(std::max(cell, 1e-9)) {
    for (std::size_t i = 0; i < g.node_count(); ++i) cells_[key(g.nodes()[i].pos)].push_back(i);
  }
  template <typename Fn>
  void within(const Point& p, double radius, Fn&& fn) const {
    const auto [cx, cy] = key(p);
    const long long span = static_cast<long long>(std::ceil(radius / cell_));
    for (long long dx = -span; dx <= span; ++dx)
      for (long long dy = -span; dy <= span; ++dy) {
        auto it = cells_.find({cx + dx, cy + dy});
        if (it == cells_.end()) continue;
        for (auto i : it->second) {
          const double d = (g_.nodes()[i].pos - p).norm();
          if (d <= radius) fn(i, d);
        }
      }
  }

 private:
  std::pair<long long, long long> key(const Point& p) const {
    return {static_cast<long long>(std::floor(p.x() / cell_)), static_cast<long long>(std::floor(p.y() / cell_))};
  }
  const RoadGraph& g_;
  double cell_;
  std::map<std::pair<long long, long long>, std::vector<std::size_t>> cells_;
};

}  // namespace

RoadGraph remove_spurs(const RoadGraph& g, double max_spur_m) {
  WorkGraph w(g);
  std::vector<char> touched(g.node_count(), 0);
  std::vector<std::size_t> queue;
  for (std::size_t i = 0; i < g.node_count(); ++i)
    if (w.degree(i) == 1) queue.push_back(i);
  while (!queue.empty()) {
    const std::size_t n = queue.back();
    queue.pop_back();
    if (!w.node_alive[n] || w.degree(n) != 1) continue;
    const std::size_t e = w.alive_incident(n).front();
    if (!(w.edges[e].length_m < max_spur_m)) continue;
    const std::size_t other = w.idx(w.edges[e].other(g.nodes()[n].id));
    w.kill_edge(e);
    w.node_alive[n] = 0;
    touched[other] = 1;
    const int d = w.degree(other);
    if (d == 0) w.node_alive[other] = 0;  // the whole component was a spur
    else if (d == 1) queue.push_back(other);
  }
  for (std::size_t n = 0; n < g.node_count(); ++n) {
    if (!touched[n] || !w.node_alive[n] || w.degree(n) != 2) continue;
    const auto inc = w.alive_incident(n);
    if (inc.size() != 2) continue;  // a lone self loop
    const NodeId id = g.nodes()[n].id;
    RoadEdge merged = merge_through(w.edges[inc[0]], w.edges[inc[1]], id);
    w.kill_edge(inc[0]);
    w.kill_edge(inc[1]);
    w.node_alive[n] = 0;
    w.add_edge(std::move(merged));
  }
  return w.build();
}

RoadGraph connect_terminals(const RoadGraph& g, double max_gap_m, bool exclude_component) {
  if (!(max_gap_m > 0.0)) return g;
  const Adjacency adj = build_adjacency(g);
  const auto deg = degrees(g);
  std::vector<int> label;
  connected_components(g, label);
  const NodeGrid grid(g, max_gap_m);

  struct Candidate {
    double dist;
    NodeId a, b;
    std::size_t ia, ib;
  };
  std::vector<Candidate> cands;
  for (std::size_t t = 0; t < g.node_count(); ++t) {
    if (deg[t] != 1) continue;
    const Point& p = g.nodes()[t].pos;
    double best = std::numeric_limits<double>::infinity();
    std::size_t best_i = 0;
    bool found = false;
    grid.within(p, max_gap_m, [&](std::size_t i, double d) {
      if (i == t || !(d < max_gap_m)) return;
      if (deg[i] == 0) return;  // isolated nodes are not road; linking one would make it a new terminal
      if (exclude_component && label[i] == label[t]) return;
      for (const auto& inc : adj[t])
        if (inc.neighbor == i) return;
      if (d < best || (d == best && g.nodes()[i].id < g.nodes()[best_i].id)) {
        best = d;
        best_i = i;
        found = true;
      }
    });
    if (found) cands.push_back({best, g.nodes()[t].id, g.nodes()[best_i].id, t, best_i});
  }
  std::sort(cands.begin(), cands.end(), [](const Candidate& x, const Candidate& y) {
    return std::tie(x.dist, x.a, x.b) < std::tie(y.dist, y.a, y.b);
  });

  // Each terminal proposes one link; mutual proposals collapse into one edge.
  RoadGraph out = g;
  std::map<std::pair<NodeId, NodeId>, char> added;
  for (const auto& c : cands) {
    const auto key = std::minmax(c.a, c.b);
    if (added.count(key)) continue;
    out.add_edge(make_edge(c.a, c.b, {g.nodes()[c.ia].pos, g.nodes()[c.ib].pos}));
    added[key] = 1;
  }
  return out;
}

Eigen::Vector2d terminal_heading(const RoadGraph& g, NodeId terminal, double window_m) {
  for (const auto& e : g.edges()) {
    if (e.u != terminal && e.v != terminal) continue;
    const Polyline line = oriented_into(e, terminal);
    const double len = polyline_length(line);
    const Point back = point_at(line, std::max(0.0, len - window_m));
    return line.back() - back;
  }
  return Eigen::Vector2d::Zero();
}

RoadGraph close_gaps_directional(const RoadGraph& g, double max_gap_m, double max_angle_deg,
                                 double heading_window_m) {
  if (max_gap_m < 0.0) throw DomainError("max_gap_m must be >= 0");
  if (max_angle_deg < 0.0 || max_angle_deg > 90.0) throw DomainError("max_angle_deg must lie in [0, 90]");
  if (max_gap_m == 0.0) return g;
  const auto deg = degrees(g);
  const Adjacency adj = build_adjacency(g);
  std::vector<Eigen::Vector2d> heading(g.node_count(), Eigen::Vector2d::Zero());
  for (std::size_t i = 0; i < g.node_count(); ++i)
    if (deg[i] == 1) heading[i] = terminal_heading(g, g.nodes()[i].id, heading_window_m);

  const NodeGrid grid(g, max_gap_m);
  struct Candidate {
    double dist;
    NodeId a, b;
    std::size_t ia, ib;
  };
  std::vector<Candidate> cands;
  for (std::size_t a = 0; a < g.node_count(); ++a) {
    if (deg[a] != 1) continue;
    const Point& pa = g.nodes()[a].pos;
    grid.within(pa, max_gap_m, [&](std::size_t b, double d) {
      if (b <= a || deg[b] != 1 || !(d < max_gap_m) || d == 0.0) return;
      for (const auto& inc : adj[a])
        if (inc.neighbor == b) return;
      const Eigen::Vector2d ab = g.nodes()[b].pos - pa;
      if (angle_between_deg(heading[a], ab) > max_angle_deg) return;
      if (angle_between_deg(heading[b], -ab) > max_angle_deg) return;
      cands.push_back({d, g.nodes()[a].id, g.nodes()[b].id, a, b});
    });
  }
  std::sort(cands.begin(), cands.end(), [](const Candidate& x, const Candidate& y) {
    return std::tie(x.dist, x.a, x.b) < std::tie(y.dist, y.a, y.b);
  });
  RoadGraph out = g;
  std::vector<char> used(g.node_count(), 0);
  for (const auto& c : cands) {
    if (used[c.ia] || used[c.ib]) continue;
    out.add_edge(make_edge(c.a, c.b, {g.nodes()[c.ia].pos, g.nodes()[c.ib].pos}));
    used[c.ia] = used[c.ib] = 1;
  }
  return out;
}

RoadGraph merge_close_junctions(const RoadGraph& g, double max_edge_m) {
  if (!(max_edge_m > 0.0)) return g;
  const auto deg = degrees(g);
  // Union short junction-junction edges; each group becomes one node at the mean position.
  std::vector<std::size_t> parent(g.node_count());
  for (std::size_t i = 0; i < parent.size(); ++i) parent[i] = i;
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  std::vector<char> contracted(g.edge_count(), 0);
  for (std::size_t ei = 0; ei < g.edge_count(); ++ei) {
    const RoadEdge& e = g.edges()[ei];
    if (e.is_self_loop() || !(e.length_m < max_edge_m)) continue;
    const std::size_t a = g.index_of(e.u), b = g.index_of(e.v);
    if (deg[a] < 3 || deg[b] < 3) continue;
    contracted[ei] = 1;
    const std::size_t ra = find(a), rb = find(b);
    if (ra != rb) parent[std::max(ra, rb)] = std::min(ra, rb);
  }
  std::vector<Point> sum(g.node_count(), Point::Zero());
  std::vector<int> count(g.node_count(), 0);
  for (std::size_t i = 0; i < g.node_count(); ++i) {
    sum[find(i)] += g.nodes()[i].pos;
    ++count[find(i)];
  }
  RoadGraph out;
  out.transform = g.transform;
  for (std::size_t i = 0; i < g.node_count(); ++i)
    if (find(i) == i) out.add_node(g.nodes()[i].id, sum[i] / count[i]);
  for (std::size_t ei = 0; ei < g.edge_count(); ++ei) {
    if (contracted[ei]) continue;
    const RoadEdge& e = g.edges()[ei];
    const std::size_t ru = find(g.index_of(e.u)), rv = find(g.index_of(e.v));
    const NodeId u = g.nodes()[ru].id, v = g.nodes()[rv].id;
    Polyline line = e.geometry;
    line.front() = out.node(u).pos;
    line.back() = out.node(v).pos;
    // Drop vertices the moved endpoint now doubles back over.
    if (line.size() > 2 && (line[1] - line[0]).norm() < 1e-9) line.erase(line.begin() + 1);
    if (line.size() > 2 && (line[line.size() - 2] - line.back()).norm() < 1e-9) line.erase(line.end() - 2);
    RoadEdge ne = make_edge(u, v, std::move(line));
    ne.metadata = e.metadata;
    ne.speed_mph = e.speed_mph;
    if (ne.speed_mph && e.travel_time_s) ne.travel_time_s = travel_time(ne.length_m, *ne.speed_mph);
    out.add_edge(std::move(ne));
  }
  return out;
}

RoadGraph simplify_edges(const RoadGraph& g, double tolerance_m) {
  RoadGraph out = g;
  if (!(tolerance_m > 0.0)) return out;
  for (auto& e : out.mutable_edges()) {
    e.geometry = simplify(e.geometry, tolerance_m);
    e.length_m = polyline_length(e.geometry);
    if (e.speed_mph && e.travel_time_s) e.travel_time_s = e.length_m / (*e.speed_mph * kMphToMps);
  }
  return out;
}

RoadGraph clean_graph(const RoadGraph& g, const CleanConfig& cfg, double pixel_size) {
  RoadGraph out = prune_subgraphs(g, cfg.min_subgraph_m);
  out = remove_spurs(out, cfg.max_spur_m);
  out = merge_close_junctions(out, cfg.junction_merge_m);
  out = connect_terminals(out, cfg.max_terminal_gap_m, cfg.exclude_component);
  out = close_gaps_directional(out, cfg.directional_gap_m, cfg.directional_angle_deg, cfg.heading_window_m);
  out = prune_subgraphs(out, cfg.min_subgraph_m);
  return simplify_edges(out, cfg.simplify_tolerance_px * pixel_size);
}

}  // namespace cresi
