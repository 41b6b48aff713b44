#include "cresi/graph.hpp"

#include "cresi/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace cresi {

std::string_view to_string(RoadType t) {
  switch (t) {
    case RoadType::motorway: return "motorway";
    case RoadType::primary: return "primary";
    case RoadType::secondary: return "secondary";
    case RoadType::tertiary: return "tertiary";
    case RoadType::residential: return "residential";
    case RoadType::unclassified: return "unclassified";
    case RoadType::cart_track: return "cart_track";
  }
  return "unknown";
}

std::optional<RoadType> parse_road_type(std::string_view name) {
  for (int i = 0; i < kRoadTypeCount; ++i) {
    const auto t = static_cast<RoadType>(i);
    if (name == to_string(t)) return t;
  }
  if (name == "cart track" || name == "cart-track") return RoadType::cart_track;
  return std::nullopt;
}

RoadEdge make_edge(NodeId u, NodeId v, Polyline geometry) {
  RoadEdge e;
  e.u = u;
  e.v = v;
  e.length_m = polyline_length(geometry);
  e.geometry = std::move(geometry);
  return e;
}

NodeId RoadGraph::add_node(const Point& pos) {
  const NodeId id = next_id_;
  add_node(id, pos);
  return id;
}

void RoadGraph::add_node(NodeId id, const Point& pos) {
  if (index_.count(id)) throw DomainError("duplicate node id " + std::to_string(id));
  if (!pos.allFinite()) throw DomainError("node " + std::to_string(id) + " has non-finite coordinates");
  index_.emplace(id, nodes_.size());
  nodes_.push_back({id, pos});
  next_id_ = std::max(next_id_, id + 1);
}

std::size_t RoadGraph::add_edge(RoadEdge edge) {
  if (!has_node(edge.u) || !has_node(edge.v))
    throw DomainError("edge references missing node (" + std::to_string(edge.u) + ", " +
                      std::to_string(edge.v) + ")");
  edges_.push_back(std::move(edge));
  return edges_.size() - 1;
}

std::size_t RoadGraph::index_of(NodeId id) const {
  auto it = index_.find(id);
  if (it == index_.end()) throw NotFoundError("node " + std::to_string(id) + " not found");
  return it->second;
}

Adjacency build_adjacency(const RoadGraph& g) {
  Adjacency adj(g.node_count());
  for (std::size_t e = 0; e < g.edges().size(); ++e) {
    const auto& edge = g.edges()[e];
    const std::size_t a = g.index_of(edge.u);
    const std::size_t b = g.index_of(edge.v);
    adj[a].push_back({e, b});
    if (a != b) adj[b].push_back({e, a});
  }
  return adj;
}

std::vector<int> degrees(const RoadGraph& g) {
  std::vector<int> deg(g.node_count(), 0);
  for (const auto& e : g.edges()) {
    ++deg[g.index_of(e.u)];
    ++deg[g.index_of(e.v)];
  }
  return deg;
}

int connected_components(const RoadGraph& g, std::vector<int>& label) {
  std::vector<std::size_t> parent(g.node_count());
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (const auto& e : g.edges()) {
    const auto a = find(g.index_of(e.u));
    const auto b = find(g.index_of(e.v));
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
  label.assign(g.node_count(), -1);
  std::vector<int> root_label(g.node_count(), -1);
  int count = 0;
  for (std::size_t i = 0; i < g.node_count(); ++i) {
    const auto r = find(i);
    if (root_label[r] < 0) root_label[r] = count++;
    label[i] = root_label[r];
  }
  return count;
}

double total_length_m(const RoadGraph& g) {
  double total = 0.0;
  for (const auto& e : g.edges()) total += e.length_m;
  return total;
}

GraphStats graph_stats(const RoadGraph& g) {
  GraphStats s;
  s.nodes = g.node_count();
  s.edges = g.edge_count();
  s.total_length_km = total_length_m(g) / 1000.0;
  std::vector<int> label;
  s.components = connected_components(g, label);
  return s;
}

void validate(const RoadGraph& g) {
  auto fail = [](std::size_t i, const std::string& what) {
    std::ostringstream os;
    os << "edge " << i << ": " << what;
    throw DomainError(os.str());
  };
  for (std::size_t i = 0; i < g.edges().size(); ++i) {
    const auto& e = g.edges()[i];
    if (!g.has_node(e.u) || !g.has_node(e.v)) fail(i, "references a missing node");
    if (e.geometry.size() < 2) fail(i, "geometry needs at least two points");
    if ((e.geometry.front() - g.node(e.u).pos).norm() > 1e-6 ||
        (e.geometry.back() - g.node(e.v).pos).norm() > 1e-6)
      fail(i, "geometry endpoints do not match node coordinates");
    const double arc = polyline_length(e.geometry);
    if (std::abs(arc - e.length_m) > 1e-6 * std::max(1.0, arc)) fail(i, "length_m differs from arc length");
    if (e.speed_mph && (*e.speed_mph < 1.0 || *e.speed_mph > 65.0)) fail(i, "speed_mph outside [1, 65]");
    if (e.speed_mph && e.travel_time_s) {
      const double expect = e.length_m / (*e.speed_mph * kMphToMps);
      if (std::abs(expect - *e.travel_time_s) > 1e-6 * std::max(1.0, expect))
        fail(i, "travel_time_s inconsistent with length and speed");
    }
    if (e.metadata && e.metadata->lanes < 1) fail(i, "lanes must be >= 1");
  }
}

RoadGraph filter_edges(const RoadGraph& g, const std::vector<char>& keep_edge, bool keep_isolated_nodes) {
  std::vector<char> used(g.node_count(), keep_isolated_nodes ? 1 : 0);
  for (std::size_t i = 0; i < g.edges().size(); ++i) {
    if (!keep_edge[i]) continue;
    used[g.index_of(g.edges()[i].u)] = 1;
    used[g.index_of(g.edges()[i].v)] = 1;
  }
  RoadGraph out;
  out.transform = g.transform;
  for (std::size_t i = 0; i < g.node_count(); ++i)
    if (used[i]) out.add_node(g.nodes()[i].id, g.nodes()[i].pos);
  for (std::size_t i = 0; i < g.edges().size(); ++i)
    if (keep_edge[i]) out.add_edge(g.edges()[i]);
  return out;
}

Bounds bounds(const RoadGraph& g) {
  Bounds b;
  for (const auto& n : g.nodes()) b.extend(n.pos);
  for (const auto& e : g.edges())
    for (const auto& p : e.geometry) b.extend(p);
  return b;
}

}  // namespace cresi
