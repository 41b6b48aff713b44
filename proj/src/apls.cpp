#include "cresi/metrics.hpp"

#include "cresi/errors.hpp"
#include "cresi/spatial.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <unordered_map>

namespace cresi {

void AplsConfig::validate() const {
  if (!(buffer_m > 0.0)) throw ConfigError("metrics.apls.buffer_m", "must be > 0");
  if (max_control_nodes < 2) throw ConfigError("metrics.apls.max_control_nodes", "must be >= 2");
  if (!(midpoint_spacing_m > 0.0)) throw ConfigError("metrics.apls.midpoint_spacing_m", "must be > 0");
}

namespace {

constexpr double kSnapEps = 1e-9;

/// Piece of `e` covering [s0, s1], with speed kept and time prorated.
RoadEdge sub_edge(const RoadEdge& e, NodeId u, NodeId v, double s0, double s1) {
  RoadEdge out = make_edge(u, v, slice(e.geometry, s0, s1));
  out.metadata = e.metadata;
  out.speed_mph = e.speed_mph;
  if (e.travel_time_s) {
    if (e.speed_mph) out.travel_time_s = out.length_m / (*e.speed_mph * kMphToMps);
    else out.travel_time_s = e.length_m > 0.0 ? *e.travel_time_s * out.length_m / e.length_m : 0.0;
  }
  return out;
}

void require_times(const RoadGraph& g, const char* which) {
  for (const auto& e : g.edges())
    if (!e.travel_time_s)
      throw DomainError(std::string("time-weighted APLS needs travel_time_s on every ") + which + " edge");
}

struct Prepared {
  RoadGraph graph;
  std::vector<NodeId> control;
};

Prepared prepare(const RoadGraph& g, const AplsConfig& cfg) {
  Prepared p;
  p.graph = cfg.large_mode ? g : inject_midpoints(g, cfg.midpoint_spacing_m);
  for (const auto& n : p.graph.nodes()) p.control.push_back(n.id);
  if (p.control.size() > static_cast<std::size_t>(cfg.max_control_nodes)) {
    std::vector<NodeId> pick;
    std::mt19937_64 rng(cfg.seed);
    std::sample(p.control.begin(), p.control.end(), std::back_inserter(pick), cfg.max_control_nodes, rng);
    p.control = std::move(pick);
  }
  return p;
}

}  // namespace

RoadGraph inject_midpoints(const RoadGraph& g, double spacing_m) {
  if (!(spacing_m > 0.0)) throw DomainError("midpoint spacing must be > 0");
  RoadGraph out;
  out.transform = g.transform;
  for (const auto& n : g.nodes()) out.add_node(n.id, n.pos);
  for (const auto& e : g.edges()) {
    const int pieces = std::max(1, static_cast<int>(std::ceil(e.length_m / spacing_m - 1e-12)));
    if (pieces == 1) {
      out.add_edge(e);
      continue;
    }
    const double step = e.length_m / pieces;
    NodeId prev = e.u;
    for (int k = 1; k <= pieces; ++k) {
      const NodeId next = k == pieces ? e.v : out.add_node(point_at(e.geometry, k * step));
      out.add_edge(sub_edge(e, prev, next, (k - 1) * step, k == pieces ? e.length_m : k * step));
      prev = next;
    }
  }
  return out;
}

SnapResult snap_control_nodes(const RoadGraph& source, std::span<const NodeId> control, const RoadGraph& target,
                              double buffer_m) {
  SnapResult res;
  res.mapping.assign(control.size(), std::nullopt);
  const SegmentIndex index(target, std::max(buffer_m, 1.0) * 2.0);

  struct Cut {
    double s;
    std::size_t control;
  };
  std::map<std::size_t, std::vector<Cut>> cuts;
  for (std::size_t i = 0; i < control.size(); ++i) {
    const auto hit = index.nearest(source.node(control[i]).pos, buffer_m);
    if (!hit) continue;
    cuts[hit->edge].push_back({hit->arc_position, i});
  }

  RoadGraph out;
  out.transform = target.transform;
  for (const auto& n : target.nodes()) out.add_node(n.id, n.pos);
  for (std::size_t ei = 0; ei < target.edge_count(); ++ei) {
    const RoadEdge& e = target.edges()[ei];
    auto it = cuts.find(ei);
    if (it == cuts.end()) {
      out.add_edge(e);
      continue;
    }
    auto& list = it->second;
    std::stable_sort(list.begin(), list.end(), [](const Cut& a, const Cut& b) { return a.s < b.s; });
    const double len = polyline_length(e.geometry);
    NodeId prev = e.u;
    double prev_s = 0.0;
    for (const Cut& c : list) {
      if (c.s <= kSnapEps && !e.is_self_loop()) {
        res.mapping[c.control] = e.u;
        continue;
      }
      if (c.s >= len - kSnapEps && !e.is_self_loop()) {
        res.mapping[c.control] = e.v;
        continue;
      }
      if (c.s - prev_s <= kSnapEps && prev != e.u) {
        res.mapping[c.control] = prev;
        continue;
      }
      const NodeId mid = out.add_node(point_at(e.geometry, c.s));
      out.add_edge(sub_edge(e, prev, mid, prev_s, c.s));
      res.mapping[c.control] = mid;
      prev = mid;
      prev_s = c.s;
    }
    out.add_edge(sub_edge(e, prev, e.v, prev_s, len));
  }
  res.target = std::move(out);
  return res;
}

DirectionalScore apls_directional_mapped(const RoadGraph& G, std::span<const NodeId> control, const RoadGraph& Gp,
                                         std::span<const std::optional<NodeId>> mapping, RouteWeight weight) {
  if (mapping.size() != control.size()) throw DomainError("mapping size differs from control node count");
  DirectionalScore out;
  if (control.size() < 2) return out;
  const Adjacency adj_g = build_adjacency(G);
  const Adjacency adj_p = build_adjacency(Gp);
  std::vector<std::size_t> ci(control.size());
  for (std::size_t i = 0; i < control.size(); ++i) ci[i] = G.index_of(control[i]);
  std::vector<std::optional<std::size_t>> pi(control.size());
  for (std::size_t i = 0; i < control.size(); ++i)
    if (mapping[i]) pi[i] = Gp.index_of(*mapping[i]);

  double sum = 0.0;
  for (std::size_t a = 0; a + 1 < control.size(); ++a) {
    const auto dg = dijkstra(G, adj_g, ci[a], weight);
    std::vector<double> dp;
    if (pi[a]) dp = dijkstra(Gp, adj_p, *pi[a], weight);
    for (std::size_t b = a + 1; b < control.size(); ++b) {
      const double lg = dg[ci[b]];
      if (!std::isfinite(lg) || !(lg > 0.0)) continue;
      ++out.pairs;
      if (!pi[a] || !pi[b]) continue;
      const double lp = dp[*pi[b]];
      if (!std::isfinite(lp)) continue;
      sum += 1.0 - std::min(1.0, std::abs(lg - lp) / lg);
    }
  }
  if (out.pairs == 0) return out;
  out.defined = true;
  out.score = sum / static_cast<double>(out.pairs);
  return out;
}

DirectionalScore apls_directional(const RoadGraph& G, const RoadGraph& Gp, const AplsConfig& cfg) {
  cfg.validate();
  if (cfg.weight == RouteWeight::time) {
    require_times(G, "truth");
    require_times(Gp, "proposal");
  }
  const Prepared p = prepare(G, cfg);
  if (p.control.size() < 2) return {};
  const SnapResult snap = snap_control_nodes(p.graph, p.control, Gp, cfg.buffer_m);
  return apls_directional_mapped(p.graph, p.control, snap.target, snap.mapping, cfg.weight);
}

AplsResult apls(const RoadGraph& G, const RoadGraph& Gp, const AplsConfig& cfg) {
  AplsResult res;
  res.forward = apls_directional(G, Gp, cfg);
  res.reverse = apls_directional(Gp, G, cfg);
  if (!res.forward.defined && !res.reverse.defined) return res;
  res.defined = true;
  const double f = res.forward.defined ? res.forward.score : 0.0;
  const double r = res.reverse.defined ? res.reverse.score : 0.0;
  if (cfg.symmetrize == Symmetrize::mean) res.score = 0.5 * (f + r);
  else res.score = f + r > 0.0 ? 2.0 * f * r / (f + r) : 0.0;
  return res;
}

}  // namespace cresi
