#include "cresi/metrics.hpp"

#include "cresi/errors.hpp"
#include "cresi/spatial.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <queue>
#include <random>
#include <tuple>
#include <unordered_map>

namespace cresi {

void TopoConfig::validate() const {
  if (!(hole_m > 0.0)) throw ConfigError("metrics.topo.hole_m", "must be > 0");
  if (!(radius_m > hole_m)) throw ConfigError("metrics.topo.radius_m", "must exceed hole_m");
  if (n_seeds < 1) throw DomainError("topo needs at least one seed");
}

namespace {

/// Node distances from a point at arc position `s` on edge `start`, bounded by cutoff.
std::vector<double> distances_from(const RoadGraph& g, const Adjacency& adj, std::size_t start, double s,
                                   double cutoff) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  std::vector<double> dist(g.node_count(), inf);
  using Item = std::pair<double, std::size_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  const RoadEdge& e = g.edges()[start];
  const std::size_t u = g.index_of(e.u), v = g.index_of(e.v);
  dist[u] = s;
  dist[v] = std::min(dist[v], e.length_m - s);
  heap.emplace(dist[u], u);
  heap.emplace(dist[v], v);
  while (!heap.empty()) {
    auto [d, n] = heap.top();
    heap.pop();
    if (d > dist[n]) continue;
    for (const auto& inc : adj[n]) {
      const double nd = d + g.edges()[inc.edge].length_m;
      if (nd < dist[inc.neighbor] && nd <= cutoff) {
        dist[inc.neighbor] = nd;
        heap.emplace(nd, inc.neighbor);
      }
    }
  }
  return dist;
}

/// Number of one-to-one pairs within `hole`, chosen greedily by distance.
std::int64_t greedy_matches(const std::vector<Point>& truth, const std::vector<Point>& prop, double hole) {
  if (truth.empty() || prop.empty()) return 0;
  auto cell = [hole](const Point& p) {
    return std::pair<long long, long long>(static_cast<long long>(std::floor(p.x() / hole)),
                                           static_cast<long long>(std::floor(p.y() / hole)));
  };
  std::map<std::pair<long long, long long>, std::vector<std::size_t>> grid;
  for (std::size_t j = 0; j < prop.size(); ++j) grid[cell(prop[j])].push_back(j);
  std::vector<std::tuple<double, std::size_t, std::size_t>> cand;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const auto [cx, cy] = cell(truth[i]);
    for (long long dx = -1; dx <= 1; ++dx)
      for (long long dy = -1; dy <= 1; ++dy) {
        auto it = grid.find({cx + dx, cy + dy});
        if (it == grid.end()) continue;
        for (auto j : it->second) {
          const double d = (truth[i] - prop[j]).norm();
          if (d <= hole) cand.emplace_back(d, i, j);
        }
      }
  }
  std::sort(cand.begin(), cand.end());
  std::vector<char> used_t(truth.size(), 0), used_p(prop.size(), 0);
  std::int64_t matched = 0;
  for (const auto& [d, i, j] : cand) {
    if (used_t[i] || used_p[j]) continue;
    used_t[i] = used_p[j] = 1;
    ++matched;
  }
  return matched;
}

std::vector<Point> samples_from_hit(const RoadGraph& g, const Adjacency& adj, const EdgeHit& hit, double radius,
                                    double interval) {
  const auto dist = distances_from(g, adj, hit.edge, hit.arc_position, radius);
  std::vector<Point> out;
  for (std::size_t n = 0; n < g.node_count(); ++n)
    if (dist[n] <= radius) out.push_back(g.nodes()[n].pos);
  for (std::size_t ei = 0; ei < g.edge_count(); ++ei) {
    const RoadEdge& e = g.edges()[ei];
    const double du = dist[g.index_of(e.u)], dv = dist[g.index_of(e.v)];
    const bool on_seed_edge = ei == hit.edge;
    if (!on_seed_edge && !(du <= radius) && !(dv <= radius)) continue;
    for (double t = interval; t < e.length_m - 1e-9; t += interval) {
      double d = std::min(du + t, dv + e.length_m - t);
      if (on_seed_edge) d = std::min(d, std::abs(t - hit.arc_position));
      if (d <= radius) out.push_back(point_at(e.geometry, t));
    }
  }
  return out;
}

}  // namespace

std::vector<Point> reachable_samples(const RoadGraph& g, const Point& start, double radius_m, double interval_m) {
  if (g.edge_count() == 0) return {};
  const SegmentIndex index(g, std::max(interval_m, 1.0) * 4.0);
  auto hit = index.nearest(start, std::numeric_limits<double>::infinity());
  if (!hit) return {};
  return samples_from_hit(g, build_adjacency(g), *hit, radius_m, interval_m);
}

std::vector<Point> topo_seeds(const RoadGraph& G, int n_seeds, std::uint64_t seed) {
  std::vector<Point> out;
  std::vector<double> cum;
  double total = 0.0;
  for (const auto& e : G.edges()) cum.push_back(total += e.length_m);
  if (!(total > 0.0)) return out;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(0.0, total);
  for (int i = 0; i < n_seeds; ++i) {
    const double s = uni(rng);
    const std::size_t e = std::min<std::size_t>(std::upper_bound(cum.begin(), cum.end(), s) - cum.begin(),
                                                cum.size() - 1);
    const double before = e == 0 ? 0.0 : cum[e - 1];
    out.push_back(point_at(G.edges()[e].geometry, s - before));
  }
  return out;
}

TopoResult topo_at_seeds(const RoadGraph& G, const RoadGraph& Gp, std::span<const Point> seeds,
                         const TopoConfig& cfg) {
  if (!(cfg.hole_m > 0.0)) throw ConfigError("metrics.topo.hole_m", "must be > 0");
  if (!(cfg.radius_m > cfg.hole_m)) throw ConfigError("metrics.topo.radius_m", "must exceed hole_m");
  TopoResult res;
  if (G.edge_count() == 0) return res;
  const SegmentIndex gi(G, cfg.hole_m * 4.0);
  const SegmentIndex pi(Gp, cfg.hole_m * 4.0);
  const Adjacency ga = build_adjacency(G), pa = build_adjacency(Gp);
  for (const Point& s : seeds) {
    auto ghit = gi.nearest(s, std::numeric_limits<double>::infinity());
    if (!ghit) continue;
    ++res.seeds;
    const auto truth = samples_from_hit(G, ga, *ghit, cfg.radius_m, cfg.hole_m);
    auto phit = pi.nearest(ghit->point, cfg.hole_m);
    if (!phit) {
      res.false_neg += static_cast<std::int64_t>(truth.size());
      continue;
    }
    const auto prop = samples_from_hit(Gp, pa, *phit, cfg.radius_m, cfg.hole_m);
    const std::int64_t tp = greedy_matches(truth, prop, cfg.hole_m);
    res.true_pos += tp;
    res.false_pos += static_cast<std::int64_t>(prop.size()) - tp;
    res.false_neg += static_cast<std::int64_t>(truth.size()) - tp;
  }
  const double tp = static_cast<double>(res.true_pos);
  res.precision = res.true_pos + res.false_pos > 0 ? tp / static_cast<double>(res.true_pos + res.false_pos) : 0.0;
  res.recall = res.true_pos + res.false_neg > 0 ? tp / static_cast<double>(res.true_pos + res.false_neg) : 0.0;
  res.f1 = res.precision + res.recall > 0.0 ? 2.0 * res.precision * res.recall / (res.precision + res.recall) : 0.0;
  return res;
}

TopoResult topo(const RoadGraph& G, const RoadGraph& Gp, const TopoConfig& cfg) {
  cfg.validate();
  const auto seeds = topo_seeds(G, cfg.n_seeds, cfg.seed);
  return topo_at_seeds(G, Gp, seeds, cfg);
}

}  // namespace cresi
