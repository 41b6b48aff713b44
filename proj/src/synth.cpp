#include "cresi/synth.hpp"

#include "cresi/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <tuple>

namespace cresi {

namespace {

struct Weighted {
  RoadType type;
  double weight;
};

// Mostly residential streets with a thin tail of every other class. Classes whose
// table speed is not a speed-bin center (tertiary, unclassified, cart track) stay rare.
constexpr Weighted kTypeMix[] = {
    {RoadType::residential, 0.60}, {RoadType::secondary, 0.14},    {RoadType::primary, 0.12},
    {RoadType::motorway, 0.06},    {RoadType::tertiary, 0.03},     {RoadType::unclassified, 0.025},
    {RoadType::cart_track, 0.025},
};

RoadMetadata draw_metadata(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  double u = uni(rng), acc = 0.0;
  RoadType type = RoadType::residential;
  for (const auto& w : kTypeMix) {
    acc += w.weight;
    if (u < acc) {
      type = w.type;
      break;
    }
  }
  RoadMetadata m;
  m.road_type = type;
  const double l = uni(rng);
  switch (type) {
    case RoadType::motorway: m.lanes = l < 0.2 ? 2 : (l < 0.8 ? 3 : 4); break;
    case RoadType::primary: m.lanes = l < 0.5 ? 2 : 3; break;
    case RoadType::secondary: m.lanes = l < 0.5 ? 1 : (l < 0.9 ? 2 : 3); break;
    case RoadType::cart_track: m.lanes = 1; break;
    default: m.lanes = l < 0.6 ? 1 : (l < 0.97 ? 2 : 3); break;
  }
  const double p = uni(rng);
  if (type == RoadType::cart_track) m.paved = p < 0.3;
  else if (type == RoadType::residential || type == RoadType::unclassified) m.paved = p >= 0.03;
  m.bridge = uni(rng) < 0.02;
  return m;
}

RoadEdge finish_edge(RoadEdge e, const RoadMetadata& m, const SpeedTable& table) {
  e.metadata = m;
  e.speed_mph = assign_speed(m, table);
  e.travel_time_s = travel_time(e.length_m, *e.speed_mph);
  return e;
}

struct DisjointSet {
  std::vector<int> parent;
  explicit DisjointSet(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  bool unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent[b] = a;
    return true;
  }
};

/// A road keeps its class through a bend: chains joined at degree-2 nodes take the
/// metadata of their lowest-index edge.
void unify_bends(RoadGraph& g, const SpeedTable& table) {
  const Adjacency adj = build_adjacency(g);
  auto& edges = g.mutable_edges();
  std::vector<char> done(edges.size(), 0);
  for (std::size_t e0 = 0; e0 < edges.size(); ++e0) {
    if (done[e0]) continue;
    std::vector<std::size_t> chain{e0};
    done[e0] = 1;
    for (std::size_t k = 0; k < chain.size(); ++k) {
      const RoadEdge& e = edges[chain[k]];
      for (NodeId end : {e.u, e.v}) {
        const auto& inc = adj[g.index_of(end)];
        if (inc.size() != 2) continue;
        for (const auto& i : inc)
          if (!done[i.edge]) {
            done[i.edge] = 1;
            chain.push_back(i.edge);
          }
      }
    }
    const RoadMetadata m = *edges[e0].metadata;
    for (auto i : chain)
      if (*edges[i].metadata != m) edges[i] = finish_edge(edges[i], m, table);
  }
}

}  // namespace

GeoTransform scene_transform(double extent_m, double pixel_size) {
  if (!(extent_m > 0.0) || !(pixel_size > 0.0)) throw DomainError("extent and pixel size must be > 0");
  GeoTransform t;
  t.origin_x = 0.0;
  t.origin_y = extent_m;
  t.pixel_size = pixel_size;
  t.width = t.height = static_cast<int>(std::ceil(extent_m / pixel_size - 1e-9));
  return t;
}

RoadGraph gen_synthetic_city(double extent_m, double density, std::uint64_t seed) {
  SynthConfig cfg;
  cfg.extent_m = extent_m;
  cfg.density = density;
  cfg.seed = seed;
  return gen_synthetic_city(cfg);
}

RoadGraph gen_synthetic_city(const SynthConfig& cfg, const SpeedTable& table) {
  if (!(cfg.extent_m > 0.0)) throw DomainError("extent must be > 0");
  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  RoadGraph g;

  const double margin = std::min(cfg.margin_m, cfg.extent_m / 4.0);
  const double span = cfg.extent_m - 2.0 * margin;
  const double spacing = cfg.density > 0.0 ? 1000.0 / std::sqrt(cfg.density) : std::numeric_limits<double>::infinity();
  const int n = std::isfinite(spacing) ? static_cast<int>(std::floor(span / spacing)) + 1 : 1;
  if (n < 2) {
    const double y = cfg.extent_m / 2.0;
    const NodeId a = g.add_node(Point(margin, y));
    const NodeId b = g.add_node(Point(cfg.extent_m - margin, y));
    g.add_edge(finish_edge(make_edge(a, b, {g.node(a).pos, g.node(b).pos}), draw_metadata(rng), table));
    return g;
  }

  // Center the grid and keep jittered nodes inside the margin.
  const double step = span / (n - 1) < spacing ? span / (n - 1) : spacing;
  const double start = margin + (span - step * (n - 1)) / 2.0;
  const double jit = cfg.jitter * step;
  auto id = [n](int r, int c) { return static_cast<NodeId>(r * n + c); };
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) {
      const double jx = (c == 0 || c == n - 1) ? 0.0 : uni(rng) * jit;
      const double jy = (r == 0 || r == n - 1) ? 0.0 : uni(rng) * jit;
      g.add_node(id(r, c), Point(start + c * step + jx, start + r * step + jy));
    }

  std::vector<RoadMetadata> row_meta(n), col_meta(n);
  for (auto& m : row_meta) m = draw_metadata(rng);
  for (auto& m : col_meta) m = draw_metadata(rng);

  struct Candidate {
    int a, b;
    bool horizontal;
    int line;
  };
  std::vector<Candidate> cand;
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) {
      if (c + 1 < n) cand.push_back({r * n + c, r * n + c + 1, true, r});
      if (r + 1 < n) cand.push_back({r * n + c, (r + 1) * n + c, false, c});
    }
  std::shuffle(cand.begin(), cand.end(), rng);
  DisjointSet ds(n * n);
  std::vector<char> keep(cand.size(), 0);
  for (std::size_t i = 0; i < cand.size(); ++i) keep[i] = ds.unite(cand[i].a, cand[i].b);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (std::size_t i = 0; i < cand.size(); ++i)
    if (!keep[i]) keep[i] = unit(rng) < cfg.extra_edge_prob;

  // Emit edges in grid order so ids do not depend on the shuffle.
  std::vector<std::size_t> order(cand.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    return std::tie(cand[x].a, cand[x].b) < std::tie(cand[y].a, cand[y].b);
  });
  for (std::size_t i : order) {
    if (!keep[i]) continue;
    const auto& c = cand[i];
    const Point pa = g.node(c.a).pos, pb = g.node(c.b).pos;
    const Eigen::Vector2d d = pb - pa;
    const Eigen::Vector2d normal(-d.y() / d.norm(), d.x() / d.norm());
    const double t = 0.5 + 0.15 * uni(rng);
    const Point mid = pa + t * d + normal * (uni(rng) * cfg.bend * step);
    const RoadMetadata& m = c.horizontal ? row_meta[c.line] : col_meta[c.line];
    g.add_edge(finish_edge(make_edge(c.a, c.b, {pa, mid, pb}), m, table));
  }
  unify_bends(g, table);
  return g;
}

}  // namespace cresi
