#include "cresi/spatial.hpp"

#include <algorithm>
#include <cmath>

namespace cresi {

SegmentIndex::SegmentIndex(const RoadGraph& g, double cell_m) : g_(g), cell_(std::max(cell_m, 1e-6)) {
  prefix_.resize(g.edge_count());
  for (std::size_t e = 0; e < g.edge_count(); ++e) {
    const Polyline& line = g.edges()[e].geometry;
    auto& pre = prefix_[e];
    pre.assign(line.size(), 0.0);
    for (std::size_t i = 1; i < line.size(); ++i) pre[i] = pre[i - 1] + (line[i] - line[i - 1]).norm();
    const std::size_t segs = line.size() > 1 ? line.size() - 1 : line.size();
    for (std::size_t s = 0; s < segs; ++s) {
      const Point& a = line[s];
      const Point& b = line[std::min(s + 1, line.size() - 1)];
      for (long long cx = cell_of(std::min(a.x(), b.x())); cx <= cell_of(std::max(a.x(), b.x())); ++cx)
        for (long long cy = cell_of(std::min(a.y(), b.y())); cy <= cell_of(std::max(a.y(), b.y())); ++cy)
          cells_[key(cx, cy)].push_back({e, s});
    }
  }
}

std::optional<EdgeHit> SegmentIndex::nearest(const Point& p, double max_distance) const {
  std::optional<EdgeHit> best;
  auto scan = [&](const std::vector<Entry>& entries) {
    for (const Entry& en : entries) {
      const Polyline& line = g_.edges()[en.edge].geometry;
      const Point& a = line[en.segment];
      const Point& b = line[std::min(en.segment + 1, line.size() - 1)];
      double t = 0.0;
      const Point q = closest_on_segment(p, a, b, &t);
      const double d = (q - p).norm();
      if (d > max_distance) continue;
      if (best && (d > best->distance || (d == best->distance && en.edge >= best->edge))) continue;
      best = EdgeHit{en.edge, q, d, prefix_[en.edge][en.segment] + t * (b - a).norm()};
    }
  };
  const double span = std::min(max_distance, 1e12);
  const long long x0 = cell_of(p.x() - span), x1 = cell_of(p.x() + span);
  const long long y0 = cell_of(p.y() - span), y1 = cell_of(p.y() + span);
  if (static_cast<double>(x1 - x0 + 1) * static_cast<double>(y1 - y0 + 1) > static_cast<double>(cells_.size())) {
    for (const auto& [k, entries] : cells_) scan(entries);
    return best;
  }
  for (long long cx = x0; cx <= x1; ++cx)
    for (long long cy = y0; cy <= y1; ++cy) {
      auto it = cells_.find(key(cx, cy));
      if (it != cells_.end()) scan(it->second);
    }
  return best;
}

}  // namespace cresi
