#pragma once

#include "cresi/graph.hpp"

#include <optional>
#include <unordered_map>
#include <vector>

namespace cresi {

/// Nearest point on a graph's edge geometry.
struct EdgeHit {
  std::size_t edge = 0;
  Point point = Point::Zero();
  double distance = 0.0;
  double arc_position = 0.0;  ///< meters from the edge's u end
};

/// Uniform-grid index over the segments of every edge of a graph.
class SegmentIndex {
 public:
  SegmentIndex(const RoadGraph& g, double cell_m);

  /// Closest edge point within max_distance (inclusive); ties go to the lower edge index.
  std::optional<EdgeHit> nearest(const Point& p, double max_distance) const;

 private:
  struct Entry {
    std::size_t edge;
    std::size_t segment;
  };
  long long key(long long cx, long long cy) const { return cx * 73856093LL ^ cy * 19349663LL; }
  long long cell_of(double v) const { return static_cast<long long>(std::floor(v / cell_)); }

  const RoadGraph& g_;
  double cell_;
  std::vector<std::vector<double>> prefix_;  ///< per edge cumulative segment lengths
  std::unordered_map<long long, std::vector<Entry>> cells_;
};

}  // namespace cresi
