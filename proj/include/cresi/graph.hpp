#pragma once

#include "cresi/geometry.hpp"

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace cresi {

using NodeId = std::int64_t;

enum class RoadType { motorway, primary, secondary, tertiary, residential, unclassified, cart_track };

inline constexpr int kRoadTypeCount = 7;

std::string_view to_string(RoadType t);
/// Accepts the canonical names plus "cart track"; nullopt for anything else.
std::optional<RoadType> parse_road_type(std::string_view name);

struct RoadMetadata {
  RoadType road_type = RoadType::residential;
  int lanes = 1;
  bool paved = true;
  bool bridge = false;

  bool operator==(const RoadMetadata&) const = default;
};

struct RoadNode {
  NodeId id = 0;
  Point pos = Point::Zero();
};

struct RoadEdge {
  NodeId u = 0;
  NodeId v = 0;
  Polyline geometry;
  double length_m = 0.0;
  std::optional<double> speed_mph;
  std::optional<double> travel_time_s;
  std::optional<RoadMetadata> metadata;

  bool is_self_loop() const { return u == v; }
  NodeId other(NodeId n) const { return n == u ? v : u; }
};

/// Build an edge whose length is the arc length of `geometry`.
RoadEdge make_edge(NodeId u, NodeId v, Polyline geometry);

/// Undirected road network with embedded edge geometry.
class RoadGraph {
 public:
  /// Adds a node with the next free id.
  NodeId add_node(const Point& pos);
  /// Adds a node with an explicit id; throws DomainError on duplicates.
  void add_node(NodeId id, const Point& pos);
  /// Adds an edge; both endpoints must exist. Returns the edge index.
  std::size_t add_edge(RoadEdge edge);

  const std::vector<RoadNode>& nodes() const { return nodes_; }
  const std::vector<RoadEdge>& edges() const { return edges_; }
  std::vector<RoadEdge>& mutable_edges() { return edges_; }

  bool has_node(NodeId id) const { return index_.count(id) != 0; }
  /// Position of node `id` in nodes(); throws NotFoundError.
  std::size_t index_of(NodeId id) const;
  const RoadNode& node(NodeId id) const { return nodes_[index_of(id)]; }
  NodeId next_id() const { return next_id_; }

  std::size_t node_count() const { return nodes_.size(); }
  std::size_t edge_count() const { return edges_.size(); }
  bool empty() const { return nodes_.empty(); }

  std::optional<GeoTransform> transform;

 private:
  std::vector<RoadNode> nodes_;
  std::vector<RoadEdge> edges_;
  std::unordered_map<NodeId, std::size_t> index_;
  NodeId next_id_ = 0;
};

/// Incidence lists keyed by node index.
struct Incidence {
  std::size_t edge = 0;
  std::size_t neighbor = 0;  ///< node index of the other endpoint
};
using Adjacency = std::vector<std::vector<Incidence>>;

Adjacency build_adjacency(const RoadGraph& g);

/// Degree of every node (self loops count twice), keyed by node index.
std::vector<int> degrees(const RoadGraph& g);

/// Component label per node index; returns the number of components.
int connected_components(const RoadGraph& g, std::vector<int>& label);

struct GraphStats {
  std::size_t nodes = 0;
  std::size_t edges = 0;
  double total_length_km = 0.0;
  int components = 0;
};

GraphStats graph_stats(const RoadGraph& g);

double total_length_m(const RoadGraph& g);

/// Checks every RoadEdge / RoadGraph invariant; throws DomainError with the first violation.
void validate(const RoadGraph& g);

/// Copy of `g` keeping only edges with keep_edge[i] and nodes touched by a kept edge
/// (plus nodes with keep_isolated[i] when provided).
RoadGraph filter_edges(const RoadGraph& g, const std::vector<char>& keep_edge,
                       bool keep_isolated_nodes = false);

/// Axis-aligned bounds of all node positions and edge geometry.
struct Bounds {
  Point min = Point::Constant(std::numeric_limits<double>::infinity());
  Point max = Point::Constant(-std::numeric_limits<double>::infinity());
  bool valid() const { return min.x() <= max.x() && min.y() <= max.y(); }
  void extend(const Point& p) {
    min = min.cwiseMin(p);
    max = max.cwiseMax(p);
  }
  bool intersects(const Bounds& o, double pad = 0.0) const {
    return valid() && o.valid() && min.x() - pad <= o.max.x() && o.min.x() - pad <= max.x() &&
           min.y() - pad <= o.max.y() && o.min.y() - pad <= max.y();
  }
};

Bounds bounds(const RoadGraph& g);

}  // namespace cresi
