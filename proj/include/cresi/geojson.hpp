#pragma once

#include "cresi/graph.hpp"

#include <string>

namespace cresi {

struct GeoJsonLoad {
  RoadGraph graph;
  int skipped_features = 0;    ///< non-LineString geometries
  int unknown_road_types = 0;  ///< metadata dropped for these edges
  bool geographic = false;     ///< input was lon/lat and has been projected
};

/// Parses a FeatureCollection of LineStrings. Planar coordinates are taken as meters;
/// lon/lat input (crs name mentioning 4326 or CRS84) is projected with a local
/// equirectangular projection about the coordinate centroid.
GeoJsonLoad load_geojson(const std::string& path);
GeoJsonLoad parse_geojson(const std::string& text);

void save_geojson(const RoadGraph& graph, const std::string& path);
std::string to_geojson(const RoadGraph& graph);

/// Single-feature collection holding one LineString (route output).
std::string linestring_feature_collection(const Polyline& line, const std::string& properties_json);

}  // namespace cresi
