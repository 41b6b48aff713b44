#include "cresi/geojson.hpp"

#include "cresi/errors.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>

namespace cresi {

using nlohmann::json;

namespace {

constexpr double kNodeMergeTol = 1e-6;
constexpr double kEarthRadius = 6378137.0;

void line_col(const std::string& text, std::size_t byte, int& line, int& col) {
  line = 1;
  col = 1;
  for (std::size_t i = 0; i < std::min(byte, text.size()); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
}

bool is_geographic(const json& doc) {
  if (!doc.contains("crs")) return false;
  const auto& crs = doc["crs"];
  std::string name;
  if (crs.is_object() && crs.contains("properties") && crs["properties"].contains("name") &&
      crs["properties"]["name"].is_string())
    name = crs["properties"]["name"].get<std::string>();
  return name.find("4326") != std::string::npos || name.find("CRS84") != std::string::npos;
}

std::optional<long long> as_int(const json& v) {
  if (v.is_number_integer()) return v.get<long long>();
  if (v.is_number_float()) return static_cast<long long>(std::llround(v.get<double>()));
  if (v.is_string()) {
    try {
      return std::stoll(v.get<std::string>());
    } catch (...) {
      return std::nullopt;
    }
  }
  return std::nullopt;
}

std::optional<double> as_double(const json& v) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) {
    try {
      return std::stod(v.get<std::string>());
    } catch (...) {
      return std::nullopt;
    }
  }
  return std::nullopt;
}

/// Returns nullopt metadata when absent; sets `unknown` when a road_type is present but unrecognised.
std::optional<RoadMetadata> parse_metadata(const json& props, bool& unknown) {
  unknown = false;
  if (!props.is_object() || !props.contains("road_type") || props["road_type"].is_null()) return std::nullopt;
  const auto& rt = props["road_type"];
  std::optional<RoadType> type;
  if (rt.is_string()) {
    type = parse_road_type(rt.get<std::string>());
    if (!type) {
      if (auto code = as_int(rt); code && *code >= 1 && *code <= kRoadTypeCount)
        type = static_cast<RoadType>(*code - 1);
    }
  } else if (auto code = as_int(rt); code && *code >= 1 && *code <= kRoadTypeCount) {
    type = static_cast<RoadType>(*code - 1);
  }
  if (!type) {
    unknown = true;
    return std::nullopt;
  }
  RoadMetadata m;
  m.road_type = *type;
  for (const char* key : {"lanes", "lane_number"}) {
    if (props.contains(key)) {
      if (auto n = as_int(props[key]); n && *n >= 1) m.lanes = static_cast<int>(*n);
      break;
    }
  }
  if (props.contains("paved")) {
    const auto& p = props["paved"];
    if (p.is_boolean()) m.paved = p.get<bool>();
    else if (auto code = as_int(p)) m.paved = (*code != 2);  // 1 paved, 2 unpaved, 3 unknown
  }
  if (props.contains("bridge") && props["bridge"].is_boolean()) {
    m.bridge = props["bridge"].get<bool>();
  } else if (props.contains("bridge_type")) {
    if (auto code = as_int(props["bridge_type"])) m.bridge = (*code == 1);
  }
  return m;
}

struct NodeIndex {
  std::map<std::pair<long long, long long>, std::vector<NodeId>> cells;
  static constexpr double kCell = 1e-3;

  std::pair<long long, long long> key(const Point& p) const {
    return {static_cast<long long>(std::floor(p.x() / kCell)), static_cast<long long>(std::floor(p.y() / kCell))};
  }
  NodeId find_or_add(RoadGraph& g, const Point& p) {
    const auto k = key(p);
    for (long long dx = -1; dx <= 1; ++dx)
      for (long long dy = -1; dy <= 1; ++dy) {
        auto it = cells.find({k.first + dx, k.second + dy});
        if (it == cells.end()) continue;
        for (NodeId id : it->second)
          if ((g.node(id).pos - p).norm() <= kNodeMergeTol) return id;
      }
    const NodeId id = g.add_node(p);
    cells[k].push_back(id);
    return id;
  }
};

}  // namespace

GeoJsonLoad parse_geojson(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    int line = 0, col = 0;
    line_col(text, e.byte > 0 ? e.byte - 1 : 0, line, col);
    throw ParseError("malformed JSON at line " + std::to_string(line) + ", column " + std::to_string(col) +
                         ": " + e.what(),
                     line, col);
  }
  if (!doc.is_object() || doc.value("type", "") != "FeatureCollection" || !doc.contains("features") ||
      !doc["features"].is_array())
    throw ParseError("expected a GeoJSON FeatureCollection", 0, 0);

  GeoJsonLoad out;
  out.geographic = is_geographic(doc);

  struct RawLine {
    Polyline pts;
    json props;
  };
  std::vector<RawLine> lines;
  for (const auto& f : doc["features"]) {
    const json* geom = f.contains("geometry") ? &f["geometry"] : nullptr;
    if (!geom || !geom->is_object() || geom->value("type", "") != "LineString" || !geom->contains("coordinates")) {
      ++out.skipped_features;
      continue;
    }
    RawLine rl;
    bool ok = true;
    for (const auto& c : (*geom)["coordinates"]) {
      if (!c.is_array() || c.size() < 2 || !c[0].is_number() || !c[1].is_number()) {
        ok = false;
        break;
      }
      rl.pts.emplace_back(c[0].get<double>(), c[1].get<double>());
    }
    if (!ok || rl.pts.size() < 2) {
      ++out.skipped_features;
      continue;
    }
    rl.props = f.contains("properties") && f["properties"].is_object() ? f["properties"] : json::object();
    lines.push_back(std::move(rl));
  }

  if (out.geographic && !lines.empty()) {
    Point centroid = Point::Zero();
    std::size_t n = 0;
    for (const auto& rl : lines)
      for (const auto& p : rl.pts) {
        centroid += p;
        ++n;
      }
    centroid /= static_cast<double>(n);
    const double deg = std::numbers::pi / 180.0;
    const double kx = kEarthRadius * std::cos(centroid.y() * deg) * deg;
    const double ky = kEarthRadius * deg;
    for (auto& rl : lines)
      for (auto& p : rl.pts) p = Point((p.x() - centroid.x()) * kx, (p.y() - centroid.y()) * ky);
  }

  // Stored node ids are honoured only when every feature carries them consistently.
  bool use_ids = !lines.empty();
  std::map<NodeId, Point> stored;
  for (const auto& rl : lines) {
    auto u = rl.props.contains("u") ? as_int(rl.props["u"]) : std::nullopt;
    auto v = rl.props.contains("v") ? as_int(rl.props["v"]) : std::nullopt;
    if (!u || !v) {
      use_ids = false;
      break;
    }
    for (auto [id, p] : {std::pair{*u, rl.pts.front()}, std::pair{*v, rl.pts.back()}}) {
      auto [it, inserted] = stored.emplace(id, p);
      if (!inserted && (it->second - p).norm() > kNodeMergeTol) use_ids = false;
    }
    if (!use_ids) break;
  }

  RoadGraph& g = out.graph;
  NodeIndex index;
  if (use_ids)
    for (const auto& [id, p] : stored) g.add_node(id, p);

  for (auto& rl : lines) {
    NodeId u, v;
    if (use_ids) {
      u = *as_int(rl.props["u"]);
      v = *as_int(rl.props["v"]);
      rl.pts.front() = g.node(u).pos;
      rl.pts.back() = g.node(v).pos;
    } else {
      u = index.find_or_add(g, rl.pts.front());
      v = index.find_or_add(g, rl.pts.back());
      rl.pts.front() = g.node(u).pos;
      rl.pts.back() = g.node(v).pos;
    }
    RoadEdge e = make_edge(u, v, std::move(rl.pts));
    bool unknown = false;
    e.metadata = parse_metadata(rl.props, unknown);
    if (unknown) ++out.unknown_road_types;
    if (rl.props.contains("inferred_speed_mph"))
      if (auto s = as_double(rl.props["inferred_speed_mph"]); s && *s > 0) e.speed_mph = *s;
    if (rl.props.contains("travel_time_s"))
      if (auto t = as_double(rl.props["travel_time_s"]); t && *t >= 0) e.travel_time_s = *t;
    g.add_edge(std::move(e));
  }

  if (doc.contains("transform") && doc["transform"].is_object()) {
    const auto& t = doc["transform"];
    GeoTransform tr;
    tr.origin_x = t.value("origin_x", 0.0);
    tr.origin_y = t.value("origin_y", 0.0);
    tr.pixel_size = t.value("pixel_size", 1.0);
    tr.width = t.value("width", 1);
    tr.height = t.value("height", 1);
    tr.crs_tag = t.value("crs", std::string{});
    g.transform = tr;
  }
  return out;
}

GeoJsonLoad load_geojson(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_geojson(ss.str());
}

std::string to_geojson(const RoadGraph& graph) {
  json doc;
  doc["type"] = "FeatureCollection";
  const std::string crs = graph.transform && !graph.transform->crs_tag.empty() ? graph.transform->crs_tag
                                                                             : std::string("LOCAL_METRIC");
  doc["crs"] = {{"type", "name"}, {"properties", {{"name", crs}}}};
  if (graph.transform) {
    const auto& t = *graph.transform;
    doc["transform"] = {{"origin_x", t.origin_x}, {"origin_y", t.origin_y}, {"pixel_size", t.pixel_size},
                        {"width", t.width},       {"height", t.height},     {"crs", t.crs_tag}};
  }
  json features = json::array();
  for (const auto& e : graph.edges()) {
    json coords = json::array();
    for (const auto& p : e.geometry) coords.push_back({p.x(), p.y()});
    json props = {{"u", e.u}, {"v", e.v}, {"length_m", e.length_m}};
    if (e.metadata) {
      props["road_type"] = std::string(to_string(e.metadata->road_type));
      props["lanes"] = e.metadata->lanes;
      props["paved"] = e.metadata->paved;
      props["bridge"] = e.metadata->bridge;
    }
    if (e.speed_mph) props["inferred_speed_mph"] = *e.speed_mph;
    if (e.travel_time_s) props["travel_time_s"] = *e.travel_time_s;
    features.push_back({{"type", "Feature"},
                        {"geometry", {{"type", "LineString"}, {"coordinates", std::move(coords)}}},
                        {"properties", std::move(props)}});
  }
  doc["features"] = std::move(features);
  return doc.dump(1);
}

void save_geojson(const RoadGraph& graph, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out << to_geojson(graph) << '\n';
  if (!out) throw IoError("write failed for " + path);
}

std::string linestring_feature_collection(const Polyline& line, const std::string& properties_json) {
  json coords = json::array();
  for (const auto& p : line) coords.push_back({p.x(), p.y()});
  json doc = {{"type", "FeatureCollection"},
              {"features",
               json::array({{{"type", "Feature"},
                             {"geometry", {{"type", "LineString"}, {"coordinates", std::move(coords)}}},
                             {"properties", json::parse(properties_json)}}})}};
  return doc.dump(1);
}

}  // namespace cresi
