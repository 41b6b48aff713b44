#include "doctest.h"
#include "fixtures.hpp"

#include "cresi/errors.hpp"
#include "cresi/geojson.hpp"
#include "cresi/synth.hpp"

#include <cstdio>
#include <filesystem>

using namespace cresi;

TEST_CASE("geo transform round trips pixel centers") {
  GeoTransform t{500.0, 1200.0, 0.3, 100, 80, ""};
  for (int r : {0, 7, 79})
    for (int c : {0, 13, 99}) {
      const Point p = t.pixel_center(r, c);
      const auto px = t.pixel_of(p);
      CHECK(px.x() == c);
      CHECK(px.y() == r);
    }
  const auto w = t.window(10, 20, 30, 40);
  CHECK(w.pixel_center(0, 0).isApprox(t.pixel_center(20, 10)));
}

TEST_CASE("graph construction rejects bad input") {
  RoadGraph g;
  g.add_node(1, Point(0, 0));
  CHECK_THROWS_AS(g.add_node(1, Point(1, 1)), DomainError);
  CHECK_THROWS_AS(g.add_edge(make_edge(1, 2, {Point(0, 0), Point(1, 0)})), DomainError);
  CHECK_THROWS_AS(g.index_of(42), NotFoundError);
  g.add_node(2, Point(10, 0));
  auto e = make_edge(1, 2, {Point(0, 0), Point(10, 0)});
  CHECK(e.length_m == doctest::Approx(10.0));
  e.length_m = 11.0;
  g.add_edge(e);
  CHECK_THROWS_AS(validate(g), DomainError);
}

TEST_CASE("validate checks speed and travel time consistency") {
  auto g = fixtures::path_graph(2, 100.0);
  validate(g);
  g.mutable_edges()[0].speed_mph = 30.0;
  g.mutable_edges()[0].travel_time_s = 1.0;
  CHECK_THROWS_AS(validate(g), DomainError);
  g.mutable_edges()[0].travel_time_s = travel_time(100.0, 30.0);
  validate(g);
  g.mutable_edges()[0].speed_mph = 70.0;
  CHECK_THROWS_AS(validate(g), DomainError);
}

TEST_CASE("graph stats") {
  RoadGraph empty;
  auto s = graph_stats(empty);
  CHECK(s.nodes == 0);
  CHECK(s.edges == 0);
  CHECK(s.total_length_km == 0.0);
  CHECK(s.components == 0);

  auto g = fixtures::path_graph(3, 500.0);
  s = graph_stats(g);
  CHECK(s.total_length_km == doctest::Approx(1.0));
  CHECK(s.components == 1);
  g.add_node(9, Point(5000, 5000));
  CHECK(graph_stats(g).components == 2);
}

TEST_CASE("geojson: single three-point linestring") {
  const char* text = R"({"type":"FeatureCollection","features":[
    {"type":"Feature","geometry":{"type":"LineString","coordinates":[[0,0],[3,4],[3,10]]},"properties":{}}]})";
  const auto load = parse_geojson(text);
  CHECK(load.graph.node_count() == 2);
  CHECK(load.graph.edge_count() == 1);
  CHECK(load.graph.edges()[0].length_m == doctest::Approx(11.0));
  CHECK(load.graph.edges()[0].geometry.size() == 3);
}

TEST_CASE("geojson: shared endpoint becomes one node") {
  const char* text = R"({"type":"FeatureCollection","features":[
    {"type":"Feature","geometry":{"type":"LineString","coordinates":[[0,0],[10,0]]},"properties":{}},
    {"type":"Feature","geometry":{"type":"LineString","coordinates":[[10,0],[10,10]]},"properties":{}}]})";
  const auto g = parse_geojson(text).graph;
  CHECK(g.node_count() == 3);
  CHECK(g.edge_count() == 2);
  const auto deg = degrees(g);
  CHECK(std::count(deg.begin(), deg.end(), 2) == 1);
}

TEST_CASE("geojson: metadata, skipped and unknown features") {
  const char* text = R"({"type":"FeatureCollection","features":[
    {"type":"Feature","geometry":{"type":"LineString","coordinates":[[0,0],[100,0]]},
     "properties":{"road_type":"motorway","lanes":3,"paved":true}},
    {"type":"Feature","geometry":{"type":"Point","coordinates":[5,5]},"properties":{}},
    {"type":"Feature","geometry":{"type":"LineString","coordinates":[[100,0],[200,0]]},
     "properties":{"road_type":"hovercraft_lane"}}]})";
  const auto load = parse_geojson(text);
  CHECK(load.skipped_features == 1);
  CHECK(load.unknown_road_types == 1);
  REQUIRE(load.graph.edges()[0].metadata);
  CHECK(assign_speed(*load.graph.edges()[0].metadata) == 65.0);
  CHECK_FALSE(load.graph.edges()[1].metadata);
}

TEST_CASE("geojson: malformed input reports a position") {
  try {
    parse_geojson("{\"type\": \"FeatureCollection\",\n  \"features\": [ oops ]}");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
    CHECK(e.column() > 0);
  }
  CHECK_THROWS_AS(parse_geojson(R"({"type":"Feature"})"), ParseError);
}

TEST_CASE("geojson: empty graph and speed round trip") {
  const auto empty = parse_geojson(to_geojson(RoadGraph{})).graph;
  CHECK(empty.node_count() == 0);
  CHECK(empty.edge_count() == 0);

  auto g = fixtures::path_graph(2, 100.0);
  fixtures::set_speed(g.mutable_edges()[0], 35.0);
  const auto back = parse_geojson(to_geojson(g)).graph;
  REQUIRE(back.edges()[0].speed_mph);
  CHECK(*back.edges()[0].speed_mph == 35.0);
}

TEST_CASE("geojson: save then load is an isomorphism on a large graph") {
  const auto city = gen_synthetic_city(1500.0, 60.0, 11);
  REQUIRE(city.edge_count() >= 100);
  const auto path = (std::filesystem::temp_directory_path() / "cresi_rt.geojson").string();
  save_geojson(city, path);
  const auto back = load_geojson(path).graph;
  std::remove(path.c_str());
  REQUIRE(back.node_count() == city.node_count());
  REQUIRE(back.edge_count() == city.edge_count());
  for (std::size_t i = 0; i < city.edge_count(); ++i) {
    const auto& a = city.edges()[i];
    const auto& b = back.edges()[i];
    CHECK(a.u == b.u);
    CHECK(a.v == b.v);
    CHECK(std::abs(a.length_m - b.length_m) <= 1e-9);
    CHECK(a.metadata == b.metadata);
  }
  for (const auto& n : city.nodes()) CHECK((back.node(n.id).pos - n.pos).norm() <= 1e-9);
}

TEST_CASE("geojson: lon/lat input is projected to meters") {
  const char* text = R"({"type":"FeatureCollection","crs":{"type":"name","properties":{"name":"EPSG:4326"}},
    "features":[{"type":"Feature","geometry":{"type":"LineString","coordinates":[[32.5,15.5],[32.51,15.5]]},
    "properties":{}}]})";
  const auto load = parse_geojson(text);
  CHECK(load.geographic);
  // 0.01 degree of longitude at 15.5 N is about 1072 m.
  CHECK(load.graph.edges()[0].length_m == doctest::Approx(1072.0).epsilon(0.01));
}

TEST_CASE("synthetic graphs satisfy every edge invariant") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto g = with_assigned_speeds(gen_synthetic_city(1000.0, 40.0, seed));
    CHECK_NOTHROW(validate(g));
  }
}
