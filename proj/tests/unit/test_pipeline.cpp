#include "doctest.h"
#include "fixtures.hpp"

#include "cresi/mask_gen.hpp"
#include "cresi/metrics.hpp"
#include "cresi/pipeline.hpp"
#include "cresi/synth.hpp"

using namespace cresi;

TEST_CASE("extract reports every stage and uses the chip or city threshold") {
  const auto city = with_assigned_speeds(gen_synthetic_city(600.0, 50.0, 4));
  const auto t = scene_transform(600.0, 0.3);
  const auto mask = oracle_predict(city, t, OracleNoise{});
  ExtractConfig cfg;
  CHECK(cfg.subgraph_threshold() == 6.0);
  const auto r = extract_graph(mask, cfg);
  std::vector<std::string> stages;
  for (const auto& s : r.timings) stages.push_back(s.stage);
  CHECK(stages == std::vector<std::string>{"refine", "skeleton", "graph", "clean", "speed"});
  REQUIRE(r.graph.transform);
  CHECK(r.graph.transform->pixel_size == 0.3);
  for (const auto& e : r.graph.edges()) CHECK(e.travel_time_s);
  CHECK(apls(city, r.graph).score >= 0.95);

  cfg.city_scale = true;
  CHECK(cfg.subgraph_threshold() == 80.0);
  cfg.infer_speed = false;
  const auto bare = extract_graph(mask, cfg);
  for (const auto& e : bare.graph.edges()) CHECK_FALSE(e.speed_mph);
}

TEST_CASE("stage failures carry the stage name") {
  RasterMask broken(MaskKind::multiclass, kMulticlassBands, scene_transform(30.0, 0.3));
  broken.bands.pop_back();
  try {
    extract_graph(broken, ExtractConfig{});
    FAIL("expected StageError");
  } catch (const StageError& e) {
    CHECK(e.stage() == "refine");
  }
  ExtractConfig bad;
  bad.speed.fallback_mph = 0.0;
  const auto city = with_assigned_speeds(gen_synthetic_city(200.0, 80.0, 1));
  try {
    extract_graph(render_multiclass_mask(city, scene_transform(200.0, 0.3)), bad);
    FAIL("expected StageError");
  } catch (const StageError& e) {
    CHECK(e.stage() == "speed");
  }
}

TEST_CASE("an empty mask extracts an empty graph") {
  const auto r = extract_graph(render_multiclass_mask(RoadGraph{}, scene_transform(100.0, 0.3)), ExtractConfig{});
  CHECK(r.graph.node_count() == 0);
}
