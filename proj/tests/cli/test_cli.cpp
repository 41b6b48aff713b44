#include "doctest.h"

#include "cresi/geojson.hpp"
#include "cresi/speed.hpp"

#include <nlohmann/json.hpp>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Run {
  int code;
  std::string err;
  std::string out;
};

const fs::path& workdir() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / "cresi_cli_test";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Run run_cli(const std::string& args) {
  const fs::path out = workdir() / "stdout.txt", err = workdir() / "stderr.txt";
  const std::string cmd = std::string("cd '") + workdir().string() + "' && '" + CRESI_BIN + "' " + args + " > '" +
                          out.string() + "' 2> '" + err.string() + "'";
  const int status = std::system(cmd.c_str());
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(err), slurp(out)};
}

json read_json(const std::string& name) { return json::parse(slurp(workdir() / name)); }

void write(const std::string& name, const std::string& text) { std::ofstream(workdir() / name) << text; }

/// Triangle with A-B, B-C at 65 mph (100 m each) and A-C at 20 mph (150 m, bent).
void write_triangle() {
  cresi::RoadGraph g;
  g.add_node(0, cresi::Point(0, 0));
  g.add_node(1, cresi::Point(50, 86.60254037844386));
  g.add_node(2, cresi::Point(100, 0));
  g.add_node(3, cresi::Point(500, 500));
  g.add_node(4, cresi::Point(600, 500));
  const double dip = std::sqrt(75.0 * 75.0 - 50.0 * 50.0);
  auto set = [](cresi::RoadEdge e, double mph) {
    e.speed_mph = mph;
    e.travel_time_s = cresi::travel_time(e.length_m, mph);
    return e;
  };
  g.add_edge(set(cresi::make_edge(0, 1, {g.node(0).pos, g.node(1).pos}), 65));
  g.add_edge(set(cresi::make_edge(1, 2, {g.node(1).pos, g.node(2).pos}), 65));
  g.add_edge(set(cresi::make_edge(0, 2, {g.node(0).pos, cresi::Point(50, -dip), g.node(2).pos}), 20));
  g.add_edge(set(cresi::make_edge(3, 4, {g.node(3).pos, g.node(4).pos}), 30));
  cresi::save_geojson(g, (workdir() / "triangle.geojson").string());
}

}  // namespace

TEST_CASE("gen-synthetic, render and extract") {
  REQUIRE(run_cli("gen-synthetic --extent 500 --density 60 --seed 2 --out city.geojson").code == 0);
  const auto mc = run_cli("render --labels city.geojson --format multiclass --out mc");
  REQUIRE(mc.code == 0);
  CHECK(read_json("mc/mask.json")["bands"] == 8);

  REQUIRE(run_cli("extract --labels city.geojson --out chip.geojson --report chip.json").code == 0);
  const auto chip = read_json("chip.json");
  CHECK(chip["subgraph_threshold_m"] == 6.0);
  CHECK(chip["mode"] == "chip");
  CHECK(chip["timings"].size() == 5);

  REQUIRE(run_cli("extract --labels city.geojson --city-scale --out city_mode.geojson --report city.json").code == 0);
  CHECK(read_json("city.json")["subgraph_threshold_m"] == 80.0);

  REQUIRE(run_cli("extract --mask mc/mask --no-speed --out nospeed.geojson --report nospeed.json").code == 0);
  const auto doc = read_json("nospeed.geojson");
  REQUIRE(doc["features"].size() > 0);
  for (const auto& f : doc["features"]) {
    CHECK_FALSE(f["properties"].contains("inferred_speed_mph"));
    CHECK_FALSE(f["properties"].contains("travel_time_s"));
  }

  REQUIRE(run_cli("evaluate --truth city.geojson --proposal chip.geojson --out eval.json").code == 0);
  const auto ev = read_json("eval.json");
  CHECK(ev["apls_length"].get<double>() >= 0.95);
  CHECK(ev.contains("topo"));
  CHECK(ev["config"]["topo"]["hole_m"] == 4.0);
}

TEST_CASE("continuous render without metadata or speed names the edge") {
  write("bare.geojson", R"({"type":"FeatureCollection","features":[
    {"type":"Feature","geometry":{"type":"LineString","coordinates":[[0,0],[50,0]]},"properties":{}}]})");
  const auto r = run_cli("render --labels bare.geojson --format continuous --out cont");
  CHECK(r.code == 3);
  CHECK(r.err.find("edge 0") != std::string::npos);
  CHECK(run_cli("render --labels bare.geojson --format binary --out bin").code == 0);
}

TEST_CASE("evaluate") {
  REQUIRE(run_cli("gen-synthetic --extent 400 --density 60 --seed 5 --out truth.geojson").code == 0);
  REQUIRE(run_cli("evaluate --truth truth.geojson --proposal truth.geojson --topo-hole 15 --out same.json").code == 0);
  const auto same = read_json("same.json");
  CHECK(same["apls_length"] == 1.0);
  CHECK(same["apls_time"] == 1.0);
  CHECK(same["config"]["topo"]["hole_m"] == 15.0);

  write("nospeed_truth.geojson", R"({"type":"FeatureCollection","features":[
    {"type":"Feature","geometry":{"type":"LineString","coordinates":[[0,0],[50,0]]},"properties":{}}]})");
  CHECK(run_cli("evaluate --truth nospeed_truth.geojson --proposal nospeed_truth.geojson --weight time").code == 3);
  CHECK(run_cli("evaluate --truth nospeed_truth.geojson --proposal nospeed_truth.geojson --weight length").code == 0);

  // Disjoint frames: warning and zero.
  write("far.geojson", R"({"type":"FeatureCollection","features":[
    {"type":"Feature","geometry":{"type":"LineString","coordinates":[[90000,0],[90050,0]]},"properties":{}}]})");
  const auto far = run_cli("evaluate --truth nospeed_truth.geojson --proposal far.geojson --weight length --out far.json");
  CHECK(far.code == 0);
  CHECK(far.err.find("warning") != std::string::npos);
  CHECK(read_json("far.json")["apls_length"] == 0.0);
}

TEST_CASE("route") {
  write_triangle();
  REQUIRE(run_cli("route --graph triangle.geojson --from 0 --to 2 --by length --out by_length.geojson").code == 0);
  REQUIRE(run_cli("route --graph triangle.geojson --from 0 --to 2 --by time --out by_time.geojson").code == 0);
  const auto len = read_json("by_length.geojson")["features"][0]["geometry"]["coordinates"];
  const auto time = read_json("by_time.geojson")["features"][0]["geometry"]["coordinates"];
  CHECK(len != time);
  CHECK(len.size() == 3);  // A-C with its bend
  CHECK(time.size() == 3);  // A-B-C

  const auto self = run_cli("route --graph triangle.geojson --from 1 --to 1");
  CHECK(self.code == 0);
  CHECK(self.out.find(" 0 m") != std::string::npos);
  CHECK(run_cli("route --graph triangle.geojson --from 0 --to 99").code == 2);
  CHECK(run_cli("route --graph triangle.geojson --from 0 --to 3").code == 5);
}

TEST_CASE("usage errors exit 2") {
  CHECK(run_cli("render --labels city.geojson").code == 2);
  CHECK(run_cli("no-such-command").code == 2);
  CHECK(run_cli("extract --out x.geojson").code == 2);
}

TEST_CASE("pipeline") {
  write("small.yaml",
        "scene:\n  extent_m: 500\n  density: 60\n  seed: 4\n"
        "segmentation:\n  noise:\n    sigma: 0.1\n    dropout_prob: 0.3\n    seed: 3\n"
        "tiling:\n  window_px: 1000\n  overlap_px: 300\n"
        "output:\n  dir: run\n");
  const auto dry = run_cli("pipeline --config small.yaml --dry-run --out dry");
  CHECK(dry.code == 0);
  CHECK_FALSE(fs::exists(workdir() / "dry"));

  REQUIRE(run_cli("pipeline --config small.yaml --folds 4 --threads 2").code == 0);
  const auto report = read_json("run/report.json");
  CHECK(report["config"]["segmentation"]["folds"] == 4);
  CHECK(report["windows"] == 4);
  CHECK(report["metrics"]["apls_length"].get<double>() >= 0.9);
  CHECK(fs::exists(workdir() / "run/graph.geojson"));
  CHECK(fs::exists(workdir() / "run/truth.geojson"));

  // Deterministic given the same config.
  REQUIRE(run_cli("pipeline --config small.yaml --folds 4 --threads 1 --out run2").code == 0);
  CHECK(slurp(workdir() / "run/graph.geojson") == slurp(workdir() / "run2/graph.geojson"));

  write("bad.yaml", "refine:\n  threshold: 7\n");
  const auto bad = run_cli("pipeline --config bad.yaml");
  CHECK(bad.code == 2);
  CHECK(bad.err.find("refine.threshold") != std::string::npos);
  write("typo.yaml", "tilling:\n  window_px: 10\n");
  const auto typo = run_cli("pipeline --config typo.yaml --dry-run");
  CHECK(typo.code == 2);
  CHECK(typo.err.find("tilling") != std::string::npos);

  CHECK(run_cli("pipeline --config " + std::string(CRESI_SOURCE_DIR) + "/configs/default.yaml --dry-run").code == 0);
}
