// cresi: road graph extraction, evaluation and routing from segmentation masks.

#include "cresi/config.hpp"
#include "cresi/errors.hpp"
#include "cresi/geojson.hpp"
#include "cresi/mask_gen.hpp"
#include "cresi/metrics.hpp"
#include "cresi/pipeline.hpp"
#include "cresi/routing.hpp"
#include "cresi/speed.hpp"
#include "cresi/synth.hpp"
#include "cresi/tiler.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

namespace fs = std::filesystem;
using nlohmann::json;
using namespace cresi;

namespace {

enum ExitCode { kOk = 0, kUsage = 2, kPrecondition = 3, kStage = 4, kNoResult = 5 };

class NoResult : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text << "\n";
    return;
  }
  const fs::path p(path);
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  out << text << "\n";
}

RoadGraph load_graph(const std::string& path) {
  GeoJsonLoad in = load_geojson(path);
  if (in.skipped_features > 0)
    std::cerr << "warning: " << path << ": skipped " << in.skipped_features << " non-LineString features\n";
  if (in.unknown_road_types > 0)
    std::cerr << "warning: " << path << ": " << in.unknown_road_types << " edges with unknown road type\n";
  return std::move(in.graph);
}

/// Raster frame for a graph: its stored transform, else its bounds padded by `pad_m`.
GeoTransform frame_for(const RoadGraph& g, double gsd, double pad_m) {
  if (g.transform && std::abs(g.transform->pixel_size - gsd) < 1e-12) return *g.transform;
  const Bounds b = bounds(g);
  if (!b.valid()) throw PreconditionError("graph has no geometry to frame");
  GeoTransform t;
  t.pixel_size = gsd;
  t.origin_x = std::floor((b.min.x() - pad_m) / gsd) * gsd;
  t.origin_y = std::ceil((b.max.y() + pad_m) / gsd) * gsd;
  t.width = static_cast<int>(std::ceil((b.max.x() + pad_m - t.origin_x) / gsd));
  t.height = static_cast<int>(std::ceil((t.origin_y - (b.min.y() - pad_m)) / gsd));
  t.validate();
  return t;
}

json timings_json(const std::vector<StageTiming>& timings) {
  json j = json::array();
  for (const auto& t : timings) j.push_back({{"stage", t.stage}, {"seconds", t.seconds}});
  return j;
}

json stats_json(const RoadGraph& g) {
  const GraphStats s = graph_stats(g);
  return {{"nodes", s.nodes}, {"edges", s.edges}, {"total_length_km", s.total_length_km}, {"components", s.components}};
}

bool has_times(const RoadGraph& g) {
  for (const auto& e : g.edges())
    if (!e.travel_time_s) return false;
  return true;
}

double bbox_area_km2(const Bounds& b) {
  return b.valid() ? (b.max.x() - b.min.x()) * (b.max.y() - b.min.y()) / 1e6 : 0.0;
}

struct EvalOptions {
  AplsConfig apls;
  TopoConfig topo;
  bool require_time = false;
};

/// Metrics for one truth/proposal pair.
json evaluate_pair(const RoadGraph& truth, const RoadGraph& prop, const EvalOptions& opt) {
  json j;
  Bounds bt = bounds(truth), bp = bounds(prop);
  Bounds all = bt;
  if (bp.valid()) {
    all.extend(bp.min);
    all.extend(bp.max);
  }
  j["area_km2"] = bbox_area_km2(all);
  j["truth_length_km"] = total_length_m(truth) / 1000.0;
  j["proposal_length_km"] = total_length_m(prop) / 1000.0;
  const bool disjoint = bt.valid() && bp.valid() && !bt.intersects(bp, opt.apls.buffer_m);
  if (disjoint) {
    std::cerr << "warning: truth and proposal bounding boxes are disjoint; scoring 0\n";
    j["frame_mismatch"] = true;
    j["apls_length"] = 0.0;
    j["apls_time"] = 0.0;
    j["topo"] = {{"precision", 0.0}, {"recall", 0.0}, {"f1", 0.0}};
    return j;
  }
  AplsConfig lc = opt.apls;
  lc.weight = RouteWeight::length;
  const AplsResult al = apls(truth, prop, lc);
  j["apls_length"] = al.defined ? json(al.score) : json(nullptr);
  if (opt.require_time || (has_times(truth) && has_times(prop))) {
    AplsConfig tc = opt.apls;
    tc.weight = RouteWeight::time;
    const AplsResult at = apls(truth, prop, tc);
    j["apls_time"] = at.defined ? json(at.score) : json(nullptr);
  } else {
    j["apls_time"] = nullptr;
  }
  const TopoResult t = topo(truth, prop, opt.topo);
  j["topo"] = {{"precision", t.precision}, {"recall", t.recall}, {"f1", t.f1}, {"true_pos", t.true_pos},
               {"false_pos", t.false_pos}, {"false_neg", t.false_neg}, {"seeds", t.seeds}};
  return j;
}

void add_apls_options(CLI::App* cmd, EvalOptions& opt) {
  cmd->add_option("--buffer", opt.apls.buffer_m, "APLS snap buffer, meters")->capture_default_str();
  cmd->add_flag("--large-mode", opt.apls.large_mode, "no midpoints, random control-node subsample");
  cmd->add_option("--max-control-nodes", opt.apls.max_control_nodes)->capture_default_str();
  cmd->add_option("--midpoint-spacing", opt.apls.midpoint_spacing_m, "meters")->capture_default_str();
  cmd->add_option("--apls-seed", opt.apls.seed)->capture_default_str();
  cmd->add_option("--symmetrize", opt.apls.symmetrize, "mean or harmonic")
      ->transform(CLI::CheckedTransformer(
          std::map<std::string, Symmetrize>{{"mean", Symmetrize::mean}, {"harmonic", Symmetrize::harmonic}}));
  cmd->add_option("--topo-hole", opt.topo.hole_m, "TOPO hole size, meters")->capture_default_str();
  cmd->add_option("--topo-radius", opt.topo.radius_m, "meters")->capture_default_str();
  cmd->add_option("--topo-seeds", opt.topo.n_seeds)->capture_default_str();
  cmd->add_option("--topo-seed", opt.topo.seed)->capture_default_str();
}

// --- subcommands --------------------------------------------------------------

struct RenderArgs {
  std::string labels, format = "multiclass", out, dtype = "float32";
  double gsd = 0.3, halfwidth = kDefaultHalfwidthM;
};

int cmd_render(const RenderArgs& a) {
  const RoadGraph g = with_assigned_speeds(load_graph(a.labels));
  const GeoTransform t = frame_for(g, a.gsd, a.halfwidth + a.gsd);
  RasterMask mask;
  if (a.format == "binary") mask = render_binary_mask(g, t, a.halfwidth);
  else if (a.format == "continuous") mask = render_continuous_mask(g, t, a.halfwidth);
  else mask = render_multiclass_mask(g, t, a.halfwidth);
  fs::create_directories(a.out);
  const std::string stem = (fs::path(a.out) / "mask").string();
  write_raster(mask, stem, a.dtype == "uint8" ? SampleType::uint8 : SampleType::float32);
  std::cout << "wrote " << stem << ".bin (" << mask.band_count() << " bands, " << t.width << "x" << t.height << ")\n";
  return kOk;
}

struct ExtractArgs {
  std::string mask, labels, config, out = "graph.geojson", report;
  bool city_scale = false, no_speed = false;
  double gsd = 0.3, sigma = 0.0, dropout_prob = 0.0, dropout_len = 10.0;
  std::uint64_t seed = 0;
};

int cmd_extract(const ExtractArgs& a) {
  PipelineConfig cfg = a.config.empty() ? PipelineConfig{} : load_config(a.config);
  ExtractConfig ex = cfg.extract;
  if (a.city_scale) ex.city_scale = true;
  if (a.no_speed) ex.infer_speed = false;
  RasterMask mask;
  if (!a.mask.empty()) {
    mask = read_raster(a.mask);
  } else {
    const RoadGraph g = with_assigned_speeds(load_graph(a.labels));
    OracleNoise noise{a.sigma, a.dropout_prob, a.dropout_len, a.seed};
    noise.validate();
    mask = oracle_predict(g, frame_for(g, a.gsd, cfg.segmentation.halfwidth_m + a.gsd), noise,
                          cfg.segmentation.halfwidth_m);
  }
  const ExtractResult res = extract_graph(mask, ex);
  save_geojson(res.graph, a.out);
  json report = {{"graph", a.out},
                 {"mode", ex.city_scale ? "city" : "chip"},
                 {"subgraph_threshold_m", ex.subgraph_threshold()},
                 {"stats", stats_json(res.graph)},
                 {"timings", timings_json(res.timings)},
                 {"config", to_json(ex)}};
  write_text(a.report, report.dump(2));
  return kOk;
}

struct EvaluateArgs {
  std::vector<std::string> truth, proposal;
  std::string weight = "both", out;
  EvalOptions opt;
};

int cmd_evaluate(EvaluateArgs a) {
  if (a.truth.size() != a.proposal.size()) throw ConfigError("--truth/--proposal", "must be given in pairs");
  a.opt.require_time = a.weight == "time";
  a.opt.apls.validate();
  a.opt.topo.validate();
  json regions = json::array();
  double sum_len = 0.0, sum_time = 0.0, weight_len = 0.0, weight_time = 0.0;
  for (std::size_t i = 0; i < a.truth.size(); ++i) {
    const RoadGraph truth = load_graph(a.truth[i]);
    const RoadGraph prop = load_graph(a.proposal[i]);
    if (a.opt.require_time) {
      if (!has_times(truth)) throw PreconditionError(a.truth[i] + ": edges lack travel_time_s");
      if (!has_times(prop)) throw PreconditionError(a.proposal[i] + ": edges lack travel_time_s");
    }
    json r = evaluate_pair(truth, prop, a.opt);
    r["truth"] = a.truth[i];
    r["proposal"] = a.proposal[i];
    const double w = r["truth_length_km"].get<double>();
    if (r["apls_length"].is_number()) {
      sum_len += w * r["apls_length"].get<double>();
      weight_len += w;
    }
    if (r["apls_time"].is_number()) {
      sum_time += w * r["apls_time"].get<double>();
      weight_time += w;
    }
    regions.push_back(std::move(r));
  }
  json report;
  if (regions.size() == 1) {
    report = regions[0];
  } else {
    report["apls_length"] = weight_len > 0 ? json(sum_len / weight_len) : json(nullptr);
    report["apls_time"] = weight_time > 0 ? json(sum_time / weight_time) : json(nullptr);
    std::int64_t tp = 0, fp = 0, fn = 0;
    for (const auto& r : regions) {
      tp += r["topo"].value("true_pos", std::int64_t{0});
      fp += r["topo"].value("false_pos", std::int64_t{0});
      fn += r["topo"].value("false_neg", std::int64_t{0});
    }
    const double p = tp + fp > 0 ? double(tp) / double(tp + fp) : 0.0;
    const double rc = tp + fn > 0 ? double(tp) / double(tp + fn) : 0.0;
    report["topo"] = {{"precision", p}, {"recall", rc}, {"f1", p + rc > 0 ? 2 * p * rc / (p + rc) : 0.0}};
  }
  if (a.weight == "length") report.erase("apls_time");
  if (a.weight == "time") report.erase("apls_length");
  report["regions"] = regions;
  report["config"] = {{"apls", to_json(a.opt.apls)}, {"topo", to_json(a.opt.topo)}, {"weight", a.weight}};
  write_text(a.out, report.dump(2));
  return kOk;
}

struct RouteArgs {
  std::string graph, by = "length", out;
  NodeId from = 0, to = 0;
};

int cmd_route(const RouteArgs& a) {
  const RoadGraph g = load_graph(a.graph);
  if (!g.has_node(a.from)) throw NotFoundError("unknown node id " + std::to_string(a.from));
  if (!g.has_node(a.to)) throw NotFoundError("unknown node id " + std::to_string(a.to));
  const RouteWeight w = a.by == "time" ? RouteWeight::time : RouteWeight::length;
  const Route r = shortest_route(g, a.from, a.to, w);
  if (r.impassable_edges > 0)
    std::cerr << "warning: " << r.impassable_edges << " edges without travel time were ignored\n";
  if (!r.found) throw NoResult("no path from " + std::to_string(a.from) + " to " + std::to_string(a.to));
  json props = {{"from", a.from}, {"to", a.to}, {"by", a.by}, {"nodes", r.nodes}, {"length_m", r.total_length_m}};
  props["time_s"] = std::isfinite(r.total_time_s) ? json(r.total_time_s) : json(nullptr);
  std::cout << "route " << a.from << " -> " << a.to << " by " << a.by << ": " << r.nodes.size() << " nodes, "
            << r.total_length_m << " m";
  if (std::isfinite(r.total_time_s)) std::cout << ", " << r.total_time_s << " s";
  std::cout << "\n";
  if (!a.out.empty()) write_text(a.out, linestring_feature_collection(r.geometry(g), props.dump()));
  return kOk;
}

struct PipelineArgs {
  std::string config, out;
  int folds = 0, threads = 0;
  bool dry_run = false;
};

int cmd_pipeline(const PipelineArgs& a) {
  PipelineConfig cfg = load_config(a.config);
  if (a.folds > 0) cfg.segmentation.folds = a.folds;
  if (a.threads > 0) cfg.threads = a.threads;
  if (!a.out.empty()) cfg.output.dir = a.out;
  cfg.tiling.threads = cfg.threads;
  cfg.validate();
  if (a.dry_run) {
    std::cout << "config ok\n" << to_json(cfg).dump(2) << "\n";
    return kOk;
  }
  const fs::path dir(cfg.output.dir);
  fs::create_directories(dir);

  RoadGraph truth;
  std::optional<RoadGraph> reference;
  GeoTransform extent = scene_transform(cfg.scene.extent_m, cfg.scene.pixel_size);
  if (!cfg.scene.truth.empty()) {
    truth = with_assigned_speeds(load_graph(cfg.scene.truth));
    extent = frame_for(truth, cfg.scene.pixel_size, cfg.segmentation.halfwidth_m + cfg.scene.pixel_size);
    reference = truth;
  } else if (cfg.segmentation.backend == Backend::oracle) {
    SynthConfig sc;
    sc.extent_m = cfg.scene.extent_m;
    sc.density = cfg.scene.density;
    sc.seed = cfg.scene.seed;
    truth = gen_synthetic_city(sc);
    save_geojson(truth, (dir / "truth.geojson").string());
    reference = truth;
  }

  std::unique_ptr<SegmentationSource> source;
  if (cfg.segmentation.backend == Backend::oracle)
    source = std::make_unique<OracleSource>(truth, fold_noise(cfg.segmentation), cfg.segmentation.halfwidth_m);
  else
    source = std::make_unique<DirectorySource>(cfg.segmentation.mask_dir);

  CityScaleResult res = run_city_scale(*source, extent, cfg.tiling, cfg.extract, cfg.output.write_mask);
  save_geojson(res.graph, (dir / "graph.geojson").string());
  if (res.mask) write_raster(*res.mask, (dir / "mask").string());

  json report = {{"graph", (dir / "graph.geojson").string()},
                 {"windows", res.windows},
                 {"uncovered_pixels", res.uncovered_pixels},
                 {"subgraph_threshold_m", cfg.extract.city_subgraph_m},
                 {"stats", stats_json(res.graph)},
                 {"timings", timings_json(res.timings)},
                 {"config", to_json(cfg)}};
  if (reference) {
    EvalOptions opt{cfg.apls, cfg.topo, false};
    report["metrics"] = evaluate_pair(*reference, res.graph, opt);
  }
  write_text((dir / "report.json").string(), report.dump(2));
  std::cout << "wrote " << (dir / "graph.geojson").string() << " (" << res.graph.node_count() << " nodes, "
            << res.graph.edge_count() << " edges)\n";
  if (report.contains("metrics"))
    std::cout << "apls_length " << report["metrics"]["apls_length"] << " apls_time " << report["metrics"]["apls_time"]
              << "\n";
  return kOk;
}

struct SynthArgs {
  SynthConfig cfg;
  std::string out = "city.geojson";
};

int cmd_gen_synthetic(const SynthArgs& a) {
  const RoadGraph g = gen_synthetic_city(a.cfg);
  save_geojson(g, a.out);
  const GraphStats s = graph_stats(g);
  std::cout << "wrote " << a.out << " (" << s.nodes << " nodes, " << s.edges << " edges, " << s.total_length_km
            << " km)\n";
  return kOk;
}

int report_error(const char* kind, const std::exception& e, int code) {
  std::cerr << "error (" << kind << "): " << e.what() << "\n";
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Road network extraction from segmentation masks"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "cresi 1.0");

  RenderArgs render;
  auto* c_render = app.add_subcommand("render", "rasterize labels into a mask");
  c_render->add_option("--labels", render.labels, "road GeoJSON")->required()->check(CLI::ExistingFile);
  c_render->add_option("--format", render.format)
      ->check(CLI::IsMember({"binary", "continuous", "multiclass"}))
      ->capture_default_str();
  c_render->add_option("--gsd", render.gsd, "meters per pixel")->capture_default_str();
  c_render->add_option("--halfwidth", render.halfwidth, "road halfwidth, meters")->capture_default_str();
  c_render->add_option("--dtype", render.dtype)->check(CLI::IsMember({"float32", "uint8"}))->capture_default_str();
  c_render->add_option("--out", render.out, "output directory")->required();

  ExtractArgs extract;
  auto* c_extract = app.add_subcommand("extract", "mask -> road graph");
  auto* src_mask = c_extract->add_option("--mask", extract.mask, "raster stem (without .bin/.json)");
  auto* src_labels = c_extract->add_option("--labels", extract.labels, "render an oracle mask from these labels");
  src_mask->excludes(src_labels);
  c_extract->add_option("--config", extract.config, "YAML config")->check(CLI::ExistingFile);
  c_extract->add_flag("--city-scale", extract.city_scale, "use the city-scale subgraph threshold");
  c_extract->add_flag("--no-speed", extract.no_speed, "skip speed inference");
  c_extract->add_option("--gsd", extract.gsd)->capture_default_str();
  c_extract->add_option("--sigma", extract.sigma, "oracle Gaussian noise")->capture_default_str();
  c_extract->add_option("--dropout-prob", extract.dropout_prob)->capture_default_str();
  c_extract->add_option("--dropout-len", extract.dropout_len, "meters")->capture_default_str();
  c_extract->add_option("--seed", extract.seed)->capture_default_str();
  c_extract->add_option("--out", extract.out, "graph GeoJSON")->capture_default_str();
  c_extract->add_option("--report", extract.report, "run report JSON (stdout if omitted)");

  EvaluateArgs evaluate;
  auto* c_eval = app.add_subcommand("evaluate", "APLS and TOPO against ground truth");
  c_eval->add_option("--truth", evaluate.truth, "ground-truth GeoJSON (repeatable)")->required();
  c_eval->add_option("--proposal", evaluate.proposal, "proposal GeoJSON (repeatable)")->required();
  c_eval->add_option("--weight", evaluate.weight)->check(CLI::IsMember({"length", "time", "both"}))->capture_default_str();
  c_eval->add_option("--out", evaluate.out, "report JSON (stdout if omitted)");
  add_apls_options(c_eval, evaluate.opt);

  RouteArgs route;
  auto* c_route = app.add_subcommand("route", "shortest route between two nodes");
  c_route->add_option("--graph", route.graph)->required()->check(CLI::ExistingFile);
  c_route->add_option("--from", route.from)->required();
  c_route->add_option("--to", route.to)->required();
  c_route->add_option("--by", route.by)->check(CLI::IsMember({"length", "time"}))->capture_default_str();
  c_route->add_option("--out", route.out, "route GeoJSON");

  PipelineArgs pipeline;
  auto* c_pipe = app.add_subcommand("pipeline", "full tiled run over a configured scene");
  c_pipe->add_option("--config", pipeline.config)->required()->check(CLI::ExistingFile);
  c_pipe->add_option("--folds", pipeline.folds, "oracle folds to merge");
  c_pipe->add_option("--threads", pipeline.threads, "worker threads (default: CRESI_THREADS or 1)");
  c_pipe->add_option("--out", pipeline.out, "output directory");
  c_pipe->add_flag("--dry-run", pipeline.dry_run, "validate the config only");

  SynthArgs synth;
  auto* c_synth = app.add_subcommand("gen-synthetic", "random planar road network");
  c_synth->add_option("--extent", synth.cfg.extent_m, "meters")->capture_default_str();
  c_synth->add_option("--density", synth.cfg.density, "intersections per km^2")->capture_default_str();
  c_synth->add_option("--seed", synth.cfg.seed)->capture_default_str();
  c_synth->add_option("--out", synth.out)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*c_render) return cmd_render(render);
    if (*c_extract) {
      if (extract.mask.empty() && extract.labels.empty()) {
        std::cerr << "error (usage): extract needs --mask or --labels\n";
        return kUsage;
      }
      return cmd_extract(extract);
    }
    if (*c_eval) return cmd_evaluate(evaluate);
    if (*c_route) return cmd_route(route);
    if (*c_pipe) return cmd_pipeline(pipeline);
    if (*c_synth) return cmd_gen_synthetic(synth);
  } catch (const ConfigError& e) {
    return report_error("config", e, kUsage);
  } catch (const ParseError& e) {
    std::cerr << "error (parse): " << e.what();
    if (e.line() > 0) std::cerr << " at line " << e.line() << ", column " << e.column();
    std::cerr << "\n";
    return kUsage;
  } catch (const NotFoundError& e) {
    return report_error("usage", e, kUsage);
  } catch (const StageError& e) {
    std::cerr << "error (stage " << e.stage() << "): " << e.what() << "\n";
    return kStage;
  } catch (const NoResult& e) {
    return report_error("no result", e, kNoResult);
  } catch (const std::exception& e) {
    return report_error("precondition", e, kPrecondition);
  }
  return kUsage;
}
