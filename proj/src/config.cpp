#include "cresi/config.hpp"

#include "cresi/errors.hpp"

#include <yaml-cpp/yaml.h>

#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

namespace cresi {

namespace {

/// A YAML mapping being read; remembers which keys were consumed.
class Section {
 public:
  Section(YAML::Node node, std::string path) : node_(std::move(node)), path_(std::move(path)) {
    if (node_ && !node_.IsNull() && !node_.IsMap()) throw ConfigError(path_.empty() ? "<root>" : path_, "expected a mapping");
  }

  template <typename T>
  void get(const std::string& key, T& out) {
    const YAML::Node v = lookup(key);
    if (!v) return;
    try {
      out = v.as<T>();
    } catch (const YAML::Exception&) {
      throw ConfigError(field(key), "wrong value type");
    }
  }

  template <typename Parse>
  void get_enum(const std::string& key, Parse&& parse) {
    std::string s;
    get(key, s);
    if (!s.empty()) parse(s, field(key));
  }

  Section sub(const std::string& key) { return Section(lookup(key), field(key)); }

  void finish() const {
    if (!node_ || !node_.IsMap()) return;
    for (const auto& kv : node_) {
      const auto k = kv.first.as<std::string>();
      if (!seen_.count(k)) throw ConfigError(field(k), "unknown key");
    }
  }

  std::string field(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

 private:
  YAML::Node lookup(const std::string& key) {
    seen_.insert(key);
    if (!node_ || !node_.IsMap()) return YAML::Node(YAML::NodeType::Undefined);
    return node_[key];
  }

  YAML::Node node_;
  std::string path_;
  std::set<std::string> seen_;
};

std::string to_string(Backend b) { return b == Backend::oracle ? "oracle" : "directory"; }
std::string to_string(RouteWeight w) { return w == RouteWeight::length ? "length" : "time"; }
std::string to_string(Symmetrize s) { return s == Symmetrize::mean ? "mean" : "harmonic"; }

void require(bool ok, const std::string& field, const std::string& what) {
  if (!ok) throw ConfigError(field, what);
}

}  // namespace

void PipelineConfig::validate() const {
  require(scene.extent_m > 0.0, "scene.extent_m", "must be > 0");
  require(scene.pixel_size > 0.0, "scene.pixel_size", "must be > 0");
  require(scene.density >= 0.0, "scene.density", "must be >= 0");
  require(segmentation.halfwidth_m > 0.0, "segmentation.halfwidth_m", "must be > 0");
  require(segmentation.folds >= 1, "segmentation.folds", "must be >= 1");
  require(segmentation.backend != Backend::directory || !segmentation.mask_dir.empty(), "segmentation.mask_dir",
          "required for the directory backend");
  require(segmentation.noise.gaussian_sigma >= 0.0 && segmentation.noise.gaussian_sigma <= 1.0, "segmentation.noise.sigma",
          "must lie in [0, 1]");
  require(segmentation.noise.dropout_prob >= 0.0 && segmentation.noise.dropout_prob <= 1.0,
          "segmentation.noise.dropout_prob", "must lie in [0, 1]");
  require(segmentation.noise.dropout_len_m > 0.0, "segmentation.noise.dropout_len_m", "must be > 0");
  require(tiling.window_px >= 1, "tiling.window_px", "must be >= 1");
  require(tiling.overlap_px >= 0 && tiling.overlap_px < tiling.window_px, "tiling.overlap_px",
          "must lie in [0, window_px)");
  const auto& r = extract.refine;
  require(r.smooth_kernel_m > 0.0, "refine.smooth_kernel_m", "must be > 0");
  require(r.threshold > 0.0 && r.threshold < 1.0, "refine.threshold", "must lie in (0, 1)");
  require(r.morph_kernel_m >= 0.0, "refine.morph_kernel_m", "must be >= 0");
  require(r.min_area_m2 >= 0.0, "refine.min_area_m2", "must be >= 0");
  require(r.continuous_gain > 0.0, "refine.continuous_gain", "must be > 0");
  const auto& c = extract.clean;
  require(extract.chip_subgraph_m >= 0.0, "clean.chip_subgraph_m", "must be >= 0");
  require(extract.city_subgraph_m >= 0.0, "clean.city_subgraph_m", "must be >= 0");
  require(c.max_spur_m >= 0.0, "clean.max_spur_m", "must be >= 0");
  require(c.max_terminal_gap_m >= 0.0, "clean.max_terminal_gap_m", "must be >= 0");
  require(c.junction_merge_m >= 0.0, "clean.junction_merge_m", "must be >= 0");
  require(c.directional_gap_m >= 0.0, "clean.directional_gap_m", "must be >= 0");
  require(c.directional_angle_deg >= 0.0 && c.directional_angle_deg <= 90.0, "clean.directional_angle_deg",
          "must lie in [0, 90]");
  require(c.heading_window_m > 0.0, "clean.heading_window_m", "must be > 0");
  const auto& s = extract.speed;
  require(s.patch_size >= 1, "speed.patch_size", "must be >= 1");
  require(s.background_filter >= 0.0 && s.background_filter <= 1.0, "speed.background_filter", "must lie in [0, 1]");
  require(s.fallback_mph > 0.0, "speed.fallback_mph", "must be > 0");
  apls.validate();
  require(topo.hole_m > 0.0, "metrics.topo.hole_m", "must be > 0");
  require(topo.radius_m > topo.hole_m, "metrics.topo.radius_m", "must exceed hole_m");
  require(topo.n_seeds >= 1, "metrics.topo.n_seeds", "must be >= 1");
  require(threads >= 1, "threads", "must be >= 1");
}

PipelineConfig parse_config(const std::string& yaml_text) {
  YAML::Node root;
  try {
    root = YAML::Load(yaml_text);
  } catch (const YAML::ParserException& e) {
    throw ParseError(e.msg, e.mark.line + 1, e.mark.column + 1);
  }
  PipelineConfig cfg;
  cfg.threads = default_threads();
  Section top(root, "");

  Section scene = top.sub("scene");
  scene.get("extent_m", cfg.scene.extent_m);
  scene.get("pixel_size", cfg.scene.pixel_size);
  scene.get("density", cfg.scene.density);
  scene.get("seed", cfg.scene.seed);
  scene.get("truth", cfg.scene.truth);
  scene.finish();

  Section seg = top.sub("segmentation");
  seg.get_enum("backend", [&](const std::string& v, const std::string& f) {
    if (v == "oracle") cfg.segmentation.backend = Backend::oracle;
    else if (v == "directory") cfg.segmentation.backend = Backend::directory;
    else throw ConfigError(f, "expected oracle or directory");
  });
  seg.get("mask_dir", cfg.segmentation.mask_dir);
  seg.get("halfwidth_m", cfg.segmentation.halfwidth_m);
  seg.get("folds", cfg.segmentation.folds);
  Section noise = seg.sub("noise");
  noise.get("sigma", cfg.segmentation.noise.gaussian_sigma);
  noise.get("dropout_prob", cfg.segmentation.noise.dropout_prob);
  noise.get("dropout_len_m", cfg.segmentation.noise.dropout_len_m);
  noise.get("seed", cfg.segmentation.noise.seed);
  noise.finish();
  seg.finish();

  Section tiling = top.sub("tiling");
  tiling.get("window_px", cfg.tiling.window_px);
  tiling.get("overlap_px", cfg.tiling.overlap_px);
  tiling.finish();

  auto& r = cfg.extract.refine;
  Section refine = top.sub("refine");
  refine.get("smooth_kernel_m", r.smooth_kernel_m);
  refine.get("threshold", r.threshold);
  refine.get("morph_kernel_m", r.morph_kernel_m);
  refine.get("min_area_m2", r.min_area_m2);
  refine.get("continuous_gain", r.continuous_gain);
  refine.finish();

  auto& c = cfg.extract.clean;
  Section clean = top.sub("clean");
  clean.get("chip_subgraph_m", cfg.extract.chip_subgraph_m);
  clean.get("city_subgraph_m", cfg.extract.city_subgraph_m);
  clean.get("city_scale", cfg.extract.city_scale);
  clean.get("max_spur_m", c.max_spur_m);
  clean.get("max_terminal_gap_m", c.max_terminal_gap_m);
  clean.get("exclude_component", c.exclude_component);
  clean.get("junction_merge_m", c.junction_merge_m);
  clean.get("directional_gap_m", c.directional_gap_m);
  clean.get("directional_angle_deg", c.directional_angle_deg);
  clean.get("heading_window_m", c.heading_window_m);
  clean.get("simplify_tolerance_px", c.simplify_tolerance_px);
  clean.finish();

  auto& s = cfg.extract.speed;
  Section speed = top.sub("speed");
  speed.get("enabled", cfg.extract.infer_speed);
  speed.get("patch_size", s.patch_size);
  speed.get("background_filter", s.background_filter);
  speed.get("fallback_mph", s.fallback_mph);
  speed.finish();

  Section metrics = top.sub("metrics");
  Section apls = metrics.sub("apls");
  apls.get("buffer_m", cfg.apls.buffer_m);
  apls.get_enum("weight", [&](const std::string& v, const std::string& f) {
    if (v == "length") cfg.apls.weight = RouteWeight::length;
    else if (v == "time") cfg.apls.weight = RouteWeight::time;
    else throw ConfigError(f, "expected length or time");
  });
  apls.get("large_mode", cfg.apls.large_mode);
  apls.get("max_control_nodes", cfg.apls.max_control_nodes);
  apls.get("midpoint_spacing_m", cfg.apls.midpoint_spacing_m);
  apls.get("seed", cfg.apls.seed);
  apls.get_enum("symmetrize", [&](const std::string& v, const std::string& f) {
    if (v == "mean") cfg.apls.symmetrize = Symmetrize::mean;
    else if (v == "harmonic") cfg.apls.symmetrize = Symmetrize::harmonic;
    else throw ConfigError(f, "expected mean or harmonic");
  });
  apls.finish();
  Section topo = metrics.sub("topo");
  topo.get("hole_m", cfg.topo.hole_m);
  topo.get("radius_m", cfg.topo.radius_m);
  topo.get("n_seeds", cfg.topo.n_seeds);
  topo.get("seed", cfg.topo.seed);
  topo.finish();
  metrics.finish();

  Section out = top.sub("output");
  out.get("dir", cfg.output.dir);
  out.get("write_mask", cfg.output.write_mask);
  out.finish();

  top.get("threads", cfg.threads);
  top.finish();
  cfg.validate();
  return cfg;
}

PipelineConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

nlohmann::json to_json(const ExtractConfig& cfg) {
  const auto& r = cfg.refine;
  const auto& c = cfg.clean;
  const auto& s = cfg.speed;
  return {
      {"refine",
       {{"smooth_kernel_m", r.smooth_kernel_m},
        {"threshold", r.threshold},
        {"morph_kernel_m", r.morph_kernel_m},
        {"min_area_m2", r.min_area_m2},
        {"continuous_gain", r.continuous_gain}}},
      {"clean",
       {{"chip_subgraph_m", cfg.chip_subgraph_m},
        {"city_subgraph_m", cfg.city_subgraph_m},
        {"city_scale", cfg.city_scale},
        {"subgraph_threshold_m", cfg.subgraph_threshold()},
        {"max_spur_m", c.max_spur_m},
        {"max_terminal_gap_m", c.max_terminal_gap_m},
        {"exclude_component", c.exclude_component},
        {"junction_merge_m", c.junction_merge_m},
        {"directional_gap_m", c.directional_gap_m},
        {"directional_angle_deg", c.directional_angle_deg},
        {"heading_window_m", c.heading_window_m},
        {"simplify_tolerance_px", c.simplify_tolerance_px}}},
      {"speed",
       {{"enabled", cfg.infer_speed},
        {"patch_size", s.patch_size},
        {"background_filter", s.background_filter},
        {"fallback_mph", s.fallback_mph}}},
  };
}

nlohmann::json to_json(const AplsConfig& cfg) {
  return {{"buffer_m", cfg.buffer_m},
          {"weight", to_string(cfg.weight)},
          {"large_mode", cfg.large_mode},
          {"max_control_nodes", cfg.max_control_nodes},
          {"midpoint_spacing_m", cfg.midpoint_spacing_m},
          {"seed", cfg.seed},
          {"symmetrize", to_string(cfg.symmetrize)}};
}

nlohmann::json to_json(const TopoConfig& cfg) {
  return {{"hole_m", cfg.hole_m}, {"radius_m", cfg.radius_m}, {"n_seeds", cfg.n_seeds}, {"seed", cfg.seed}};
}

nlohmann::json to_json(const PipelineConfig& cfg) {
  nlohmann::json j = to_json(cfg.extract);
  j["scene"] = {{"extent_m", cfg.scene.extent_m},
                {"pixel_size", cfg.scene.pixel_size},
                {"density", cfg.scene.density},
                {"seed", cfg.scene.seed},
                {"truth", cfg.scene.truth}};
  const auto& n = cfg.segmentation.noise;
  j["segmentation"] = {{"backend", to_string(cfg.segmentation.backend)},
                       {"mask_dir", cfg.segmentation.mask_dir},
                       {"halfwidth_m", cfg.segmentation.halfwidth_m},
                       {"folds", cfg.segmentation.folds},
                       {"noise",
                        {{"sigma", n.gaussian_sigma},
                         {"dropout_prob", n.dropout_prob},
                         {"dropout_len_m", n.dropout_len_m},
                         {"seed", n.seed}}}};
  j["tiling"] = {{"window_px", cfg.tiling.window_px}, {"overlap_px", cfg.tiling.overlap_px}};
  j["metrics"] = {{"apls", to_json(cfg.apls)}, {"topo", to_json(cfg.topo)}};
  j["output"] = {{"dir", cfg.output.dir}, {"write_mask", cfg.output.write_mask}};
  j["threads"] = cfg.threads;
  return j;
}

std::vector<OracleNoise> fold_noise(const SegmentationConfig& cfg) {
  std::vector<OracleNoise> out;
  for (int k = 0; k < cfg.folds; ++k) {
    OracleNoise n = cfg.noise;
    n.seed = cfg.noise.seed + static_cast<std::uint64_t>(k);
    out.push_back(n);
  }
  return out;
}

int default_threads() {
  if (const char* env = std::getenv("CRESI_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v >= 1 && v <= 1024) return static_cast<int>(v);
  }
  return 1;
}

}  // namespace cresi
