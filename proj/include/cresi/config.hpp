#pragma once

#include "cresi/mask_gen.hpp"
#include "cresi/metrics.hpp"
#include "cresi/pipeline.hpp"
#include "cresi/tiler.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace cresi {

struct SceneConfig {
  double extent_m = 2000.0;
  double pixel_size = 0.3;
  double density = 50.0;
  std::uint64_t seed = 0;
  std::string truth;  ///< GeoJSON with the scene's roads; empty -> generated city
};

enum class Backend { oracle, directory };

struct SegmentationConfig {
  Backend backend = Backend::oracle;
  std::string mask_dir;  ///< directory backend only
  double halfwidth_m = kDefaultHalfwidthM;
  int folds = 1;
  OracleNoise noise;  ///< fold k uses seed + k
};

struct OutputConfig {
  std::string dir = "out";
  bool write_mask = false;
};

/// Everything the pipeline command needs, loaded from one YAML document.
struct PipelineConfig {
  SceneConfig scene;
  SegmentationConfig segmentation;
  TilingConfig tiling;
  ExtractConfig extract;
  AplsConfig apls;
  TopoConfig topo;
  OutputConfig output;
  int threads = 1;

  /// Throws ConfigError naming the dotted path of the first bad field.
  void validate() const;
};

/// Reads a YAML config over the defaults. Unknown keys and bad values raise ConfigError.
PipelineConfig load_config(const std::string& path);
PipelineConfig parse_config(const std::string& yaml_text);

nlohmann::json to_json(const PipelineConfig& cfg);
nlohmann::json to_json(const ExtractConfig& cfg);
nlohmann::json to_json(const AplsConfig& cfg);
nlohmann::json to_json(const TopoConfig& cfg);

/// One OracleNoise per fold, seeds offset by the fold index.
std::vector<OracleNoise> fold_noise(const SegmentationConfig& cfg);

/// Thread count from CRESI_THREADS, else 1.
int default_threads();

}  // namespace cresi
