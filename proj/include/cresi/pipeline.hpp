#pragma once

#include "cresi/errors.hpp"
#include "cresi/graph.hpp"
#include "cresi/graph_clean.hpp"
#include "cresi/raster.hpp"
#include "cresi/refine.hpp"
#include "cresi/speed_infer.hpp"

#include <chrono>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

namespace cresi {

struct ExtractConfig {
  RefineConfig refine;
  CleanConfig clean;
  SpeedInferConfig speed;
  double chip_subgraph_m = kChipSubgraphM;
  double city_subgraph_m = kCitySubgraphM;
  bool city_scale = false;
  bool infer_speed = true;

  double subgraph_threshold() const { return city_scale ? city_subgraph_m : chip_subgraph_m; }
};

struct StageTiming {
  std::string stage;
  double seconds = 0.0;
};

struct ExtractResult {
  RoadGraph graph;
  std::vector<StageTiming> timings;
};

/// refine -> skeletonize -> skeleton_to_graph -> clean -> infer_speeds.
/// Failures are rethrown as StageError carrying the stage name.
ExtractResult extract_graph(const RasterMask& mask, const ExtractConfig& cfg);

/// Runs `fn` and wraps any exception other than StageError in one naming `stage`.
template <typename Fn>
auto run_stage(const std::string& stage, std::vector<StageTiming>* timings, Fn&& fn) -> decltype(fn());

// --- implementation ----------------------------------------------------------

template <typename Fn>
auto run_stage(const std::string& stage, std::vector<StageTiming>* timings, Fn&& fn) -> decltype(fn()) {
  const auto t0 = std::chrono::steady_clock::now();
  auto record = [&] {
    if (timings)
      timings->push_back({stage, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count()});
  };
  try {
    if constexpr (std::is_void_v<decltype(fn())>) {
      fn();
      record();
    } else {
      auto out = fn();
      record();
      return out;
    }
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError(stage, e.what());
  }
}

}  // namespace cresi
