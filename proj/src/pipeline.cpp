#include "cresi/pipeline.hpp"

#include "cresi/skeleton.hpp"

namespace cresi {

ExtractResult extract_graph(const RasterMask& mask, const ExtractConfig& cfg) {
  ExtractResult res;
  BinaryMask binary = run_stage("refine", &res.timings, [&] { return refine_pipeline(mask, cfg.refine); });
  BinaryMask skel = run_stage("skeleton", &res.timings, [&] { return skeletonize(binary); });
  binary.resize(0, 0);
  RoadGraph raw = run_stage("graph", &res.timings, [&] { return skeleton_to_graph(skel, mask.transform); });
  skel.resize(0, 0);
  CleanConfig clean = cfg.clean;
  clean.min_subgraph_m = cfg.subgraph_threshold();
  res.graph = run_stage("clean", &res.timings,
                        [&] { return clean_graph(raw, clean, mask.transform.pixel_size); });
  if (cfg.infer_speed)
    res.graph = run_stage("speed", &res.timings, [&] { return infer_speeds(res.graph, mask, cfg.speed); });
  res.graph.transform = mask.transform;
  return res;
}

}  // namespace cresi
