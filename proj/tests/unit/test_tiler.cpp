#include "doctest.h"
#include "fixtures.hpp"

#include "cresi/errors.hpp"
#include "cresi/mask_gen.hpp"
#include "cresi/synth.hpp"
#include "cresi/tiler.hpp"

#include <filesystem>
#include <random>

using namespace cresi;

namespace {

RasterMask constant(const GeoTransform& t, float v, int bands = 1) {
  return RasterMask(MaskKind::continuous, bands, t, v);
}

RasterMask cut(const RasterMask& full, const WindowSpec& w) {
  RasterMask out(full.kind, full.band_count(), full.transform.window(w.col_off, w.row_off, w.width, w.height));
  for (int b = 0; b < full.band_count(); ++b) out.bands[b] = full.bands[b].block(w.row_off, w.col_off, w.height, w.width);
  return out;
}

}  // namespace

TEST_CASE("split examples") {
  auto one = split(100, 100, 100, 0);
  REQUIRE(one.size() == 1);
  CHECK(one[0] == WindowSpec{0, 0, 100, 100, 0});

  auto four = split(3000, 3000, 2000, 500);
  REQUIRE(four.size() == 4);
  CHECK(four.back().col_off == 1000);
  CHECK(four.back().row_off == 1000);
  for (const auto& w : four) {
    CHECK(w.width == 2000);
    CHECK(w.height == 2000);
  }

  auto clamped = split(1999, 1999, 2000, 500);
  REQUIRE(clamped.size() == 1);
  CHECK(clamped[0].width == 1999);
  CHECK(clamped[0].height == 1999);

  CHECK_THROWS_AS(split(1000, 1000, 500, 500), DomainError);
  CHECK_THROWS_AS(split(1000, 1000, 500, -1), DomainError);
}

TEST_CASE("split covers every pixel and stays inside the extent") {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 200; ++trial) {
    const int w = 1 + rng() % 700, h = 1 + rng() % 700, win = 1 + rng() % 300;
    const int ov = rng() % win;
    Grid<int> cover = Grid<int>::Zero(h, w);
    for (const auto& s : split(w, h, win, ov)) {
      REQUIRE(s.col_off >= 0);
      REQUIRE(s.row_off >= 0);
      REQUIRE(s.col_off + s.width <= w);
      REQUIRE(s.row_off + s.height <= h);
      cover.block(s.row_off, s.col_off, s.height, s.width) += 1;
    }
    CHECK(cover.minCoeff() >= 1);
  }
}

TEST_CASE("fold merge") {
  const GeoTransform t{0, 10, 1.0, 10, 10, ""};
  const auto a = constant(t, 0.2f);
  CHECK((merge_fold_predictions({a}).bands[0] == a.bands[0]).all());
  const auto m = merge_fold_predictions({a, constant(t, 0.6f)});
  CHECK((m.bands[0] - 0.4f).abs().maxCoeff() < 1e-6f);
  CHECK_THROWS_AS(merge_fold_predictions({a, constant(GeoTransform{0, 10, 1.0, 11, 10, ""}, 0.1f)}), DomainError);
}

TEST_CASE("merging independent noisy folds lowers per-pixel variance") {
  const auto city = with_assigned_speeds(gen_synthetic_city(300.0, 60.0, 2));
  const auto t = scene_transform(300.0, 0.3);
  const auto clean = render_multiclass_mask(city, t);
  std::vector<RasterMask> folds;
  auto variance = [&](const RasterMask& m) {
    // Interior road pixels of the winning channel are unclipped above, so compare the background band.
    const Band d = m.bands[kBackgroundBand] - clean.bands[kBackgroundBand];
    return static_cast<double>(d.square().mean());
  };
  for (std::uint64_t k = 0; k < 4; ++k) folds.push_back(oracle_predict(city, t, OracleNoise{0.2, 0.0, 10.0, 100 + k}));
  const double merged = variance(merge_fold_predictions(folds));
  for (const auto& f : folds) CHECK(merged < variance(f));
}

TEST_CASE("stitch examples") {
  const GeoTransform full{0, 20, 1.0, 20, 10, ""};
  const WindowSpec left{0, 0, 10, 10, 0}, right{10, 0, 10, 10, 0};
  auto mosaic = stitch({{left, constant(full.window(0, 0, 10, 10), 0.2f)},
                        {right, constant(full.window(10, 0, 10, 10), 0.6f)}},
                       full);
  CHECK(mosaic.bands[0](5, 5) == 0.2f);
  CHECK(mosaic.bands[0](5, 15) == 0.6f);

  const WindowSpec a{0, 0, 15, 10, 5}, b{5, 0, 15, 10, 5};
  auto blend = stitch({{a, constant(full.window(0, 0, 15, 10), 0.2f)}, {b, constant(full.window(5, 0, 15, 10), 0.6f)}},
                      full);
  CHECK(blend.bands[0](3, 2) == doctest::Approx(0.2));
  CHECK(blend.bands[0](3, 10) == doctest::Approx(0.4));
  CHECK(blend.bands[0](3, 17) == doctest::Approx(0.6));

  Stitcher s(full);
  CHECK_THROWS_AS(s.add(WindowSpec{15, 0, 10, 10, 0}, constant(full.window(15, 0, 10, 10), 0.1f)), DomainError);
  s.add(left, constant(full.window(0, 0, 10, 10), 0.5f));
  CHECK(s.uncovered_pixels() == 100);
  CHECK(s.finish().bands[0](5, 15) == 0.0f);
}

TEST_CASE("stitch of split is the identity") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<float> u(0.0f, 1.0f);
  for (int trial = 0; trial < 30; ++trial) {
    const int w = 20 + rng() % 200, h = 20 + rng() % 200, win = 5 + rng() % 80;
    const int ov = rng() % win;
    RasterMask m(MaskKind::multiclass, 3, GeoTransform{0, 100, 0.3, w, h, ""});
    for (auto& b : m.bands)
      for (Eigen::Index i = 0; i < b.size(); ++i) b.data()[i] = u(rng);
    std::vector<std::pair<WindowSpec, RasterMask>> parts;
    for (const auto& s : split(w, h, win, ov)) parts.emplace_back(s, cut(m, s));
    const auto back = stitch(parts, m.transform);
    for (int b = 0; b < 3; ++b) CHECK((back.bands[b] == m.bands[b]).all());
  }
}

TEST_CASE("city-scale runs: empty scene, thread count and directory backend") {
  const auto t = scene_transform(300.0, 0.3);
  TilingConfig tiling{600, 150, 1};
  const auto empty = run_city_scale(OracleSource(RoadGraph{}, {OracleNoise{}}), t, tiling, ExtractConfig{});
  CHECK(empty.graph.node_count() == 0);
  CHECK(empty.graph.edge_count() == 0);
  CHECK(empty.windows == 4);

  const auto city = with_assigned_speeds(gen_synthetic_city(300.0, 80.0, 6));
  const OracleSource source(city, {OracleNoise{0.1, 0.2, 10, 1}, OracleNoise{0.1, 0.2, 10, 2}});
  const auto one = run_city_scale(source, t, tiling, ExtractConfig{}, true);
  tiling.threads = 3;
  const auto three = run_city_scale(source, t, tiling, ExtractConfig{});
  CHECK(fixtures::same_graph(one.graph, three.graph));
  CHECK(one.uncovered_pixels == 0);
  CHECK(one.graph.edge_count() > 0);

  // The same windows written to disk and read back give the same graph (one fold).
  const auto dir = (std::filesystem::temp_directory_path() / "cresi_dir_source").string();
  std::filesystem::create_directories(dir);
  const OracleSource single(city, {OracleNoise{0.1, 0.2, 10, 1}});
  for (const auto& w : split(t.width, t.height, 600, 150))
    write_raster(single.predict(t, w, 0), DirectorySource::stem_for(dir, w));
  tiling.threads = 1;
  const auto from_oracle = run_city_scale(single, t, tiling, ExtractConfig{});
  const auto from_disk = run_city_scale(DirectorySource(dir), t, tiling, ExtractConfig{});
  std::filesystem::remove_all(dir);
  CHECK(fixtures::same_graph(from_oracle.graph, from_disk.graph));
  CHECK_THROWS_AS(run_city_scale(DirectorySource(dir), t, tiling, ExtractConfig{}), StageError);
}
