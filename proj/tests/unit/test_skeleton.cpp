#include "doctest.h"

#include "cresi/errors.hpp"
#include "cresi/mask_gen.hpp"
#include "cresi/refine.hpp"
#include "cresi/skeleton.hpp"
#include "cresi/synth.hpp"

#include <cmath>
#include <random>

using namespace cresi;

namespace {

GeoTransform tf(const BinaryMask& m) {
  return GeoTransform{0.0, 30.0, 0.3, static_cast<int>(m.cols()), static_cast<int>(m.rows()), ""};
}

int count(const BinaryMask& m) { return m.cast<int>().sum(); }

bool has_2x2_block(const BinaryMask& m) {
  for (Eigen::Index r = 0; r + 1 < m.rows(); ++r)
    for (Eigen::Index c = 0; c + 1 < m.cols(); ++c)
      if (m(r, c) && m(r + 1, c) && m(r, c + 1) && m(r + 1, c + 1)) return true;
  return false;
}

BinaryMask plus_band(int side, int width) {
  BinaryMask m = BinaryMask::Zero(side, side);
  const int lo = side / 2 - width / 2;
  m.block(lo, 5, width, side - 10) = 1;
  m.block(5, lo, side - 10, width) = 1;
  return m;
}

}  // namespace

TEST_CASE("skeleton of empty mask is empty") {
  CHECK(count(skeletonize(BinaryMask::Zero(20, 20))) == 0);
  CHECK(skeleton_to_graph(BinaryMask::Zero(20, 20), tf(BinaryMask::Zero(20, 20))).node_count() == 0);
}

TEST_CASE("7-px band thins to a single row") {
  BinaryMask m = BinaryMask::Zero(40, 80);
  m.block(15, 10, 7, 60) = 1;
  const auto s = skeletonize(m);
  for (int c = 0; c < 80; ++c) CHECK(s.col(c).cast<int>().sum() <= 1);
  int covered = 0;
  for (int c = 0; c < 80; ++c) covered += s.col(c).cast<int>().sum();
  CHECK(covered >= 50);
}

TEST_CASE("plus crossing thins to one junction cluster") {
  const auto s = skeletonize(plus_band(80, 9));
  const auto nc = neighbor_counts(s);
  BinaryMask junction = (nc >= 3).cast<std::uint8_t>() * s;
  CHECK(count(junction) >= 1);
  CHECK(component_areas(junction, 1, true).areas.size() == 1);
  const auto g = skeleton_to_graph(s, tf(s));
  CHECK(g.node_count() == 5);
  CHECK(g.edge_count() == 4);
}

TEST_CASE("skeleton properties on random blobs") {
  std::mt19937_64 rng(21);
  std::uniform_int_distribution<int> pos(5, 90), len(4, 40);
  for (int trial = 0; trial < 25; ++trial) {
    BinaryMask m = BinaryMask::Zero(100, 100);
    for (int k = 0; k < 6; ++k) {
      const int r = pos(rng), c = pos(rng);
      m.block(r, c, std::min(len(rng), 100 - r), std::min(len(rng), 100 - c)) = 1;
    }
    const auto s = skeletonize(m);
    CHECK(((s == 1) <= (m == 1)).all());
    CHECK_FALSE(has_2x2_block(s));
    CHECK(component_areas(s, 1, true).areas.size() == component_areas(m, 1, true).areas.size());
  }
}

TEST_CASE("chain of 11 pixels is one 3 m edge") {
  BinaryMask s = BinaryMask::Zero(20, 20);
  s.block(5, 3, 1, 11) = 1;
  const auto g = skeleton_to_graph(s, tf(s));
  CHECK(g.node_count() == 2);
  REQUIRE(g.edge_count() == 1);
  CHECK(g.edges()[0].length_m == doctest::Approx(3.0));
}

TEST_CASE("diagonal steps count sqrt(2)") {
  BinaryMask s = BinaryMask::Zero(20, 20);
  for (int i = 0; i < 6; ++i) s(2 + i, 2 + i) = 1;
  const auto g = skeleton_to_graph(s, tf(s));
  REQUIRE(g.edge_count() == 1);
  CHECK(g.edges()[0].length_m == doctest::Approx(5 * std::sqrt(2.0) * 0.3));
}

TEST_CASE("hand-drawn plus skeleton") {
  BinaryMask s = BinaryMask::Zero(21, 21);
  s.block(10, 2, 1, 17) = 1;
  s.block(2, 10, 17, 1) = 1;
  const auto g = skeleton_to_graph(s, tf(s));
  CHECK(g.node_count() == 5);
  CHECK(g.edge_count() == 4);
  const auto deg = degrees(g);
  CHECK(std::count(deg.begin(), deg.end(), 4) == 1);
  CHECK(std::count(deg.begin(), deg.end(), 1) == 4);
  // Arms are 8 px from the centre.
  for (const auto& e : g.edges()) CHECK(e.length_m == doctest::Approx(8 * 0.3));
}

TEST_CASE("closed square ring is one self loop") {
  BinaryMask s = BinaryMask::Zero(20, 20);
  // Corners cut diagonally, as thinning leaves them.
  s.block(4, 5, 1, 7) = 1;
  s.block(12, 5, 1, 7) = 1;
  s.block(5, 4, 7, 1) = 1;
  s.block(5, 12, 7, 1) = 1;
  const auto g = skeleton_to_graph(s, tf(s));
  REQUIRE(g.node_count() == 1);
  REQUIRE(g.edge_count() == 1);
  CHECK(g.edges()[0].is_self_loop());
  CHECK(g.edges()[0].length_m == doctest::Approx(4 * 6 * 0.3 + 4 * std::sqrt(2.0) * 0.3));
  CHECK(g.nodes()[0].pos.isApprox(tf(s).pixel_center(4, 5)));
}

TEST_CASE("2x2 blocks are rejected by position") {
  BinaryMask s = BinaryMask::Zero(10, 10);
  s.block(3, 6, 2, 2) = 1;
  try {
    skeleton_to_graph(s, tf(s));
    FAIL("expected DomainError");
  } catch (const DomainError& e) {
    CHECK(std::string(e.what()).find("row 3, col 6") != std::string::npos);
  }
}

TEST_CASE("graph degrees and lengths agree with the skeleton") {
  const auto city = with_assigned_speeds(gen_synthetic_city(300.0, 80.0, 2));
  const auto t = scene_transform(300.0, 0.3);
  const auto s = skeletonize(refine_pipeline(render_multiclass_mask(city, t)));
  const auto g = skeleton_to_graph(s, t);
  const auto nc = neighbor_counts(s);
  const auto deg = degrees(g);
  // Simple (non-cluster) nodes: degree equals the pixel's neighbour count.
  int simple = 0;
  for (std::size_t i = 0; i < g.node_count(); ++i) {
    const auto px = t.pixel_of(g.nodes()[i].pos);
    const Point center = t.pixel_center(px.y(), px.x());
    if ((center - g.nodes()[i].pos).norm() > 1e-9 || nc(px.y(), px.x()) >= 3) continue;
    CHECK(deg[i] == nc(px.y(), px.x()));
    ++simple;
  }
  CHECK(simple > 0);
  for (std::size_t i = 0; i < g.node_count(); ++i) {
    const auto px = t.pixel_of(g.nodes()[i].pos);
    if (s(px.y(), px.x()) && nc(px.y(), px.x()) >= 3) CHECK(deg[i] >= 3);
  }
  // Total length: chain steps between skeleton pixels, within a pixel per junction.
  double chain = 0.0;
  for (int r = 0; r < s.rows(); ++r)
    for (int c = 0; c < s.cols(); ++c) {
      if (!s(r, c)) continue;
      if (c + 1 < s.cols() && s(r, c + 1)) chain += 0.3;
      if (r + 1 < s.rows() && s(r + 1, c)) chain += 0.3;
      // A diagonal step counts unless an orthogonal path already links the pair.
      if (r + 1 < s.rows() && c + 1 < s.cols() && s(r + 1, c + 1) && !s(r, c + 1) && !s(r + 1, c))
        chain += 0.3 * std::sqrt(2.0);
      if (r + 1 < s.rows() && c > 0 && s(r + 1, c - 1) && !s(r, c - 1) && !s(r + 1, c)) chain += 0.3 * std::sqrt(2.0);
    }
  int junctions = 0;
  for (std::size_t i = 0; i < g.node_count(); ++i) junctions += deg[i] >= 3;
  CHECK(std::abs(total_length_m(g) - chain) <= 0.3 * std::sqrt(2.0) * 4 * junctions + 1e-6);
}
