#include "doctest.h"

#include "cresi/errors.hpp"
#include "cresi/speed.hpp"

#include <filesystem>
#include <fstream>

using namespace cresi;

namespace {
RoadMetadata meta(RoadType t, int lanes, bool paved = true) { return {t, lanes, paved, false}; }
}  // namespace

TEST_CASE("published speed examples") {
  CHECK(assign_speed(meta(RoadType::motorway, 3)) == 65.0);
  CHECK(assign_speed(meta(RoadType::residential, 1)) == 25.0);
  CHECK(assign_speed(meta(RoadType::cart_track, 1, false)) == 15.0);
}

TEST_CASE("speed table properties") {
  for (int t = 0; t < kRoadTypeCount; ++t) {
    double prev = 0.0;
    for (int lanes = 1; lanes <= 6; ++lanes) {
      const double s = assign_speed(meta(static_cast<RoadType>(t), lanes));
      CHECK(s >= prev);
      CHECK(s >= 15.0);
      CHECK(s <= 65.0);
      CHECK(assign_speed(meta(static_cast<RoadType>(t), lanes, false)) == doctest::Approx(0.75 * s));
      prev = s;
    }
  }
}

TEST_CASE("channel mapping") {
  CHECK(speed_to_channel(10) == 0);
  CHECK(speed_to_channel(35) == 3);
  CHECK(speed_to_channel(65) == 6);
  CHECK(speed_to_channel(70) == 6);
  CHECK(speed_to_channel(10.0001) == 1);
  CHECK_THROWS_AS(speed_to_channel(0), DomainError);
  CHECK_THROWS_AS(speed_to_channel(-3), DomainError);
  CHECK_THROWS_AS(speed_to_channel(70.0001), DomainError);
  CHECK(channel_to_speed(0) == 5.0);
  CHECK(channel_to_speed(3) == 35.0);
  CHECK(channel_to_speed(6) == 65.0);
  CHECK_THROWS_AS(channel_to_speed(7), DomainError);
  CHECK_THROWS_AS(channel_to_speed(-1), DomainError);
  for (int c = 0; c < kSpeedChannels; ++c) CHECK(speed_to_channel(channel_to_speed(c)) == c);
  for (double s = 0.05; s <= 70.0; s += 0.05) CHECK(std::abs(channel_to_speed(speed_to_channel(s)) - s) <= 5.0 + 1e-9);
}

TEST_CASE("travel time") {
  CHECK(travel_time(0.0, 30.0) == 0.0);
  CHECK(travel_time(1000.0, 25.0) == doctest::Approx(89.477).epsilon(1e-5));
  CHECK(travel_time(447.04, 10.0) == doctest::Approx(100.0).epsilon(1e-12));
  CHECK_THROWS_AS(travel_time(10.0, 0.0), DomainError);
  CHECK_THROWS_AS(travel_time(10.0, -5.0), DomainError);
}

TEST_CASE("speed table override from yaml") {
  const auto path = (std::filesystem::temp_directory_path() / "cresi_speeds.yaml").string();
  {
    std::ofstream out(path);
    out << "unpaved_multiplier: 0.5\nspeeds:\n  residential: [20, 22, 24]\n";
  }
  const auto table = load_speed_table(path);
  std::filesystem::remove(path);
  CHECK(assign_speed(meta(RoadType::residential, 2), table) == 22.0);
  CHECK(assign_speed(meta(RoadType::residential, 1, false), table) == 10.0);
  CHECK(assign_speed(meta(RoadType::motorway, 3), table) == 65.0);
}

TEST_CASE("with_assigned_speeds keeps existing speeds") {
  RoadGraph g;
  g.add_node(0, Point(0, 0));
  g.add_node(1, Point(100, 0));
  auto e = make_edge(0, 1, {Point(0, 0), Point(100, 0)});
  e.metadata = meta(RoadType::primary, 2);
  g.add_edge(e);
  e.speed_mph = 12.0;
  g.add_edge(e);
  const auto out = with_assigned_speeds(g);
  CHECK(*out.edges()[0].speed_mph == 45.0);
  CHECK(*out.edges()[1].speed_mph == 12.0);
  CHECK(*out.edges()[1].travel_time_s == doctest::Approx(travel_time(100.0, 12.0)));
}
