#pragma once

#include "cresi/graph.hpp"

#include <array>
#include <string>

namespace cresi {

/// Seven 10 mph bins over (0, 70]; bin i covers (10 i, 10 (i + 1)].
inline constexpr int kSpeedChannels = 7;
inline constexpr double kSpeedBinWidthMph = 10.0;
inline constexpr double kMaxMaskSpeedMph = 65.0;

/// Base speed per road type and lane bucket {1, 2, 3+}, plus the unpaved multiplier.
struct SpeedTable {
  std::array<std::array<double, 3>, kRoadTypeCount> mph{{
      {55, 55, 65},  // motorway
      {45, 45, 55},  // primary
      {35, 35, 45},  // secondary
      {30, 30, 35},  // tertiary
      {25, 25, 30},  // residential
      {20, 20, 20},  // unclassified
      {20, 20, 20},  // cart_track
  }};
  double unpaved_multiplier = 0.75;

  static const SpeedTable& defaults();
};

/// Lane count -> column of SpeedTable (lanes >= 3 share the last column).
inline int lane_bucket(int lanes) { return lanes <= 1 ? 0 : (lanes == 2 ? 1 : 2); }

double assign_speed(const RoadMetadata& metadata, const SpeedTable& table = SpeedTable::defaults());

/// ceil(speed / 10) - 1; DomainError outside (0, 70].
int speed_to_channel(double speed_mph);

/// Bin center 10 c + 5; DomainError outside [0, 6].
double channel_to_speed(int channel);

/// Seconds to traverse `length_m` at `speed_mph`.
double travel_time(double length_m, double speed_mph);

/// Reads a YAML speed table: `unpaved_multiplier: x` and `speeds: {road_type: [1 lane, 2 lane, 3+ lane]}`.
/// Keys not present keep their defaults.
SpeedTable load_speed_table(const std::string& path);

/// Sets speed_mph (from metadata) and travel_time_s on every edge carrying metadata.
/// Edges that already have a speed keep it; their travel time is refreshed.
RoadGraph with_assigned_speeds(const RoadGraph& g, const SpeedTable& table = SpeedTable::defaults());

}  // namespace cresi
