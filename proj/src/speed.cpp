#include "cresi/speed.hpp"

#include "cresi/errors.hpp"

#include <yaml-cpp/yaml.h>

#include <cmath>

namespace cresi {

const SpeedTable& SpeedTable::defaults() {
  static const SpeedTable table;
  return table;
}

double assign_speed(const RoadMetadata& metadata, const SpeedTable& table) {
  double mph = table.mph[static_cast<int>(metadata.road_type)][lane_bucket(metadata.lanes)];
  if (!metadata.paved) mph *= table.unpaved_multiplier;
  return mph;
}

int speed_to_channel(double speed_mph) {
  if (!(speed_mph > 0.0) || speed_mph > kSpeedChannels * kSpeedBinWidthMph)
    throw DomainError("speed " + std::to_string(speed_mph) + " mph outside (0, 70]");
  return static_cast<int>(std::ceil(speed_mph / kSpeedBinWidthMph)) - 1;
}

double channel_to_speed(int channel) {
  if (channel < 0 || channel >= kSpeedChannels)
    throw DomainError("speed channel " + std::to_string(channel) + " outside [0, 6]");
  return kSpeedBinWidthMph * channel + kSpeedBinWidthMph / 2.0;
}

double travel_time(double length_m, double speed_mph) {
  if (!(speed_mph > 0.0)) throw DomainError("travel_time: speed must be > 0");
  if (length_m < 0.0) throw DomainError("travel_time: length must be >= 0");
  return length_m / (speed_mph * kMphToMps);
}

SpeedTable load_speed_table(const std::string& path) {
  YAML::Node root;
  try {
    root = YAML::LoadFile(path);
  } catch (const YAML::BadFile&) {
    throw IoError("cannot read speed table " + path);
  } catch (const YAML::ParserException& e) {
    throw ParseError(e.msg, e.mark.line + 1, e.mark.column + 1);
  }
  SpeedTable table;
  try {
    if (auto m = root["unpaved_multiplier"]) table.unpaved_multiplier = m.as<double>();
    if (auto speeds = root["speeds"]) {
      for (auto it = speeds.begin(); it != speeds.end(); ++it) {
        const auto name = it->first.as<std::string>();
        const auto type = parse_road_type(name);
        if (!type) throw ConfigError("speeds." + name, "unknown road type");
        const auto row = it->second.as<std::vector<double>>();
        if (row.size() != 3) throw ConfigError("speeds." + name, "expected three lane-bucket speeds");
        for (int k = 0; k < 3; ++k) table.mph[static_cast<int>(*type)][k] = row[k];
      }
    }
  } catch (const YAML::Exception& e) {
    throw ConfigError("speed_table", e.what());
  }
  if (!(table.unpaved_multiplier > 0.0)) throw ConfigError("unpaved_multiplier", "must be > 0");
  return table;
}

RoadGraph with_assigned_speeds(const RoadGraph& g, const SpeedTable& table) {
  RoadGraph out = g;
  for (auto& e : out.mutable_edges()) {
    if (!e.speed_mph && e.metadata) e.speed_mph = assign_speed(*e.metadata, table);
    if (e.speed_mph) e.travel_time_s = travel_time(e.length_m, *e.speed_mph);
  }
  return out;
}

}  // namespace cresi
