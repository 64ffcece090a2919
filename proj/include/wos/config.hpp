// Copyright 2026 The Wildlife Observation Rover Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

/**
 * @file config.hpp
 * @brief Service configuration and its `key = value` file format.
 */
#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>

#include "wos/autonomy.hpp"
#include "wos/hardware.hpp"
#include "wos/sensing.hpp"
#include "wos/world.hpp"

namespace wos {

struct PowerConfig {
  double capacity_ah = 2.0;
  std::optional<double> initial_ah;  ///< defaults to a full pack
  BatteryModel battery;
  double dropout = kBuckDropout;
  LoadModel load;
};

struct ServiceConfig {
  std::string world_path;
  int tick_hz = 50;
  int frame_every = 5;
  int telemetry_every = 1;
  std::string listen_tcp = "127.0.0.1:7700";
  std::string listen_ws = "127.0.0.1:7701";
  std::uint64_t seed = 0;
  std::optional<std::string> record_dir;
  bool autorecord = true;  ///< start a session log at tick 0 when record_dir is set
  std::string console_dir;  ///< static assets served at GET /
  double command_timeout = 0.5;
  std::size_t queue_limit = 64;

  DriveMode initial_mode = DriveMode::kManual;
  std::optional<Pose> start_pose;  ///< defaults to the centre of the bounds, heading 0

  ChassisConfig chassis;
  SlewLimits slew;
  UltrasonicConfig ultrasonic;
  CameraConfig camera;
  AutonomyParams autonomy;
  std::optional<double> stop_lead;  ///< defaults to cruise_braking_distance()
  PowerConfig power;

  double dt() const { return 1.0 / tick_hz; }

  /// Distance covered from the tick a stop is decided until the wheels are
  /// still, at cruise speed: one tick of latency plus slew-limited braking.
  double cruise_braking_distance() const {
    const double v = autonomy.cruise_throttle / 100.0 * chassis.max_speed;
    return v * v / (2.0 * slew.accel_limit) + v * dt();
  }

  /// Autonomy parameters as the simulation runs them.
  AutonomyParams effective_autonomy() const {
    AutonomyParams p = autonomy;
    p.stop_lead = stop_lead.value_or(cruise_braking_distance());
    return p;
  }
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline void validate_config(const ServiceConfig& c) {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw ConfigError(what);
  };
  require(c.tick_hz > 0, "tick_hz must be > 0");
  require(c.frame_every >= 1, "frame_every must be >= 1");
  require(c.telemetry_every >= 1, "telemetry_every must be >= 1");
  require(c.chassis.wheelbase > 0 && c.chassis.max_speed > 0 && c.chassis.body_radius > 0,
          "chassis parameters must be positive");
  require(c.chassis.max_steer > 0 && c.chassis.max_steer < deg_to_rad(90.0),
          "max_steer must be in (0, 90) degrees");
  require(c.slew.accel_limit > 0 && c.slew.steer_rate > 0, "slew limits must be positive");
  require(c.ultrasonic.max_range > 0 && c.ultrasonic.quantum > 0 &&
              c.ultrasonic.noise_sigma >= 0,
          "invalid ultrasonic parameters");
  require(c.camera.width > 0 && c.camera.height > 0 && c.camera.max_range > 0,
          "invalid camera parameters");
  const auto& a = c.autonomy;
  require(0 < a.stop_distance && a.stop_distance < a.clear_distance &&
              a.clear_distance <= c.ultrasonic.max_range,
          "need 0 < stop_distance < clear_distance <= ultrasonic max_range");
  require(a.turn_angle_deg > 0 && a.turn_angle_deg <= 180, "turn_angle must be in (0, 180]");
  require(a.cruise_throttle > 0 && a.cruise_throttle <= 100, "cruise_throttle must be in (0, 100]");
  require(a.max_turn_attempts >= 1, "max_turn_attempts must be >= 1");
  require(!c.stop_lead || *c.stop_lead >= 0, "stop_lead must be >= 0");
  require(c.power.capacity_ah > 0, "battery capacity must be positive");
  require(c.power.battery.v_full > c.power.battery.v_empty, "v_full must exceed v_empty");
  require(c.queue_limit >= 1, "queue_limit must be >= 1");
  require(c.command_timeout > 0, "command_timeout must be > 0");
}

namespace detail {

inline double to_double(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  double d = 0;
  try {
    d = std::stod(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != v.size()) throw ConfigError(key + ": expected a number, got '" + v + "'");
  return d;
}

inline long long to_int(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  long long n = 0;
  try {
    n = std::stoll(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != v.size()) throw ConfigError(key + ": expected an integer, got '" + v + "'");
  return n;
}

inline bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError(key + ": expected true/false, got '" + v + "'");
}

}  // namespace detail

/// Applies `key = value` lines on top of `base`. `#` starts a comment line.
inline ServiceConfig parse_config(std::string_view text, ServiceConfig base = {}) {
  ServiceConfig c = std::move(base);
  using Setter = std::function<void(const std::string&, const std::string&)>;
  auto num = [](double& field) -> Setter {
    return [&field](const std::string& k, const std::string& v) { field = detail::to_double(k, v); };
  };
  auto deg = [](double& field) -> Setter {
    return [&field](const std::string& k, const std::string& v) {
      field = deg_to_rad(detail::to_double(k, v));
    };
  };
  auto integer = [](int& field) -> Setter {
    return [&field](const std::string& k, const std::string& v) {
      field = static_cast<int>(detail::to_int(k, v));
    };
  };
  Pose start = c.start_pose.value_or(Pose{});
  bool start_set = c.start_pose.has_value();
  auto start_field = [&](double& field, bool degrees) -> Setter {
    return [&, degrees](const std::string& k, const std::string& v) {
      double d = detail::to_double(k, v);
      field = degrees ? normalize_angle(deg_to_rad(d)) : d;
      start_set = true;
    };
  };

  const std::map<std::string, Setter, std::less<>> setters = {
      {"world", [&](auto&, auto& v) { c.world_path = v; }},
      {"world_path", [&](auto&, auto& v) { c.world_path = v; }},
      {"tick_hz", integer(c.tick_hz)},
      {"frame_every", integer(c.frame_every)},
      {"telemetry_every", integer(c.telemetry_every)},
      {"listen_tcp", [&](auto&, auto& v) { c.listen_tcp = v; }},
      {"listen_ws", [&](auto&, auto& v) { c.listen_ws = v; }},
      {"seed", [&](auto& k, auto& v) { c.seed = static_cast<std::uint64_t>(detail::to_int(k, v)); }},
      {"record_dir",
       [&](auto&, auto& v) { c.record_dir = v.empty() ? std::nullopt : std::optional(v); }},
      {"autorecord", [&](auto& k, auto& v) { c.autorecord = detail::to_bool(k, v); }},
      {"console_dir", [&](auto&, auto& v) { c.console_dir = v; }},
      {"command_timeout", num(c.command_timeout)},
      {"queue_limit",
       [&](auto& k, auto& v) { c.queue_limit = static_cast<std::size_t>(detail::to_int(k, v)); }},
      {"mode",
       [&](auto& k, auto& v) {
         if (v == "manual") c.initial_mode = DriveMode::kManual;
         else if (v == "auto") c.initial_mode = DriveMode::kAuto;
         else throw ConfigError(k + ": expected manual or auto");
       }},
      {"start_x", start_field(start.x, false)},
      {"start_y", start_field(start.y, false)},
      {"start_heading_deg", start_field(start.heading, true)},
      {"wheelbase", num(c.chassis.wheelbase)},
      {"max_speed", num(c.chassis.max_speed)},
      {"max_steer_deg", deg(c.chassis.max_steer)},
      {"body_radius", num(c.chassis.body_radius)},
      {"accel_limit", num(c.slew.accel_limit)},
      {"steer_rate_deg", deg(c.slew.steer_rate)},
      {"ultrasonic_max_range", num(c.ultrasonic.max_range)},
      {"ultrasonic_beam_halfwidth_deg", num(c.ultrasonic.beam_halfwidth_deg)},
      {"ultrasonic_quantum", num(c.ultrasonic.quantum)},
      {"ultrasonic_noise_sigma", num(c.ultrasonic.noise_sigma)},
      {"camera_width", integer(c.camera.width)},
      {"camera_height", integer(c.camera.height)},
      {"camera_fov_deg", num(c.camera.fov_deg)},
      {"camera_max_range", num(c.camera.max_range)},
      {"stop_distance", num(c.autonomy.stop_distance)},
      {"clear_distance", num(c.autonomy.clear_distance)},
      {"turn_angle_deg", num(c.autonomy.turn_angle_deg)},
      {"cruise_throttle", integer(c.autonomy.cruise_throttle)},
      {"max_turn_attempts", integer(c.autonomy.max_turn_attempts)},
      {"stop_lead", [&](auto& k, auto& v) { c.stop_lead = detail::to_double(k, v); }},
      {"battery_capacity_ah", num(c.power.capacity_ah)},
      {"battery_initial_ah",
       [&](auto& k, auto& v) { c.power.initial_ah = detail::to_double(k, v); }},
      {"battery_v_full", num(c.power.battery.v_full)},
      {"battery_v_empty", num(c.power.battery.v_empty)},
      {"buck_dropout", num(c.power.dropout)},
      {"idle_current", num(c.power.load.idle)},
      {"motor_current", num(c.power.load.motor)},
      {"camera_current", num(c.power.load.camera)},
  };

  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto body = detail::trim(line);
    if (body.empty() || body.front() == '#') continue;
    auto eq = body.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    std::string key(detail::trim(body.substr(0, eq)));
    std::string value(detail::trim(body.substr(eq + 1)));
    auto it = setters.find(key);
    if (it == setters.end()) {
      throw ConfigError("line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    }
    try {
      it->second(key, value);
    } catch (const ConfigError& e) {
      throw ConfigError("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  if (start_set) c.start_pose = start;
  validate_config(c);
  return c;
}

}  // namespace wos
