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
 * @file hardware.hpp
 * @brief Actuation and power chain: H-bridge pin mapping, slew-limited drive
 * and steering, a linear battery model and the 5 V buck rail for the camera.
 */
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>

#include "wos/world.hpp"

namespace wos {

inline constexpr int kMaxThrottle = 100;
inline constexpr int kMaxSteerDeg = 30;

/// Operator- or autonomy-level drive request. Positive steer turns left.
struct DriveCommand {
  int throttle = 0;  ///< percent, [-100, 100]
  int steer = 0;     ///< degrees, [-30, 30]

  friend bool operator==(const DriveCommand&, const DriveCommand&) = default;
};

/// Clamps both fields into range. Returns true if anything changed.
inline bool clamp_command(DriveCommand& cmd) {
  DriveCommand c{std::clamp(cmd.throttle, -kMaxThrottle, kMaxThrottle),
                 std::clamp(cmd.steer, -kMaxSteerDeg, kMaxSteerDeg)};
  bool changed = !(c == cmd);
  cmd = c;
  return changed;
}

struct SlewLimits {
  double accel_limit = 1.0;               ///< m/s^2
  double steer_rate = deg_to_rad(120.0);  ///< rad/s
};

namespace detail {

inline double slew_toward(double current, double target, double max_step) {
  const double gap = target - current;
  if (std::abs(gap) <= max_step) return target;
  return current + std::copysign(max_step, gap);
}

}  // namespace detail

inline DriveState apply_drive_command(const DriveCommand& cmd, const DriveState& prev,
                                      const ChassisConfig& cfg, const SlewLimits& slew,
                                      double dt) {
  DriveCommand c = cmd;
  clamp_command(c);
  const double target_speed = c.throttle / 100.0 * cfg.max_speed;
  const double target_steer = std::clamp(deg_to_rad(c.steer), -cfg.max_steer, cfg.max_steer);
  return DriveState{detail::slew_toward(prev.speed, target_speed, slew.accel_limit * dt),
                    detail::slew_toward(prev.steer, target_steer, slew.steer_rate * dt)};
}

/// L293D input/enable pin levels for one motor channel.
struct HBridgePins {
  std::uint8_t in1 = 0;
  std::uint8_t in2 = 0;
  double enable_duty = 0.0;

  friend bool operator==(const HBridgePins&, const HBridgePins&) = default;
};

inline HBridgePins hbridge_pins(int throttle) {
  throttle = std::clamp(throttle, -kMaxThrottle, kMaxThrottle);
  if (throttle > 0) return {1, 0, throttle / 100.0};
  if (throttle < 0) return {0, 1, -throttle / 100.0};
  return {0, 0, 0.0};
}

struct BatteryModel {
  double v_full = 12.6;
  double v_empty = 9.0;
};

struct Battery {
  double voltage = 12.6;
  double capacity_remaining = 2.0;  ///< Ah
  double nominal_capacity = 2.0;    ///< Ah

  friend bool operator==(const Battery&, const Battery&) = default;
};

inline double battery_voltage(double remaining, double nominal, const BatteryModel& m) {
  return m.v_empty + (m.v_full - m.v_empty) * (remaining / nominal);
}

inline Battery make_battery(double nominal_ah, double remaining_ah, const BatteryModel& m = {}) {
  remaining_ah = std::clamp(remaining_ah, 0.0, nominal_ah);
  return Battery{battery_voltage(remaining_ah, nominal_ah, m), remaining_ah, nominal_ah};
}

inline Battery step_battery(const Battery& batt, double load_current, double dt,
                            const BatteryModel& m = {}) {
  if (load_current <= 0.0) return batt;
  Battery next = batt;
  next.capacity_remaining = std::max(0.0, batt.capacity_remaining - load_current * dt / 3600.0);
  next.voltage = battery_voltage(next.capacity_remaining, next.nominal_capacity, m);
  return next;
}

struct PowerRail {
  double rail_voltage = 5.0;
  bool brownout = false;

  friend bool operator==(const PowerRail&, const PowerRail&) = default;
};

inline constexpr double kRailVoltage = 5.0;
inline constexpr double kBuckDropout = 6.5;

/// Ideal LM2596-style buck: a clean 5 V rail until the input falls below dropout.
inline PowerRail regulate(double battery_voltage, double dropout = kBuckDropout) {
  if (battery_voltage >= dropout) return {kRailVoltage, false};
  return {0.0, true};
}

struct LoadModel {
  double idle = 0.2;    ///< A, always drawn
  double motor = 1.5;   ///< A at full speed, scales with |speed|/max_speed
  double camera = 0.3;  ///< A while the rail is up
};

inline double load_current(const DriveState& drive, const ChassisConfig& cfg, bool rail_up,
                           const LoadModel& load = {}) {
  return load.idle + load.motor * std::abs(drive.speed) / cfg.max_speed +
         (rail_up ? load.camera : 0.0);
}

}  // namespace wos
