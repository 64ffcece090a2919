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
 * @file autonomy.hpp
 * @brief Obstacle stop-and-turn state machine and command arbitration.
 *
 * The rover cruises forward until the ultrasonic range drops below
 * stop_distance plus stop_lead, stops, then turns left. If the way is still
 * not clear at the end of a turn it tries the other side, alternating, and
 * gives up (BLOCKED, motors off) after max_turn_attempts.
 *
 * The chassis cannot pivot, so a turn is a reverse arc at half cruise
 * throttle with the front wheels at full lock away from the turn side:
 * the nose swings toward the new heading while the body backs off the
 * obstacle it just stopped in front of.
 */
#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string_view>

#include "wos/hardware.hpp"
#include "wos/sensing.hpp"
#include "wos/world.hpp"

namespace wos {

enum class Phase : std::uint8_t {
  kForward = 0,
  kAvoidStop = 1,
  kTurnLeft = 2,
  kTurnRight = 3,
};

inline std::string_view phase_name(Phase p) {
  switch (p) {
    case Phase::kForward: return "FORWARD";
    case Phase::kAvoidStop: return "AVOID_STOP";
    case Phase::kTurnLeft: return "TURN_LEFT";
    case Phase::kTurnRight: return "TURN_RIGHT";
  }
  return "?";
}

inline bool is_turn(Phase p) { return p == Phase::kTurnLeft || p == Phase::kTurnRight; }

struct AutonomyParams {
  double stop_distance = 0.30;
  double clear_distance = 0.50;
  double turn_angle_deg = 45.0;
  int cruise_throttle = 60;
  int max_turn_attempts = 4;
  double heading_tolerance_deg = 3.0;
  /// Added to stop_distance while cruising so the rover is at rest, not just
  /// starting to brake, by the time it is stop_distance away.
  double stop_lead = 0.0;
};

struct AutonomyState {
  Phase phase = Phase::kForward;
  std::optional<double> heading_target;  ///< radians; set only while turning
  int attempts = 0;
  bool blocked = false;  ///< terminal AVOID_STOP after exhausting attempts

  friend bool operator==(const AutonomyState&, const AutonomyState&) = default;
};

struct AutonomyStep {
  AutonomyState state;
  DriveCommand command;
  bool became_blocked = false;
};

namespace detail {

/// Wheel lock that rotates the heading toward `remaining` while reversing.
inline int reverse_steer_for(double remaining) {
  return remaining > 0.0 ? -kMaxSteerDeg : kMaxSteerDeg;
}

inline AutonomyState begin_turn(Phase dir, double heading, const AutonomyParams& p, int attempt) {
  const double delta = deg_to_rad(p.turn_angle_deg);
  const double target = dir == Phase::kTurnLeft ? heading + delta : heading - delta;
  return AutonomyState{dir, normalize_angle(target), attempt, false};
}

inline bool path_clear(const UltrasonicReading& r, const AutonomyParams& p) {
  return !r.range || *r.range >= p.clear_distance;
}

}  // namespace detail

inline AutonomyStep step_autonomy(const AutonomyState& state, const UltrasonicReading& reading,
                                  const Pose& pose, const AutonomyParams& params) {
  const DriveCommand stop{0, 0};
  switch (state.phase) {
    case Phase::kForward: {
      if (reading.range && *reading.range < params.stop_distance + params.stop_lead) {
        return {AutonomyState{Phase::kAvoidStop, std::nullopt, 0, false}, stop};
      }
      return {AutonomyState{}, DriveCommand{params.cruise_throttle, 0}};
    }

    case Phase::kAvoidStop: {
      if (state.blocked) return {state, stop};
      // Motors stay off this tick while the servo swings to lock.
      return {detail::begin_turn(Phase::kTurnLeft, pose.heading, params, 1),
              DriveCommand{0, detail::reverse_steer_for(1.0)}};
    }

    case Phase::kTurnLeft:
    case Phase::kTurnRight: {
      const double target = state.heading_target.value_or(pose.heading);
      const double remaining = angle_diff(target, pose.heading);
      if (std::abs(remaining) > deg_to_rad(params.heading_tolerance_deg)) {
        return {state, DriveCommand{-params.cruise_throttle / 2, detail::reverse_steer_for(remaining)}};
      }
      if (detail::path_clear(reading, params)) {
        return {AutonomyState{}, DriveCommand{params.cruise_throttle, 0}};
      }
      if (state.attempts >= params.max_turn_attempts) {
        return {AutonomyState{Phase::kAvoidStop, std::nullopt, state.attempts, true}, stop, true};
      }
      const Phase next = state.phase == Phase::kTurnLeft ? Phase::kTurnRight : Phase::kTurnLeft;
      AutonomyState turned = detail::begin_turn(next, pose.heading, params, state.attempts + 1);
      const double side = next == Phase::kTurnLeft ? 1.0 : -1.0;
      return {turned, DriveCommand{-params.cruise_throttle / 2, detail::reverse_steer_for(side)}};
    }
  }
  return {state, stop};
}

enum class DriveMode : std::uint8_t { kManual = 0, kAuto = 1 };

/// Picks the command that reaches the motors. In MANUAL a missing (or stale)
/// operator command is a deadman stop; in AUTO operator drive is ignored.
inline DriveCommand arbitrate(DriveMode mode, const std::optional<DriveCommand>& operator_cmd,
                              const DriveCommand& autonomy_cmd) {
  if (mode == DriveMode::kAuto) return autonomy_cmd;
  return operator_cmd.value_or(DriveCommand{0, 0});
}

}  // namespace wos
