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


#include <gtest/gtest.h>

#include <numbers>
#include <random>
#include <set>
#include <utility>

#include "wos/autonomy.hpp"

using namespace wos;

namespace {

UltrasonicReading at(double m) { return UltrasonicReading{m, 0}; }
UltrasonicReading none() { return UltrasonicReading{std::nullopt, 0}; }

const AutonomyParams kParams{};

}  // namespace

TEST(Autonomy, ForwardStopsBelowThreshold) {
  const auto s = step_autonomy(AutonomyState{}, at(0.25), Pose{}, kParams);
  EXPECT_EQ(s.state.phase, Phase::kAvoidStop);
  EXPECT_EQ(s.command, (DriveCommand{0, 0}));
}

TEST(Autonomy, ForwardCruisesWhenClear) {
  const auto s = step_autonomy(AutonomyState{}, none(), Pose{}, kParams);
  EXPECT_EQ(s.state.phase, Phase::kForward);
  EXPECT_EQ(s.command, (DriveCommand{60, 0}));
  EXPECT_EQ(step_autonomy(AutonomyState{}, at(0.30), Pose{}, kParams).state.phase, Phase::kForward);
}

TEST(Autonomy, StopLeadRaisesTheCruiseThreshold) {
  AutonomyParams p;
  p.stop_lead = 0.05;
  EXPECT_EQ(step_autonomy(AutonomyState{}, at(0.34), Pose{}, p).state.phase, Phase::kAvoidStop);
  EXPECT_EQ(step_autonomy(AutonomyState{}, at(0.35), Pose{}, p).state.phase, Phase::kForward);
}

TEST(Autonomy, TurnCompleteAndClearResumesForward) {
  const AutonomyState turning{Phase::kTurnLeft, deg_to_rad(45), 1, false};
  const auto s = step_autonomy(turning, at(0.80), Pose{0, 0, deg_to_rad(43)}, kParams);
  EXPECT_EQ(s.state, AutonomyState{});
  EXPECT_EQ(s.command, (DriveCommand{60, 0}));
}

TEST(Autonomy, StopThenTurnLeftByTurnAngle) {
  const AutonomyState stop{Phase::kAvoidStop, std::nullopt, 0, false};
  const auto s = step_autonomy(stop, at(0.28), Pose{0, 0, deg_to_rad(350)}, kParams);
  EXPECT_EQ(s.state.phase, Phase::kTurnLeft);
  EXPECT_EQ(s.state.attempts, 1);
  ASSERT_TRUE(s.state.heading_target);
  EXPECT_NEAR(*s.state.heading_target, deg_to_rad(35), 1e-12);
  EXPECT_EQ(s.command.throttle, 0);
}

TEST(Autonomy, TurnManeuverRotatesHeadingTowardTarget) {
  // The sign of the commanded yaw rate (speed * tan(steer)) must match the turn side.
  const AutonomyState left{Phase::kTurnLeft, deg_to_rad(45), 1, false};
  const auto l = step_autonomy(left, at(0.4), Pose{0, 0, 0}, kParams);
  EXPECT_EQ(l.command.throttle, -30);
  EXPECT_GT(double(l.command.throttle) * std::tan(deg_to_rad(l.command.steer)), 0.0);

  const AutonomyState right{Phase::kTurnRight, deg_to_rad(315), 2, false};
  const auto r = step_autonomy(right, at(0.4), Pose{0, 0, 0}, kParams);
  EXPECT_LT(double(r.command.throttle) * std::tan(deg_to_rad(r.command.steer)), 0.0);
  EXPECT_EQ(std::abs(r.command.steer), kMaxSteerDeg);
}

TEST(Autonomy, BlockedTurnAlternatesThenGivesUp) {
  AutonomyState s{Phase::kAvoidStop, std::nullopt, 0, false};
  Pose pose{0, 0, 0};
  std::vector<Phase> turns;
  bool blocked_signalled = false;
  for (int i = 0; i < 20 && !blocked_signalled; ++i) {
    auto out = step_autonomy(s, at(0.35), pose, kParams);
    if (is_turn(out.state.phase) && out.state.phase != s.phase) turns.push_back(out.state.phase);
    blocked_signalled = out.became_blocked;
    s = out.state;
    if (s.heading_target) pose.heading = *s.heading_target;  // turn completes instantly
  }
  EXPECT_TRUE(blocked_signalled);
  EXPECT_EQ(turns, (std::vector<Phase>{Phase::kTurnLeft, Phase::kTurnRight, Phase::kTurnLeft,
                                        Phase::kTurnRight}));
  EXPECT_EQ(s.phase, Phase::kAvoidStop);
  EXPECT_TRUE(s.blocked);
  const auto held = step_autonomy(s, none(), pose, kParams);
  EXPECT_EQ(held.state, s);
  EXPECT_EQ(held.command, (DriveCommand{0, 0}));
  EXPECT_FALSE(held.became_blocked);
}

TEST(AutonomyProperty, RandomWalkRespectsGraphAndInvariants) {
  using P = Phase;
  const std::set<std::pair<P, P>> edges = {
      {P::kForward, P::kForward},       {P::kForward, P::kAvoidStop},
      {P::kAvoidStop, P::kAvoidStop},   {P::kAvoidStop, P::kTurnLeft},
      {P::kTurnLeft, P::kTurnLeft},     {P::kTurnRight, P::kTurnRight},
      {P::kTurnLeft, P::kTurnRight},    {P::kTurnRight, P::kTurnLeft},
      {P::kTurnLeft, P::kForward},      {P::kTurnRight, P::kForward},
      {P::kTurnLeft, P::kAvoidStop},    {P::kTurnRight, P::kAvoidStop},
  };
  std::mt19937_64 rng(61);
  std::uniform_real_distribution<double> range(0.0, 1.5), head(0, 2 * std::numbers::pi),
      jitter(-0.04, 0.04), coin(0, 1);
  std::set<std::pair<P, P>> seen;
  for (int episode = 0; episode < 200; ++episode) {
    // An odd attempt limit ends on a left turn, an even one on a right turn.
    AutonomyParams params = kParams;
    params.max_turn_attempts = 3 + episode % 2;
    AutonomyState s{};
    Pose pose{0, 0, head(rng)};
    Phase last_turn = P::kForward;
    for (int i = 0; i < 500; ++i) {
      const UltrasonicReading r = coin(rng) < 0.1 ? none() : at(range(rng));
      if (s.heading_target && coin(rng) < 0.4) {
        pose.heading = normalize_angle(*s.heading_target + jitter(rng));
      } else if (coin(rng) < 0.2) {
        pose.heading = head(rng);
      }
      const auto out = step_autonomy(s, r, pose, params);
      const auto again = step_autonomy(s, r, pose, params);
      ASSERT_EQ(out.state, again.state);
      ASSERT_EQ(out.command, again.command);

      ASSERT_TRUE(edges.count({s.phase, out.state.phase}))
          << phase_name(s.phase) << " -> " << phase_name(out.state.phase);
      seen.insert({s.phase, out.state.phase});
      ASSERT_EQ(out.state.heading_target.has_value(), is_turn(out.state.phase));
      ASSERT_LE(out.state.attempts, params.max_turn_attempts);
      if (out.state.phase == P::kForward) { ASSERT_EQ(out.state.attempts, 0); }
      if (r.range && *r.range < params.stop_distance) {
        ASSERT_TRUE(out.command.throttle == 0 || is_turn(out.state.phase));
      }
      ASSERT_GE(out.command.throttle, -params.cruise_throttle);
      if (is_turn(out.state.phase)) {
        if (is_turn(s.phase) && out.state.phase != s.phase) {
          ASSERT_NE(out.state.phase, last_turn);
          ASSERT_EQ(out.state.attempts, s.attempts + 1);
        }
        last_turn = out.state.phase;
      } else {
        last_turn = P::kForward;
      }
      // A blocked rover holds once more, then a mode change restarts it.
      s = s.blocked ? AutonomyState{} : out.state;
    }
  }
  for (const auto& e : edges) {
    EXPECT_TRUE(seen.count(e)) << phase_name(e.first) << " -> " << phase_name(e.second);
  }
}

TEST(Arbitrate, Examples) {
  EXPECT_EQ(arbitrate(DriveMode::kManual, DriveCommand{40, 10}, DriveCommand{1, 1}), (DriveCommand{40, 10}));
  EXPECT_EQ(arbitrate(DriveMode::kAuto, DriveCommand{40, 10}, DriveCommand{60, 0}), (DriveCommand{60, 0}));
  EXPECT_EQ(arbitrate(DriveMode::kManual, std::nullopt, DriveCommand{60, 0}), (DriveCommand{0, 0}));
}
