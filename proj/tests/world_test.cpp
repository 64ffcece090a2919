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

#include <cmath>
#include <numbers>
#include <random>

#include "support/support.hpp"
#include "wos/world.hpp"

using namespace wos;

namespace {

World open_world(double half = 10.0) { return World{Rect{-half, -half, 2 * half, 2 * half}, {}}; }

Vec2 unit(double angle) { return {std::cos(angle), std::sin(angle)}; }

}  // namespace

TEST(LoadWorld, BoundsOnly) {
  const World w = load_world("bounds 20 20\n");
  EXPECT_EQ(w.bounds, (Rect{0, 0, 20, 20}));
  EXPECT_TRUE(w.obstacles.empty());
}

TEST(LoadWorld, SingleObstacle) {
  const World w = load_world("bounds 20 20\nrect 5 5 1 1\n");
  ASSERT_EQ(w.obstacles.size(), 1u);
  EXPECT_EQ(w.obstacles[0], (Rect{5, 5, 1, 1}));
}

TEST(LoadWorld, ObstacleOutsideBoundsNamesLine) {
  try {
    load_world("bounds 20 20\n# comment\nrect 25 5 1 1\n");
    FAIL() << "expected WorldError";
  } catch (const WorldError& e) {
    EXPECT_EQ(e.line(), 3);
  }
}

TEST(LoadWorld, CommentsBlankLinesAndWhitespace) {
  const World w = load_world("bounds 10 4\n\n  # rocks\n\trect 1 1 0.5 0.5  \nrect 2.5 0 1 4\n");
  EXPECT_EQ(w.obstacles.size(), 2u);
}

TEST(LoadWorld, Rejects) {
  EXPECT_THROW(load_world(""), WorldError);
  EXPECT_THROW(load_world("rect 1 1 1 1\n"), WorldError);
  EXPECT_THROW(load_world("# header\nbounds 10 10\n"), WorldError);
  EXPECT_THROW(load_world("bounds 0 10\n"), WorldError);
  EXPECT_THROW(load_world("bounds 10 10\npolygon 1 1 2 2 3 1\n"), WorldError);
  EXPECT_THROW(load_world("bounds 10 10\nrect 1 1 0 1\n"), WorldError);
  EXPECT_THROW(load_world("bounds 10 10\nrect 1 1 1\n"), WorldError);
  EXPECT_THROW(load_world("bounds 10 10\nrect 1 1 1 1 1\n"), WorldError);
  EXPECT_THROW(load_world("bounds 10 10\nrect a 1 1 1\n"), WorldError);
  EXPECT_THROW(load_world("bounds 10 10\nbounds 5 5\n"), WorldError);
}

TEST(LoadWorld, ShippedWorldsParse) {
  for (const char* f : {"worlds/meadow.world", "worlds/corridor.world"}) {
    EXPECT_NO_THROW(load_world(test::read_file(test::data_path(f)))) << f;
  }
}

TEST(Kinematics, StraightLine) {
  const Pose p = step_kinematics(Pose{0, 0, 0}, DriveState{0.5, 0.0}, ChassisConfig{}, 0.1);
  EXPECT_DOUBLE_EQ(p.x, 0.05);
  EXPECT_DOUBLE_EQ(p.y, 0.0);
  EXPECT_EQ(p.heading, 0.0);
}

TEST(Kinematics, ZeroSpeedLeavesPoseUnchanged) {
  const Pose start{1.5, -2.0, 4.0};
  for (double steer : {-0.5, 0.0, 0.3}) {
    for (double dt : {0.001, 0.02, 1.0}) {
      EXPECT_EQ(step_kinematics(start, DriveState{0.0, steer}, ChassisConfig{}, dt), start);
    }
  }
}

TEST(Kinematics, FullLapStaysOnTurningCircle) {
  const ChassisConfig cfg{};
  const double steer = deg_to_rad(20.0);
  const double radius = cfg.wheelbase / std::tan(steer);
  EXPECT_NEAR(radius, 0.4121, 1e-4);
  // Turning left from (0,0) heading 0 circles around (0, R).
  Pose p{0, 0, 0};
  double unwrapped = 0.0;
  double worst = 0.0;
  while (unwrapped < 2 * std::numbers::pi) {
    const double before = p.heading;
    p = step_kinematics(p, DriveState{0.2, steer}, cfg, 0.01);
    unwrapped += angle_diff(p.heading, before);
    worst = std::max(worst, std::abs(std::hypot(p.x, p.y - radius) - radius));
  }
  EXPECT_LT(worst, 1e-3);
}

TEST(Kinematics, MatchesFineStepReference) {
  const ChassisConfig cfg{};
  const double steer = deg_to_rad(20.0);
  for (double dt : {0.01, 0.02}) {
    Pose p{0, 0, 0};
    test::EulerOracle ref{0, 0, 0};
    double worst = 0.0;
    const int n = static_cast<int>(std::lround(2.0 / dt));
    for (int i = 0; i < n; ++i) {
      p = step_kinematics(p, DriveState{0.2, steer}, cfg, dt);
      ref.run(0.2, steer, cfg.wheelbase, 1e-5, dt);
      worst = std::max(worst, std::hypot(p.x - ref.x, p.y - ref.y));
    }
    EXPECT_LT(worst, 1e-3) << "dt " << dt;
  }
}

TEST(KinematicsProperty, HeadingNormalizedAndPure) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> pos(-50, 50), head(-20, 20), speed(-0.5, 0.5),
      steer(-0.52, 0.52), dt(0.0, 0.5);
  for (int i = 0; i < 20000; ++i) {
    const Pose start{pos(rng), pos(rng), normalize_angle(head(rng))};
    const DriveState d{speed(rng), steer(rng)};
    const double step = dt(rng);
    const Pose a = step_kinematics(start, d, ChassisConfig{}, step);
    const Pose b = step_kinematics(start, d, ChassisConfig{}, step);
    ASSERT_GE(a.heading, 0.0);
    ASSERT_LT(a.heading, 2 * std::numbers::pi);
    ASSERT_TRUE(std::isfinite(a.x) && std::isfinite(a.y));
    ASSERT_EQ(std::bit_cast<std::uint64_t>(a.x), std::bit_cast<std::uint64_t>(b.x));
    ASSERT_EQ(std::bit_cast<std::uint64_t>(a.y), std::bit_cast<std::uint64_t>(b.y));
    ASSERT_EQ(std::bit_cast<std::uint64_t>(a.heading), std::bit_cast<std::uint64_t>(b.heading));
  }
}

TEST(KinematicsProperty, ZeroSteerKeepsHeadingAndTravelsSpeedTimesDt) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> pos(-50, 50), head(0, 2 * std::numbers::pi),
      speed(-0.5, 0.5), dt(0.0, 0.5);
  for (int i = 0; i < 20000; ++i) {
    const Pose start{pos(rng), pos(rng), head(rng)};
    const double v = speed(rng), step = dt(rng);
    const Pose p = step_kinematics(start, DriveState{v, 0.0}, ChassisConfig{}, step);
    ASSERT_EQ(p.heading, start.heading);
    ASSERT_NEAR(std::hypot(p.x - start.x, p.y - start.y), std::abs(v) * step, 1e-12);
  }
}

TEST(Raycast, PerpendicularWall) {
  World w = open_world();
  w.obstacles.push_back(Rect{2, -1, 1, 2});
  auto d = raycast(w, {0, 0}, {1, 0}, 4.0);
  ASSERT_TRUE(d);
  EXPECT_DOUBLE_EQ(*d, 2.0);
}

TEST(Raycast, NothingWithinRange) {
  EXPECT_FALSE(raycast(open_world(), {0, 0}, {0, 1}, 4.0));
}

TEST(Raycast, DiagonalCornerAgreesWithDenseSampling) {
  World w = open_world();
  w.obstacles.push_back(Rect{1, 1, 1, 1});
  const double angle = std::numbers::pi / 4;
  auto d = raycast(w, {0, 0}, unit(angle), 4.0);
  ASSERT_TRUE(d);
  const double sampled = test::march_ray(w, {0, 0}, angle, 4.0, 1e-5);
  EXPECT_NEAR(sampled, std::sqrt(2.0), 1e-5);
  EXPECT_NEAR(*d, sampled, 1e-5);
  EXPECT_NEAR(*d, std::sqrt(2.0), 1e-12);
}

TEST(Raycast, InsideBoundsHitsTheWall) {
  const World w{Rect{0, 0, 5, 3}, {}};
  auto d = raycast(w, {1, 1}, {1, 0}, 10.0);
  ASSERT_TRUE(d);
  EXPECT_DOUBLE_EQ(*d, 4.0);
}

TEST(RaycastProperty, RecastNearHitAndMonotoneInRange) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> angle(0, 2 * std::numbers::pi), range(0.1, 15.0),
      eps(1e-6, 0.05);
  int hits = 0;
  for (int i = 0; i < 200; ++i) {
    const World w = test::random_world(100 + i);
    for (int j = 0; j < 50; ++j) {
      const Vec2 o{10, 10};
      const Vec2 dir = unit(angle(rng));
      const double r = range(rng);
      auto d = raycast(w, o, dir, r);
      if (!d) continue;
      ++hits;
      ASSERT_GE(*d, 0.0);
      ASSERT_LE(*d, r);
      const double e = std::min(eps(rng), *d);
      const Vec2 before{o.x + dir.x * (*d - e), o.y + dir.y * (*d - e)};
      auto again = raycast(w, before, dir, r);
      ASSERT_TRUE(again);
      ASSERT_LE(*again, e + 1e-9);
      auto longer = raycast(w, o, dir, r * 2.0);
      ASSERT_TRUE(longer);
      ASSERT_EQ(*longer, *d);
    }
  }
  EXPECT_GT(hits, 1000);
}

TEST(Collision, Examples) {
  const World empty{Rect{0, 0, 20, 20}, {}};
  EXPECT_FALSE(collision_check(empty, Pose{10, 10, 0}, 0.12));

  World w = empty;
  w.obstacles.push_back(Rect{5, 5, 1, 1});
  EXPECT_TRUE(collision_check(w, Pose{5.5, 5.5, 0}, 0.12));

  // Disc of radius 0.25 tangent to the obstacle's left edge and corner-free.
  EXPECT_FALSE(collision_check(w, Pose{4.75, 5.5, 0}, 0.25));
  EXPECT_TRUE(collision_check(w, Pose{4.7500001, 5.5, 0}, 0.25));
  // Tangent to the bounds.
  EXPECT_FALSE(collision_check(empty, Pose{0.25, 10, 0}, 0.25));
  EXPECT_TRUE(collision_check(empty, Pose{0.2499999, 10, 0}, 0.25));
}

TEST(Collision, CornerUsesEuclideanDistance) {
  World w{Rect{0, 0, 20, 20}, {Rect{5, 5, 1, 1}}};
  // 0.1 m off both edges: corner distance 0.1414 > 0.12.
  EXPECT_FALSE(collision_check(w, Pose{4.9, 4.9, 0}, 0.12));
  EXPECT_TRUE(collision_check(w, Pose{4.95, 4.95, 0}, 0.12));
}

TEST(Angles, NormalizeAndDiff) {
  EXPECT_DOUBLE_EQ(normalize_angle(-std::numbers::pi / 2), 1.5 * std::numbers::pi);
  EXPECT_DOUBLE_EQ(normalize_angle(2 * std::numbers::pi), 0.0);
  EXPECT_NEAR(angle_diff(deg_to_rad(10), deg_to_rad(350)), deg_to_rad(20), 1e-12);
  EXPECT_NEAR(angle_diff(deg_to_rad(350), deg_to_rad(10)), deg_to_rad(-20), 1e-12);
}
