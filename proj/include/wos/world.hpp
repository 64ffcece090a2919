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
 * @file world.hpp
 * @brief 2D obstacle world, rover pose, bicycle kinematics and ray casting.
 *
 * Everything here is a pure function over value types. The sensors, the
 * collision check and the simulation loop all share the same geometry.
 */
#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace wos {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

inline double deg_to_rad(double deg) { return deg * std::numbers::pi / 180.0; }
inline double rad_to_deg(double rad) { return rad * 180.0 / std::numbers::pi; }

/// Wraps an angle into [0, 2π).
inline double normalize_angle(double a) {
  double r = std::fmod(a, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  // fmod of a tiny negative value can round up to exactly 2π.
  if (r >= kTwoPi) r = 0.0;
  return r;
}

/// Signed shortest difference `to - from`, in (-π, π].
inline double angle_diff(double to, double from) {
  double d = std::remainder(to - from, kTwoPi);
  if (d <= -std::numbers::pi) d += kTwoPi;
  return d;
}

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Vec2&, const Vec2&) = default;
};

/// Axis-aligned rectangle given by its lower-left corner and size.
struct Rect {
  double x = 0.0;
  double y = 0.0;
  double w = 0.0;
  double h = 0.0;

  double min_x() const { return x; }
  double min_y() const { return y; }
  double max_x() const { return x + w; }
  double max_y() const { return y + h; }

  bool contains(const Rect& o) const {
    return o.min_x() >= min_x() && o.min_y() >= min_y() &&
           o.max_x() <= max_x() && o.max_y() <= max_y();
  }
  bool contains(Vec2 p) const {
    return p.x >= min_x() && p.x <= max_x() && p.y >= min_y() && p.y <= max_y();
  }

  friend bool operator==(const Rect&, const Rect&) = default;
};

struct World {
  Rect bounds;
  std::vector<Rect> obstacles;

  friend bool operator==(const World&, const World&) = default;
};

struct Pose {
  double x = 0.0;
  double y = 0.0;
  double heading = 0.0;  ///< radians, [0, 2π)

  friend bool operator==(const Pose&, const Pose&) = default;
};

struct ChassisConfig {
  double wheelbase = 0.15;
  double max_speed = 0.5;
  double max_steer = deg_to_rad(30.0);
  double body_radius = 0.12;
};

/// Commanded motion after actuator dynamics; the kinematic input.
struct DriveState {
  double speed = 0.0;  ///< m/s, signed
  double steer = 0.0;  ///< radians, positive turns counter-clockwise

  friend bool operator==(const DriveState&, const DriveState&) = default;
};

class WorldError : public std::runtime_error {
 public:
  explicit WorldError(const std::string& what, int line = 0)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what
                                    : what),
        line_(line) {}

  /// 1-based line of the offending input, 0 for whole-world validation errors.
  int line() const { return line_; }

 private:
  int line_;
};

inline void validate_world(const World& world) {
  const Rect& b = world.bounds;
  if (!(std::isfinite(b.w) && std::isfinite(b.h) && b.w > 0.0 && b.h > 0.0)) {
    throw WorldError("bounds must have positive width and height");
  }
  for (std::size_t i = 0; i < world.obstacles.size(); ++i) {
    const Rect& r = world.obstacles[i];
    if (!(r.w > 0.0 && r.h > 0.0)) {
      throw WorldError("obstacle " + std::to_string(i) + " has non-positive size");
    }
    if (!b.contains(r)) {
      throw WorldError("obstacle " + std::to_string(i) + " exceeds world bounds");
    }
  }
}

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto ws = " \t\r";
  auto first = s.find_first_not_of(ws);
  if (first == std::string_view::npos) return {};
  auto last = s.find_last_not_of(ws);
  return s.substr(first, last - first + 1);
}

inline std::vector<double> parse_numbers(std::istringstream& in, std::size_t n,
                                         std::string_view keyword, int line) {
  std::vector<double> out;
  std::string tok;
  while (in >> tok) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(tok, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != tok.size() || !std::isfinite(v)) {
      throw WorldError("bad number '" + tok + "'", line);
    }
    out.push_back(v);
  }
  if (out.size() != n) {
    throw WorldError("'" + std::string(keyword) + "' expects " + std::to_string(n) +
                         " numbers, got " + std::to_string(out.size()),
                     line);
  }
  return out;
}

}  // namespace detail

/// Parses a world file: `bounds <w> <h>` on line 1, then `rect <x> <y> <w> <h>`
/// lines. Blank lines and `#` comments are skipped after the first line.
inline World load_world(std::string_view text) {
  World world;
  bool have_bounds = false;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto nl = text.find('\n', pos);
    std::string_view raw =
        text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;

    std::string_view line = detail::trim(raw);
    if (line_no == 1) {
      if (line.empty() || line.front() == '#') {
        throw WorldError("first line must be 'bounds <w> <h>'", line_no);
      }
    } else if (line.empty() || line.front() == '#') {
      continue;
    }

    std::istringstream in{std::string(line)};
    std::string keyword;
    in >> keyword;
    if (keyword == "bounds") {
      if (line_no != 1) throw WorldError("'bounds' must be the first line", line_no);
      auto v = detail::parse_numbers(in, 2, keyword, line_no);
      if (!(v[0] > 0.0 && v[1] > 0.0)) {
        throw WorldError("bounds must be positive", line_no);
      }
      world.bounds = Rect{0.0, 0.0, v[0], v[1]};
      have_bounds = true;
    } else if (keyword == "rect") {
      if (!have_bounds) throw WorldError("first line must be 'bounds <w> <h>'", line_no);
      auto v = detail::parse_numbers(in, 4, keyword, line_no);
      Rect r{v[0], v[1], v[2], v[3]};
      if (!(r.w > 0.0 && r.h > 0.0)) throw WorldError("rect size must be positive", line_no);
      if (!world.bounds.contains(r)) {
        throw WorldError("obstacle exceeds world bounds", line_no);
      }
      world.obstacles.push_back(r);
    } else if (line_no == 1) {
      throw WorldError("first line must be 'bounds <w> <h>'", line_no);
    } else {
      throw WorldError("unknown keyword '" + keyword + "'", line_no);
    }
  }
  if (!have_bounds) throw WorldError("missing 'bounds' line", 1);
  return world;
}

/// One kinematic step of the front-steer bicycle model.
///
/// Position advances along the mid-step heading, which is exact to second
/// order for constant inputs; with zero steer this is the plain straight-line
/// update and the heading is untouched.
inline Pose step_kinematics(const Pose& pose, const DriveState& drive,
                            const ChassisConfig& cfg, double dt) {
  const double yaw_delta = drive.speed * std::tan(drive.steer) / cfg.wheelbase * dt;
  const double travel = drive.speed * dt;
  const double mid = pose.heading + 0.5 * yaw_delta;
  Pose next;
  next.x = pose.x + travel * std::cos(mid);
  next.y = pose.y + travel * std::sin(mid);
  next.heading = yaw_delta == 0.0 ? pose.heading : normalize_angle(pose.heading + yaw_delta);
  return next;
}

/// Distance along the ray to the boundary of `r`, or nullopt if the ray
/// misses it. A ray starting inside the rectangle reports its exit edge.
inline std::optional<double> ray_rect(Vec2 origin, Vec2 dir, const Rect& r) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  double t_enter = -inf;
  double t_exit = inf;

  const double o[2] = {origin.x, origin.y};
  const double d[2] = {dir.x, dir.y};
  const double lo[2] = {r.min_x(), r.min_y()};
  const double hi[2] = {r.max_x(), r.max_y()};
  for (int axis = 0; axis < 2; ++axis) {
    if (d[axis] == 0.0) {
      if (o[axis] < lo[axis] || o[axis] > hi[axis]) return std::nullopt;
      continue;
    }
    double t0 = (lo[axis] - o[axis]) / d[axis];
    double t1 = (hi[axis] - o[axis]) / d[axis];
    if (t0 > t1) std::swap(t0, t1);
    t_enter = std::max(t_enter, t0);
    t_exit = std::min(t_exit, t1);
  }
  if (t_enter > t_exit) return std::nullopt;
  if (t_enter >= 0.0) return t_enter;
  if (t_exit >= 0.0 && std::isfinite(t_exit)) return t_exit;
  return std::nullopt;
}

/// Nearest hit of the ray against every obstacle edge and the world bounds,
/// or nullopt when nothing lies within `max_range`.
inline std::optional<double> raycast(const World& world, Vec2 origin, Vec2 direction,
                                     double max_range) {
  std::optional<double> best;
  auto consider = [&](const Rect& r) {
    if (auto t = ray_rect(origin, direction, r); t && *t <= max_range) {
      if (!best || *t < *best) best = t;
    }
  };
  consider(world.bounds);
  for (const Rect& r : world.obstacles) consider(r);
  return best;
}

/// True when the rover disc strictly overlaps an obstacle or leaves the bounds.
/// Tangency is not a collision.
inline bool collision_check(const World& world, const Pose& pose, double body_radius) {
  const Rect& b = world.bounds;
  if (pose.x - body_radius < b.min_x() || pose.x + body_radius > b.max_x() ||
      pose.y - body_radius < b.min_y() || pose.y + body_radius > b.max_y()) {
    return true;
  }
  const double r2 = body_radius * body_radius;
  for (const Rect& r : world.obstacles) {
    const double cx = std::clamp(pose.x, r.min_x(), r.max_x());
    const double cy = std::clamp(pose.y, r.min_y(), r.max_y());
    const double dx = pose.x - cx;
    const double dy = pose.y - cy;
    if (dx * dx + dy * dy < r2) return true;
  }
  return false;
}

}  // namespace wos
