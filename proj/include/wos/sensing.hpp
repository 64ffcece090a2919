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
 * @file sensing.hpp
 * @brief Forward ultrasonic ranger and the pan/tilt depth-strip camera.
 */
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "wos/world.hpp"

namespace wos {

inline constexpr double kSpeedOfSound = 343.0;  // m/s
inline constexpr int kUltrasonicRays = 5;

struct UltrasonicConfig {
  double max_range = 4.0;
  double beam_halfwidth_deg = 7.5;
  double quantum = 0.01;
  double noise_sigma = 0.0;
};

struct UltrasonicReading {
  std::optional<double> range;  ///< nullopt means out of range
  std::uint64_t tick = 0;

  bool in_range() const { return range.has_value(); }
  friend bool operator==(const UltrasonicReading&, const UltrasonicReading&) = default;
};

/// Round half-up to a multiple of `quantum`.
inline double quantize(double value, double quantum) {
  return std::floor(value / quantum + 0.5) * quantum;
}

/**
 * Seeded Gaussian source for sensor noise.
 *
 * std::normal_distribution is implementation-defined, so the transform is
 * spelled out: mt19937_64 draws mapped to (0, 1] by their top 53 bits, then
 * Box-Muller, using the cosine branch only (one engine pair per sample).
 */
class NoiseSource {
 public:
  explicit NoiseSource(std::uint64_t seed = 0) : engine_(seed) {}

  double gaussian(double sigma) {
    const double u1 = unit();
    const double u2 = unit();
    return sigma * std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
  }

 private:
  double unit() { return (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53; }

  std::mt19937_64 engine_;
};

inline UltrasonicReading read_ultrasonic(const World& world, const Pose& pose,
                                         double body_radius, const UltrasonicConfig& cfg,
                                         NoiseSource& rng, std::uint64_t tick = 0) {
  const Vec2 nose{pose.x + body_radius * std::cos(pose.heading),
                  pose.y + body_radius * std::sin(pose.heading)};
  const double half = deg_to_rad(cfg.beam_halfwidth_deg);

  std::optional<double> nearest;
  for (int i = 0; i < kUltrasonicRays; ++i) {
    const double offset = -half + 2.0 * half * i / (kUltrasonicRays - 1);
    const double a = pose.heading + offset;
    if (auto t = raycast(world, nose, {std::cos(a), std::sin(a)}, cfg.max_range)) {
      if (!nearest || *t < *nearest) nearest = t;
    }
  }

  UltrasonicReading out{std::nullopt, tick};
  if (!nearest) return out;
  double d = *nearest;
  if (cfg.noise_sigma > 0.0) d += rng.gaussian(cfg.noise_sigma);
  d = std::max(0.0, quantize(d, cfg.quantum));
  if (d > cfg.max_range) return out;
  out.range = d;
  return out;
}

/// HC-SR04 convention: the echo covers the distance twice.
inline double echo_timeout_us(double max_range) { return 2.0 * max_range / kSpeedOfSound * 1e6; }

inline std::optional<double> echo_to_distance(double echo_us, double max_range = 4.0) {
  if (echo_us > echo_timeout_us(max_range)) return std::nullopt;
  return kSpeedOfSound * (echo_us * 1e-6) / 2.0;
}

inline constexpr double kTiltLimitDeg = 30.0;

struct GimbalState {
  double pan = 0.0;   ///< degrees, [0, 360)
  double tilt = 0.0;  ///< degrees, [-30, 30]

  friend bool operator==(const GimbalState&, const GimbalState&) = default;
};

inline GimbalState pan_camera(const GimbalState& g, double delta_pan, double delta_tilt) {
  double pan = std::fmod(g.pan + delta_pan, 360.0);
  if (pan < 0.0) pan += 360.0;
  if (pan >= 360.0) pan = 0.0;
  return {pan, std::clamp(g.tilt + delta_tilt, -kTiltLimitDeg, kTiltLimitDeg)};
}

struct CameraConfig {
  int width = 120;
  int height = 90;
  double fov_deg = 60.0;
  double max_range = 8.0;
};

struct Frame {
  std::uint64_t tick = 0;
  double pan = 0.0;
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;  ///< row-major, top row first

  friend bool operator==(const Frame&, const Frame&) = default;
};

inline std::uint8_t depth_shade(double depth, double max_range) {
  const double s = 255.0 * (1.0 - std::min(depth, max_range) / max_range);
  return static_cast<std::uint8_t>(std::clamp(std::floor(s + 0.5), 0.0, 255.0));
}

/// Depth-strip render: one ray per column from the rover centre, each column
/// shaded by inverse depth. Tilt is carried but has no effect in a 2D world.
inline Frame render_frame(const World& world, const Pose& pose, const GimbalState& gimbal,
                          std::uint64_t tick, const CameraConfig& cam = {}) {
  Frame f{tick, gimbal.pan, cam.width, cam.height,
          std::vector<std::uint8_t>(static_cast<std::size_t>(cam.width) * cam.height)};
  const double fov = deg_to_rad(cam.fov_deg);
  const double base = pose.heading + deg_to_rad(gimbal.pan);
  const Vec2 origin{pose.x, pose.y};
  for (int c = 0; c < cam.width; ++c) {
    const double frac = cam.width > 1 ? static_cast<double>(c) / (cam.width - 1) - 0.5 : 0.0;
    const double a = base + fov * frac;
    const double depth = raycast(world, origin, {std::cos(a), std::sin(a)}, cam.max_range)
                             .value_or(cam.max_range);
    const std::uint8_t shade = depth_shade(depth, cam.max_range);
    for (int r = 0; r < cam.height; ++r) {
      f.pixels[static_cast<std::size_t>(r) * cam.width + c] = shade;
    }
  }
  return f;
}

/// Binary PGM (P5, maxval 255).
inline std::string to_pgm(const Frame& f) {
  std::string out = "P5\n" + std::to_string(f.width) + " " + std::to_string(f.height) + "\n255\n";
  out.append(reinterpret_cast<const char*>(f.pixels.data()), f.pixels.size());
  return out;
}

}  // namespace wos
