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


// Shared fixtures for the test binaries: oracles, generators, temp dirs.
#pragma once

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <random>
#include <string>
#include <vector>

#include "wos/protocol.hpp"
#include "wos/world.hpp"

namespace wos::test {

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

inline std::filesystem::path data_path(const std::string& rel) {
  return std::filesystem::path(WOS_DATA_DIR) / rel;
}

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static std::uint64_t counter = 0;
    const auto stamp = std::chrono::steady_clock::now().time_since_epoch().count();
    path_ = std::filesystem::temp_directory_path() /
            ("wos_" + tag + "_" + std::to_string(stamp) + "_" + std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::string str() const { return path_.string(); }

 private:
  std::filesystem::path path_;
};

/// Forward Euler with a small step, used as the reference trajectory.
struct EulerOracle {
  double x, y, h;
  void run(double v, double steer, double wheelbase, double dt, double duration) {
    const auto n = static_cast<long long>(std::llround(duration / dt));
    for (long long i = 0; i < n; ++i) {
      x += v * std::cos(h) * dt;
      y += v * std::sin(h) * dt;
      h += v * std::tan(steer) / wheelbase * dt;
    }
  }
};

/// Point-in-rect ray march, slow but independent of the slab code.
inline double march_ray(const World& w, Vec2 o, double angle, double max_range, double step) {
  const double c = std::cos(angle), s = std::sin(angle);
  for (double t = 0.0; t <= max_range; t += step) {
    const double px = o.x + c * t, py = o.y + s * t;
    if (px <= w.bounds.x || px >= w.bounds.x + w.bounds.w || py <= w.bounds.y ||
        py >= w.bounds.y + w.bounds.h) {
      return t;
    }
    for (const auto& r : w.obstacles) {
      if (px >= r.x && px <= r.x + r.w && py >= r.y && py <= r.y + r.h) return t;
    }
  }
  return INFINITY;
}

/**
 * Random world used for the collision-freedom runs: 20 x 20 m, 10 to 30
 * axis-aligned obstacles of 0.3 to 2.0 m sides. The rover start pose
 * (centre, heading 0) is kept clear by 1.5 m.
 */
inline World random_world(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> count(10, 30);
  std::uniform_real_distribution<double> side(0.3, 2.0);
  World w;
  w.bounds = Rect{0, 0, 20, 20};
  const int n = count(rng);
  const Vec2 start{10, 10};
  while (static_cast<int>(w.obstacles.size()) < n) {
    const double rw = side(rng), rh = side(rng);
    std::uniform_real_distribution<double> px(0.0, 20.0 - rw), py(0.0, 20.0 - rh);
    Rect r{px(rng), py(rng), rw, rh};
    const double cx = std::clamp(start.x, r.x, r.x + r.w);
    const double cy = std::clamp(start.y, r.y, r.y + r.h);
    if (std::hypot(cx - start.x, cy - start.y) < 1.5) continue;
    w.obstacles.push_back(r);
  }
  return w;
}

/// Uniformly random message of any type, with arbitrary field bits.
inline proto::Message random_message(std::mt19937_64& rng) {
  using namespace proto;
  auto u8 = [&] { return static_cast<std::uint8_t>(rng()); };
  auto u16 = [&] { return static_cast<std::uint16_t>(rng()); };
  auto f32 = [&] { return std::bit_cast<float>(static_cast<std::uint32_t>(rng())); };
  switch (rng() % 7) {
    case 0: return CmdDrive{static_cast<std::int8_t>(u8()), static_cast<std::int8_t>(u8())};
    case 1: return CmdCamera{static_cast<std::int16_t>(u16()), static_cast<std::int8_t>(u8())};
    case 2: return CmdMode{u8()};
    case 3: return CmdRecord{u8()};
    case 4: {
      Telemetry t;
      t.tick = rng();
      t.x = f32();
      t.y = f32();
      t.heading = f32();
      t.speed = f32();
      t.range_cm = u16();
      t.battery_mv = u16();
      t.mode = u8();
      t.phase = u8();
      t.pan = u16();
      t.tilt = static_cast<std::int8_t>(u8());
      return t;
    }
    case 5: {
      VideoFrame v;
      v.tick = rng();
      v.pan = u16();
      v.width = static_cast<std::uint16_t>(rng() % 40);
      v.height = static_cast<std::uint16_t>(rng() % 30);
      v.pixels.resize(std::size_t(v.width) * v.height);
      for (auto& p : v.pixels) p = u8();
      return v;
    }
    default: return Event{rng(), u8(), u8()};
  }
}

}  // namespace wos::test
