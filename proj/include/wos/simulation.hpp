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
 * @file simulation.hpp
 * @brief Fixed-tick rover simulation composing world, hardware, sensing and
 * autonomy, plus session recording and snapshots.
 *
 * Simulated time only: tick N happens at N / tick_hz seconds no matter how
 * fast the host runs it. The class is single-threaded; the network layer
 * feeds it commands and fans its output out.
 */
#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "wos/autonomy.hpp"
#include "wos/config.hpp"
#include "wos/hardware.hpp"
#include "wos/protocol.hpp"
#include "wos/sensing.hpp"
#include "wos/session_log.hpp"
#include "wos/world.hpp"

namespace wos {

inline proto::VideoFrame to_wire(const Frame& f) {
  long pan = std::lround(f.pan) % 360;
  return proto::VideoFrame{f.tick, static_cast<std::uint16_t>(pan),
                           static_cast<std::uint16_t>(f.width),
                           static_cast<std::uint16_t>(f.height), f.pixels};
}

class Simulation {
 public:
  Simulation(ServiceConfig cfg, World world)
      : cfg_(std::move(cfg)), world_(std::move(world)), rng_(cfg_.seed) {
    validate_config(cfg_);
    autonomy_params_ = cfg_.effective_autonomy();
    validate_world(world_);
    pose_ = cfg_.start_pose.value_or(Pose{world_.bounds.x + world_.bounds.w / 2,
                                          world_.bounds.y + world_.bounds.h / 2, 0.0});
    pose_.heading = normalize_angle(pose_.heading);
    battery_ = make_battery(cfg_.power.capacity_ah,
                            cfg_.power.initial_ah.value_or(cfg_.power.capacity_ah),
                            cfg_.power.battery);
    rail_ = regulate(battery_.voltage, cfg_.power.dropout);
    mode_ = cfg_.initial_mode;
    timeout_ticks_ = static_cast<std::uint64_t>(std::llround(cfg_.command_timeout * cfg_.tick_hz));
    if (cfg_.record_dir && cfg_.autorecord) start_recording(nullptr);
  }

  ~Simulation() { stop_recording(); }

  Simulation(const Simulation&) = delete;
  Simulation& operator=(const Simulation&) = delete;

  /// Advances one tick. `inbound` holds commands already accepted from the
  /// driver console, in arrival order. Returns everything emitted this tick.
  std::vector<proto::Message> tick(std::span<const proto::Message> inbound = {}) {
    std::vector<proto::Message> out;
    const double dt = cfg_.dt();

    // 1. operator commands
    for (const auto& m : inbound) apply_command(m, out);

    // 2. sense
    reading_ = read_ultrasonic(world_, pose_, cfg_.chassis.body_radius, cfg_.ultrasonic, rng_,
                               tick_);

    // 3. autonomy
    DriveCommand auto_cmd{0, 0};
    if (mode_ == DriveMode::kAuto) {
      AutonomyStep step = step_autonomy(autonomy_, reading_, pose_, autonomy_params_);
      autonomy_ = step.state;
      auto_cmd = step.command;
      if (step.became_blocked) out.push_back(proto::make_event(tick_, proto::EventCode::kBlocked));
    }

    // 4. arbitrate, with the deadman applied to the latched operator command
    std::optional<DriveCommand> op;
    if (latched_ && tick_ - latched_tick_ <= timeout_ticks_) op = latched_;
    command_ = arbitrate(mode_, op, auto_cmd);

    // 5-7. actuate, move, collide
    drive_ = apply_drive_command(command_, drive_, cfg_.chassis, cfg_.slew, dt);
    Pose next = step_kinematics(pose_, drive_, cfg_.chassis, dt);
    const bool hit = collision_check(world_, next, cfg_.chassis.body_radius);
    if (hit) {
      drive_.speed = 0.0;
      ++collisions_;
      if (!in_contact_) out.push_back(proto::make_event(tick_, proto::EventCode::kCollision));
    } else {
      pose_ = next;
    }
    in_contact_ = hit;

    // 8. power
    battery_ = step_battery(battery_, load_current(drive_, cfg_.chassis, !rail_.brownout, cfg_.power.load),
                            dt, cfg_.power.battery);
    const PowerRail rail = regulate(battery_.voltage, cfg_.power.dropout);
    if (rail.brownout && !rail_.brownout) {
      out.push_back(proto::make_event(tick_, proto::EventCode::kBrownout));
    }
    rail_ = rail;

    // 9. telemetry
    if (tick_ % static_cast<std::uint64_t>(cfg_.telemetry_every) == 0) {
      out.push_back(telemetry());
    }

    // 10. video, camera powered by the buck rail
    if (tick_ % static_cast<std::uint64_t>(cfg_.frame_every) == 0 && !rail_.brownout) {
      frame_ = render_frame(world_, pose_, gimbal_, tick_, cfg_.camera);
      out.push_back(to_wire(*frame_));
    }

    // 11. record
    if (log_) {
      for (const auto& m : out) log_->append(m);
      if (stop_after_tick_) stop_recording();
    }
    ++tick_;
    return out;
  }

  proto::Telemetry telemetry() const {
    proto::Telemetry t;
    t.tick = tick_;
    t.x = static_cast<float>(pose_.x);
    t.y = static_cast<float>(pose_.y);
    t.heading = static_cast<float>(pose_.heading);
    t.speed = static_cast<float>(drive_.speed);
    t.range_cm = reading_.range
                     ? static_cast<std::uint16_t>(std::min(std::llround(*reading_.range * 100.0), 0xFFFEll))
                     : proto::kRangeOutOfRange;
    t.battery_mv = static_cast<std::uint16_t>(
        std::clamp(std::llround(battery_.voltage * 1000.0), 0ll, 0xFFFFll));
    t.mode = static_cast<std::uint8_t>(mode_);
    t.phase = static_cast<std::uint8_t>(autonomy_.phase);
    t.pan = static_cast<std::uint16_t>(std::lround(gimbal_.pan) % 360);
    t.tilt = static_cast<std::int8_t>(std::lround(gimbal_.tilt));
    return t;
  }

  std::uint64_t current_tick() const { return tick_; }
  const Pose& pose() const { return pose_; }
  const DriveState& drive() const { return drive_; }
  const DriveCommand& last_command() const { return command_; }
  const Battery& battery() const { return battery_; }
  const PowerRail& rail() const { return rail_; }
  const GimbalState& gimbal() const { return gimbal_; }
  const AutonomyState& autonomy() const { return autonomy_; }
  const UltrasonicReading& reading() const { return reading_; }
  const std::optional<Frame>& last_frame() const { return frame_; }
  DriveMode mode() const { return mode_; }
  const World& world() const { return world_; }
  const ServiceConfig& config() const { return cfg_; }
  std::uint64_t collisions() const { return collisions_; }
  bool recording() const { return log_ != nullptr; }
  std::optional<std::filesystem::path> log_path() const {
    return log_ ? std::optional(log_->path()) : std::nullopt;
  }

 private:
  void apply_command(const proto::Message& m, std::vector<proto::Message>& out) {
    using proto::EventCode;
    const auto reject = [&] {
      out.push_back(proto::make_event(tick_, EventCode::kCmdRejected,
                                      static_cast<std::uint8_t>(proto::type_of(m))));
    };
    if (const auto* d = std::get_if<proto::CmdDrive>(&m)) {
      DriveCommand c{d->throttle, d->steer};
      const DriveCommand raw = c;
      if (clamp_command(c)) {
        const std::uint8_t which = (raw.throttle != c.throttle ? 1 : 0) | (raw.steer != c.steer ? 2 : 0);
        out.push_back(proto::make_event(tick_, EventCode::kCmdClamped, which));
      }
      latched_ = c;
      latched_tick_ = tick_;
    } else if (const auto* cam = std::get_if<proto::CmdCamera>(&m)) {
      gimbal_ = pan_camera(gimbal_, cam->delta_pan, cam->delta_tilt);
    } else if (const auto* mode = std::get_if<proto::CmdMode>(&m)) {
      if (mode->mode > 1) return reject();
      const auto next = static_cast<DriveMode>(mode->mode);
      if (next != mode_) {
        mode_ = next;
        autonomy_ = AutonomyState{};
        out.push_back(proto::make_event(tick_, EventCode::kModeChanged, mode->mode));
      }
    } else if (const auto* rec = std::get_if<proto::CmdRecord>(&m)) {
      switch (static_cast<proto::RecordAction>(rec->action)) {
        case proto::RecordAction::kStart:
          if (!log_) start_recording(&out);
          break;
        case proto::RecordAction::kStop:
          if (log_) {
            out.push_back(proto::make_event(tick_, EventCode::kRecordStop));
            stop_after_tick_ = true;
          }
          break;
        case proto::RecordAction::kSnapshot:
          snapshot(out);
          break;
        default:
          reject();
      }
    } else {
      reject();
    }
  }

  void start_recording(std::vector<proto::Message>* out) {
    const auto err = [&] {
      if (out) out->push_back(proto::make_event(tick_, proto::EventCode::kRecordError));
    };
    if (!cfg_.record_dir) return err();
    try {
      std::filesystem::create_directories(*cfg_.record_dir);
      auto path = std::filesystem::path(*cfg_.record_dir) /
                  ("session_" + std::to_string(tick_) + std::string(kSessionExtension));
      log_ = std::make_unique<SessionLogWriter>(path);
      stop_after_tick_ = false;
      if (out) out->push_back(proto::make_event(tick_, proto::EventCode::kRecordStart));
    } catch (const std::exception&) {
      err();
    }
  }

  void stop_recording() {
    if (log_) log_->flush();
    log_.reset();
    stop_after_tick_ = false;
  }

  void snapshot(std::vector<proto::Message>& out) {
    using proto::EventCode;
    if (!frame_ || !cfg_.record_dir) {
      out.push_back(proto::make_event(tick_, EventCode::kRecordError));
      return;
    }
    std::error_code ec;
    std::filesystem::create_directories(*cfg_.record_dir, ec);
    auto path = std::filesystem::path(*cfg_.record_dir) / ("snap_" + std::to_string(tick_) + ".pgm");
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    const std::string pgm = to_pgm(*frame_);
    f.write(pgm.data(), static_cast<std::streamsize>(pgm.size()));
    f.close();
    out.push_back(proto::make_event(tick_, f ? EventCode::kSnapshot : EventCode::kRecordError));
  }

  ServiceConfig cfg_;
  AutonomyParams autonomy_params_;
  World world_;
  NoiseSource rng_;

  std::uint64_t tick_ = 0;
  Pose pose_;
  DriveState drive_;
  DriveCommand command_;
  Battery battery_;
  PowerRail rail_;
  GimbalState gimbal_;
  DriveMode mode_ = DriveMode::kManual;
  AutonomyState autonomy_;
  UltrasonicReading reading_;
  std::optional<Frame> frame_;

  std::optional<DriveCommand> latched_;
  std::uint64_t latched_tick_ = 0;
  std::uint64_t timeout_ticks_ = 0;

  bool in_contact_ = false;
  std::uint64_t collisions_ = 0;

  std::unique_ptr<SessionLogWriter> log_;
  bool stop_after_tick_ = false;
};

/// Headless command script: `<tick> <wire-frame-as-hex>` per line, `#` comments.
using CommandScript = std::map<std::uint64_t, std::vector<proto::Message>>;

class ScriptError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline CommandScript parse_command_script(std::string_view text) {
  CommandScript script;
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto body = detail::trim(line);
    if (body.empty() || body.front() == '#') continue;
    auto where = [&](const std::string& what) {
      return ScriptError("script line " + std::to_string(line_no) + ": " + what);
    };
    std::istringstream fields{std::string(body)};
    std::string tick_tok;
    fields >> tick_tok;
    std::uint64_t tick = 0;
    try {
      std::size_t used = 0;
      tick = std::stoull(tick_tok, &used);
      if (used != tick_tok.size()) throw std::invalid_argument("tick");
    } catch (const std::exception&) {
      throw where("bad tick '" + tick_tok + "'");
    }
    std::string rest;
    std::getline(fields, rest);
    std::vector<std::uint8_t> bytes;
    try {
      bytes = proto::from_hex(rest);
    } catch (const std::exception& e) {
      throw where(e.what());
    }
    std::span<const std::uint8_t> view(bytes);
    if (view.empty()) throw where("missing message bytes");
    while (!view.empty()) {
      auto res = proto::decode(view);
      if (auto* d = std::get_if<proto::Decoded>(&res)) {
        if (!proto::is_command(d->message)) throw where("only command messages may be scripted");
        script[tick].push_back(d->message);
        view = view.subspan(d->consumed);
      } else if (auto* e = std::get_if<proto::DecodeError>(&res)) {
        throw where(std::string("undecodable message: ") + proto::to_string(e->code));
      } else {
        throw where("truncated message");
      }
    }
  }
  return script;
}

/// Runs `ticks` ticks with scripted commands. Returns the number of messages emitted.
inline std::uint64_t run_headless(Simulation& sim, const CommandScript& script, std::uint64_t ticks) {
  std::uint64_t emitted = 0;
  static const std::vector<proto::Message> none;
  for (std::uint64_t i = 0; i < ticks; ++i) {
    auto it = script.find(sim.current_tick());
    emitted += sim.tick(it == script.end() ? none : it->second).size();
  }
  return emitted;
}

}  // namespace wos
