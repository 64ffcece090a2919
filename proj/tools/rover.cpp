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

// rover: run the simulated rover, replay recorded sessions, check world files.

#include <CLI11.hpp>

#include <atomic>
#include <chrono>
#include <csignal>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <iterator>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <variant>

#include "wos/config.hpp"
#include "wos/service.hpp"
#include "wos/session_log.hpp"
#include "wos/simulation.hpp"
#include "wos/world.hpp"

namespace {

std::atomic<bool> g_interrupted{false};

void on_signal(int) { g_interrupted = true; }

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

std::string describe(const wos::proto::Message& m) {
  using namespace wos::proto;
  std::ostringstream os;
  std::visit(
      [&](const auto& v) {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Telemetry>) {
          os << v.tick << " TELEMETRY x=" << v.x << " y=" << v.y << " heading=" << v.heading
             << " speed=" << v.speed << " range_cm=" << v.range_cm << " battery_mv=" << v.battery_mv
             << " mode=" << int(v.mode) << " phase=" << int(v.phase) << " pan=" << v.pan
             << " tilt=" << int(v.tilt);
        } else if constexpr (std::is_same_v<T, VideoFrame>) {
          os << v.tick << " VIDEO pan=" << v.pan << " " << v.width << "x" << v.height;
        } else if constexpr (std::is_same_v<T, Event>) {
          os << v.tick << " EVENT code=" << int(v.code) << " detail=" << int(v.detail);
        } else {
          os << "COMMAND " << to_hex(encode(m));
        }
      },
      m);
  return os.str();
}

int run_command(const std::string& config_path, const std::optional<std::string>& world_path,
                const std::optional<std::uint64_t>& seed, const std::optional<std::string>& record,
                const std::optional<std::string>& script_path,
                const std::optional<std::uint64_t>& ticks) {
  wos::ServiceConfig cfg = wos::parse_config(slurp(config_path));
  if (world_path) cfg.world_path = *world_path;
  if (seed) cfg.seed = *seed;
  if (record) cfg.record_dir = *record;
  if (cfg.world_path.empty()) throw std::runtime_error("no world file (set 'world' or --world)");

  std::filesystem::path world_file(cfg.world_path);
  if (world_file.is_relative() && !world_path && !std::filesystem::exists(world_file)) {
    world_file = std::filesystem::path(config_path).parent_path() / world_file;
  }
  wos::World world = wos::load_world(slurp(world_file.string()));

  if (script_path) {
    const auto script = wos::parse_command_script(slurp(*script_path));
    const std::uint64_t n = ticks.value_or(5000);
    wos::Simulation sim(cfg, std::move(world));
    const auto log = sim.log_path();
    const std::uint64_t emitted = wos::run_headless(sim, script, n);
    std::cout << "ran " << n << " ticks, " << emitted << " messages, " << sim.collisions()
              << " collision ticks\n";
    const auto& p = sim.pose();
    std::cout << "final pose x=" << p.x << " y=" << p.y << " heading=" << p.heading << "\n";
    if (log) std::cout << "session log " << log->string() << "\n";
    return 0;
  }

  wos::RoverService service(cfg, std::move(world));
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  std::thread watcher([&] {
    while (!g_interrupted) std::this_thread::sleep_for(std::chrono::milliseconds(50));
    service.stop();
  });
  std::cout << "rover running: tcp port " << service.server().tcp_port().value_or(0)
            << ", ws/http port " << service.server().ws_port().value_or(0) << std::endl;
  service.run(ticks);
  g_interrupted = true;
  watcher.join();
  return 0;
}

int replay_command(const std::string& log_path, const std::optional<std::string>& listen_ws,
                   const std::optional<std::string>& config_path, std::optional<int> tick_hz,
                   bool dump) {
  auto messages = wos::replay(log_path);
  if (dump || !listen_ws) {
    for (const auto& m : messages) std::cout << describe(m) << "\n";
    return 0;
  }
  int hz = 50;
  if (config_path) hz = wos::parse_config(slurp(*config_path)).tick_hz;
  if (tick_hz) hz = *tick_hz;
  wos::ReplayService service(std::move(messages), hz, wos::net::parse_endpoint(*listen_ws));
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  std::thread watcher([&] {
    while (!g_interrupted) std::this_thread::sleep_for(std::chrono::milliseconds(50));
    service.stop();
  });
  std::cout << "replay serving on ws port " << service.server().ws_port().value_or(0)
            << ", waiting for a console" << std::endl;
  service.run();
  g_interrupted = true;
  watcher.join();
  return 0;
}

int worldcheck_command(const std::string& path) {
  const wos::World w = wos::load_world(slurp(path));
  std::cout << "ok: bounds " << w.bounds.w << " x " << w.bounds.h << ", " << w.obstacles.size()
            << " obstacle(s)\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Wildlife observation rover simulator"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "Run the rover (networked, or headless with a script)");
  std::string config_path;
  std::optional<std::string> world_path, record_dir, script_path;
  std::optional<std::uint64_t> seed, ticks;
  run->add_option("--config", config_path, "Service configuration file")->required();
  run->add_option("--world", world_path, "World file (overrides the config)");
  run->add_option("--seed", seed, "Noise seed");
  run->add_option("--record", record_dir, "Directory for session logs and snapshots");
  run->add_option("--headless-script", script_path, "Run offline with a command script");
  run->add_option("--ticks", ticks, "Stop after N ticks");

  auto* rep = app.add_subcommand("replay", "Serve or print a recorded session");
  std::string log_path;
  std::optional<std::string> listen_ws, replay_config;
  std::optional<int> tick_hz;
  bool dump = false;
  rep->add_option("--log", log_path, "Session log file")->required();
  rep->add_option("--listen-ws", listen_ws, "host:port for the WebSocket/HTTP endpoint");
  rep->add_option("--config", replay_config, "Take tick_hz from this configuration");
  rep->add_option("--tick-hz", tick_hz, "Playback tick rate");
  rep->add_flag("--dump", dump, "Print the records instead of serving them");

  auto* check = app.add_subcommand("worldcheck", "Validate a world file");
  std::string check_path;
  check->add_option("file", check_path, "World file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      return run_command(config_path, world_path, seed, record_dir, script_path, ticks);
    }
    if (rep->parsed()) return replay_command(log_path, listen_ws, replay_config, tick_hz, dump);
    if (check->parsed()) return worldcheck_command(check_path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
