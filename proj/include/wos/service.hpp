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
 * @file service.hpp
 * @brief The networked rover and the session replay server.
 *
 * The simulation still runs in simulated ticks; the loop here only paces
 * them against the wall clock so consoles see real-time motion.
 */
#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <optional>
#include <thread>
#include <vector>

#include "wos/config.hpp"
#include "wos/net/hub.hpp"
#include "wos/net/server.hpp"
#include "wos/session_log.hpp"
#include "wos/simulation.hpp"
#include "wos/world.hpp"

namespace wos {

class RoverService {
 public:
  RoverService(ServiceConfig cfg, World world)
      : sim_(cfg, std::move(world)),
        server_(hub_, endpoint(cfg.listen_tcp), endpoint(cfg.listen_ws),
                net::HttpRoot{cfg.record_dir, cfg.console_dir}, cfg.queue_limit) {}

  ~RoverService() { stop(); }

  /// Runs ticks at tick_hz until stop() or `max_ticks` ticks have elapsed.
  void run(std::optional<std::uint64_t> max_ticks = std::nullopt) {
    server_.start();
    const auto period = std::chrono::duration_cast<std::chrono::steady_clock::duration>(
        std::chrono::duration<double>(sim_.config().dt()));
    auto next = std::chrono::steady_clock::now();
    std::uint64_t done = 0;
    while (!stopping_ && (!max_ticks || done < *max_ticks)) {
      hub_.broadcast(sim_.tick(hub_.drain()));
      ++done;
      next += period;
      std::this_thread::sleep_until(next);
    }
    server_.stop();
  }

  void stop() { stopping_ = true; }

  net::Hub& hub() { return hub_; }
  const Simulation& simulation() const { return sim_; }
  net::NetworkServer& server() { return server_; }

 private:
  static std::optional<net::tcp::endpoint> endpoint(const std::string& s) {
    if (s.empty() || s == "none") return std::nullopt;
    return net::parse_endpoint(s);
  }

  Simulation sim_;
  net::Hub hub_;
  net::NetworkServer server_;
  std::atomic<bool> stopping_{false};
};

/// Re-serves a recorded session at its original tick pacing. Commands from
/// consoles are ignored; playback starts when the first console connects.
class ReplayService {
 public:
  ReplayService(std::vector<proto::Message> messages, int tick_hz, net::tcp::endpoint ws_ep,
                std::optional<std::string> record_dir = std::nullopt)
      : messages_(std::move(messages)),
        tick_hz_(tick_hz),
        server_(hub_, std::nullopt, ws_ep, net::HttpRoot{std::move(record_dir), {}}) {
    hub_.set_ignore_commands(true);
  }

  ~ReplayService() { stop(); }

  void run() {
    server_.start();
    while (!stopping_ && hub_.connection_count() == 0) {
      std::this_thread::sleep_for(std::chrono::milliseconds(10));
    }
    const auto start = std::chrono::steady_clock::now();
    const std::uint64_t first_tick = messages_.empty() ? 0 : *message_tick(messages_.front());
    for (std::size_t i = 0; i < messages_.size() && !stopping_;) {
      const std::uint64_t tick = *message_tick(messages_[i]);
      std::this_thread::sleep_until(
          start + std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                      std::chrono::duration<double>(double(tick - first_tick) / tick_hz_)));
      std::vector<proto::Message> batch;
      while (i < messages_.size() && *message_tick(messages_[i]) == tick) {
        batch.push_back(messages_[i++]);
      }
      hub_.broadcast(batch);
    }
    // Let the last frames drain before tearing the sockets down.
    std::this_thread::sleep_for(std::chrono::milliseconds(200));
    server_.stop();
  }

  void stop() { stopping_ = true; }
  net::NetworkServer& server() { return server_; }

 private:
  std::vector<proto::Message> messages_;
  int tick_hz_;
  net::Hub hub_;
  net::NetworkServer server_;
  std::atomic<bool> stopping_{false};
};

}  // namespace wos
