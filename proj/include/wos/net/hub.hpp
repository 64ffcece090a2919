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
 * @file hub.hpp
 * @brief Transport-independent fan-in/fan-out between consoles and the
 * simulation loop.
 *
 * The hub is the only state shared between the network threads and the
 * simulation thread: an inbound command queue and the set of attached
 * connections. The first attached console is the driver; everyone else
 * observes. Drive, mode and record commands from observers are answered
 * with Event(CMD_REJECTED) and never reach the simulation.
 */
#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <deque>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <vector>

#include "wos/protocol.hpp"

namespace wos::net {

/// An encoded wire frame shared by every connection it is sent to.
struct Outgoing {
  proto::MsgType type = proto::MsgType::kEvent;
  std::shared_ptr<const std::vector<std::uint8_t>> bytes;
};

inline Outgoing make_outgoing(const proto::Message& m) {
  return Outgoing{proto::type_of(m),
                  std::make_shared<const std::vector<std::uint8_t>>(proto::encode(m))};
}

/**
 * Bounded per-connection send queue.
 *
 * When full, the oldest queued VideoFrame is dropped to make room. If there
 * is no video to drop, an incoming VideoFrame is discarded instead, while
 * Telemetry and Event are always kept even if that takes the queue past its
 * limit.
 */
class OutboundQueue {
 public:
  explicit OutboundQueue(std::size_t limit = 64) : limit_(limit) {}

  void push(Outgoing item) {
    if (items_.size() >= limit_) {
      auto video = std::find_if(items_.begin(), items_.end(), [](const Outgoing& o) {
        return o.type == proto::MsgType::kVideoFrame;
      });
      if (video != items_.end()) {
        items_.erase(video);
        ++dropped_;
      } else if (item.type == proto::MsgType::kVideoFrame) {
        ++dropped_;
        return;
      }
    }
    items_.push_back(std::move(item));
  }

  bool empty() const { return items_.empty(); }
  std::size_t size() const { return items_.size(); }
  const Outgoing& front() const { return items_.front(); }
  void pop() { items_.pop_front(); }
  std::uint64_t dropped() const { return dropped_; }
  const std::deque<Outgoing>& items() const { return items_; }

 private:
  std::size_t limit_;
  std::deque<Outgoing> items_;
  std::uint64_t dropped_ = 0;
};

enum class Role : std::uint8_t { kDriver = 0, kObserver = 1 };

/// Implemented by each transport session.
class Connection {
 public:
  virtual ~Connection() = default;
  /// Queues a frame for sending. May be called from any thread.
  virtual void deliver(const Outgoing& item) = 0;
};

class Hub {
 public:
  using ConnectionId = std::uint64_t;

  /// Registers a console. Its role is announced with Event(ROLE).
  ConnectionId attach(std::weak_ptr<Connection> conn) {
    std::shared_ptr<Connection> target;
    ConnectionId id = 0;
    Role role = Role::kObserver;
    {
      std::lock_guard lock(mu_);
      id = next_id_++;
      if (!driver_ && !ignore_commands_) driver_ = id;
      role = driver_ && *driver_ == id ? Role::kDriver : Role::kObserver;
      conns_.emplace(id, conn);
      target = conn.lock();
    }
    if (target) target->deliver(make_outgoing(role_event(role)));
    return id;
  }

  /// Removes a console. If it was driving, the longest-connected observer
  /// takes over and is told so.
  void detach(ConnectionId id) {
    std::shared_ptr<Connection> promoted;
    {
      std::lock_guard lock(mu_);
      conns_.erase(id);
      if (driver_ && *driver_ == id) {
        driver_.reset();
        if (!conns_.empty() && !ignore_commands_) {
          driver_ = conns_.begin()->first;
          promoted = conns_.begin()->second.lock();
        }
      }
    }
    if (promoted) promoted->deliver(make_outgoing(role_event(Role::kDriver)));
  }

  /// Accepts one decoded message from a console.
  void submit(ConnectionId id, const proto::Message& m) {
    using proto::MsgType;
    const MsgType type = proto::type_of(m);
    if (!proto::is_command(m)) return;  // consoles only send commands
    std::shared_ptr<Connection> reject_to;
    {
      std::lock_guard lock(mu_);
      if (ignore_commands_) return;
      const bool driver = driver_ && *driver_ == id;
      if (driver || type == MsgType::kCmdCamera) {
        inbound_.push_back(m);
        return;
      }
      if (auto it = conns_.find(id); it != conns_.end()) reject_to = it->second.lock();
    }
    if (reject_to) {
      reject_to->deliver(make_outgoing(proto::make_event(
          last_tick_.load(), proto::EventCode::kCmdRejected, static_cast<std::uint8_t>(type))));
    }
  }

  /// Hands queued commands to the simulation thread.
  std::vector<proto::Message> drain() {
    std::lock_guard lock(mu_);
    std::vector<proto::Message> out(std::make_move_iterator(inbound_.begin()),
                                    std::make_move_iterator(inbound_.end()));
    inbound_.clear();
    return out;
  }

  /// Sends the same frames to every console, encoding each message once.
  void broadcast(const std::vector<proto::Message>& messages) {
    if (messages.empty()) return;
    std::vector<Outgoing> encoded;
    encoded.reserve(messages.size());
    for (const auto& m : messages) {
      encoded.push_back(make_outgoing(m));
      if (auto* t = std::get_if<proto::Telemetry>(&m)) last_tick_ = t->tick;
    }
    for (auto& c : connections()) {
      for (const auto& o : encoded) c->deliver(o);
    }
  }

  /// Replay mode: every console observes and commands are dropped silently.
  void set_ignore_commands(bool ignore) {
    std::lock_guard lock(mu_);
    ignore_commands_ = ignore;
  }

  std::size_t connection_count() const {
    std::lock_guard lock(mu_);
    return conns_.size();
  }

  std::optional<ConnectionId> driver() const {
    std::lock_guard lock(mu_);
    return driver_;
  }

 private:
  std::vector<std::shared_ptr<Connection>> connections() const {
    std::lock_guard lock(mu_);
    std::vector<std::shared_ptr<Connection>> out;
    for (const auto& [id, weak] : conns_) {
      if (auto c = weak.lock()) out.push_back(std::move(c));
    }
    return out;
  }

  proto::Event role_event(Role r) const {
    return proto::make_event(last_tick_.load(), proto::EventCode::kRole,
                             static_cast<std::uint8_t>(r));
  }

  mutable std::mutex mu_;
  std::map<ConnectionId, std::weak_ptr<Connection>> conns_;
  std::optional<ConnectionId> driver_;
  ConnectionId next_id_ = 1;
  std::deque<proto::Message> inbound_;
  bool ignore_commands_ = false;
  std::atomic<std::uint64_t> last_tick_{0};
};

}  // namespace wos::net
