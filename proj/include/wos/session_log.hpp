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
 * @file session_log.hpp
 * @brief Session log files: the "WOSLOG1\n" header followed by encoded
 * Telemetry, VideoFrame and Event wire frames in tick order.
 */
#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "wos/protocol.hpp"

namespace wos {

inline constexpr std::string_view kSessionMagic = "WOSLOG1\n";
inline constexpr std::string_view kSessionExtension = ".woslog";

class SessionLogError : public std::runtime_error {
 public:
  SessionLogError(const std::string& what, std::size_t offset)
      : std::runtime_error("session log error at byte " + std::to_string(offset) + ": " + what),
        offset_(offset) {}
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

inline std::optional<std::uint64_t> message_tick(const proto::Message& m) {
  if (auto* t = std::get_if<proto::Telemetry>(&m)) return t->tick;
  if (auto* v = std::get_if<proto::VideoFrame>(&m)) return v->tick;
  if (auto* e = std::get_if<proto::Event>(&m)) return e->tick;
  return std::nullopt;
}

/// Append-only writer. The header is written on open.
class SessionLogWriter {
 public:
  explicit SessionLogWriter(const std::filesystem::path& path)
      : path_(path), out_(path, std::ios::binary | std::ios::trunc) {
    if (!out_) throw std::runtime_error("cannot open session log " + path.string());
    out_.write(kSessionMagic.data(), static_cast<std::streamsize>(kSessionMagic.size()));
  }

  void append(const proto::Message& m) {
    scratch_.clear();
    proto::encode_into(m, scratch_);
    out_.write(reinterpret_cast<const char*>(scratch_.data()),
               static_cast<std::streamsize>(scratch_.size()));
  }

  bool good() const { return out_.good(); }
  void flush() { out_.flush(); }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
  std::ofstream out_;
  std::vector<std::uint8_t> scratch_;
};

/// Walks the records of an in-memory log, validating as it goes.
class SessionLogReader {
 public:
  explicit SessionLogReader(std::vector<std::uint8_t> bytes) : bytes_(std::move(bytes)) {
    const std::string_view head(reinterpret_cast<const char*>(bytes_.data()),
                                std::min(bytes_.size(), kSessionMagic.size()));
    for (std::size_t i = 0; i < kSessionMagic.size(); ++i) {
      if (i >= head.size() || head[i] != kSessionMagic[i]) {
        throw SessionLogError("missing WOSLOG1 header", i);
      }
    }
    offset_ = kSessionMagic.size();
  }

  static SessionLogReader open(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open session log " + path.string());
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                    std::istreambuf_iterator<char>());
    return SessionLogReader(std::move(bytes));
  }

  /// Next record, or nullopt at a clean end of file.
  std::optional<proto::Message> next() {
    if (offset_ == bytes_.size()) return std::nullopt;
    auto res = proto::decode(std::span<const std::uint8_t>(bytes_).subspan(offset_));
    if (auto* err = std::get_if<proto::DecodeError>(&res)) {
      throw SessionLogError(std::string("bad record (") + proto::to_string(err->code) + ")",
                            offset_);
    }
    if (std::holds_alternative<proto::NeedMore>(res)) {
      throw SessionLogError("truncated record", offset_);
    }
    auto& d = std::get<proto::Decoded>(res);
    auto tick = message_tick(d.message);
    if (!tick) throw SessionLogError("command message in session log", offset_);
    if (last_tick_ && *tick < *last_tick_) {
      throw SessionLogError("tick went backwards", offset_);
    }
    last_tick_ = tick;
    offset_ += d.consumed;
    return std::move(d.message);
  }

  std::size_t offset() const { return offset_; }

 private:
  std::vector<std::uint8_t> bytes_;
  std::size_t offset_ = 0;
  std::optional<std::uint64_t> last_tick_;
};

/// Decodes an entire log file. Throws SessionLogError naming the byte offset.
inline std::vector<proto::Message> replay(const std::filesystem::path& path) {
  auto reader = SessionLogReader::open(path);
  std::vector<proto::Message> out;
  while (auto m = reader.next()) out.push_back(std::move(*m));
  return out;
}

}  // namespace wos
