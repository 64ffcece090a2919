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
 * @file protocol.hpp
 * @brief Binary wire format shared by TCP, WebSocket and session logs.
 *
 * Every message travels in a 5-byte header
 *
 *     magic 0xC3 | version 0x01 | type u8 | length u16
 *
 * followed by `length` payload bytes. All integers are big-endian and floats
 * are IEEE-754 binary32.
 */
#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

namespace wos::proto {

inline constexpr std::uint8_t kMagic = 0xC3;
inline constexpr std::uint8_t kVersion = 0x01;
inline constexpr std::size_t kHeaderSize = 5;
inline constexpr std::size_t kVideoHeaderSize = 14;
inline constexpr std::size_t kMaxPayload = 0xFFFF;
inline constexpr std::uint16_t kRangeOutOfRange = 0xFFFF;

enum class MsgType : std::uint8_t {
  kCmdDrive = 0x01,
  kCmdCamera = 0x02,
  kCmdMode = 0x03,
  kCmdRecord = 0x04,
  kTelemetry = 0x10,
  kVideoFrame = 0x11,
  kEvent = 0x12,
};

struct CmdDrive {
  std::int8_t throttle = 0;
  std::int8_t steer = 0;
  friend bool operator==(const CmdDrive&, const CmdDrive&) = default;
};

struct CmdCamera {
  std::int16_t delta_pan = 0;
  std::int8_t delta_tilt = 0;
  friend bool operator==(const CmdCamera&, const CmdCamera&) = default;
};

struct CmdMode {
  std::uint8_t mode = 0;  ///< 0 = MANUAL, 1 = AUTO
  friend bool operator==(const CmdMode&, const CmdMode&) = default;
};

enum class RecordAction : std::uint8_t { kStop = 0, kStart = 1, kSnapshot = 2 };

struct CmdRecord {
  std::uint8_t action = 0;
  friend bool operator==(const CmdRecord&, const CmdRecord&) = default;
};

struct Telemetry {
  std::uint64_t tick = 0;
  float x = 0.0f;
  float y = 0.0f;
  float heading = 0.0f;
  float speed = 0.0f;
  std::uint16_t range_cm = kRangeOutOfRange;
  std::uint16_t battery_mv = 0;
  std::uint8_t mode = 0;
  std::uint8_t phase = 0;
  std::uint16_t pan = 0;
  std::int8_t tilt = 0;
  // Bitwise float comparison so NaN payloads still round-trip as equal.
  friend bool operator==(const Telemetry& a, const Telemetry& b) {
    auto bits = [](float f) { return std::bit_cast<std::uint32_t>(f); };
    return a.tick == b.tick && bits(a.x) == bits(b.x) && bits(a.y) == bits(b.y) &&
           bits(a.heading) == bits(b.heading) && bits(a.speed) == bits(b.speed) &&
           a.range_cm == b.range_cm && a.battery_mv == b.battery_mv && a.mode == b.mode &&
           a.phase == b.phase && a.pan == b.pan && a.tilt == b.tilt;
  }
};

struct VideoFrame {
  std::uint64_t tick = 0;
  std::uint16_t pan = 0;
  std::uint16_t width = 0;
  std::uint16_t height = 0;
  std::vector<std::uint8_t> pixels;
  friend bool operator==(const VideoFrame&, const VideoFrame&) = default;
};

enum class EventCode : std::uint8_t {
  kCollision = 1,
  kBrownout = 2,
  kSnapshot = 3,
  kRecordError = 4,
  kCmdRejected = 5,   ///< detail = rejected message type
  kBlocked = 6,
  kCmdClamped = 7,    ///< detail bit0 = throttle, bit1 = steer
  kRecordStart = 8,
  kRecordStop = 9,
  kRole = 10,         ///< detail 0 = driver, 1 = observer
  kModeChanged = 11,  ///< detail = new mode
};

struct Event {
  std::uint64_t tick = 0;
  std::uint8_t code = 0;
  std::uint8_t detail = 0;
  friend bool operator==(const Event&, const Event&) = default;
};

using Message =
    std::variant<CmdDrive, CmdCamera, CmdMode, CmdRecord, Telemetry, VideoFrame, Event>;

inline Event make_event(std::uint64_t tick, EventCode code, std::uint8_t detail = 0) {
  return Event{tick, static_cast<std::uint8_t>(code), detail};
}

inline MsgType type_of(const Message& m) {
  return std::visit(
      [](const auto& v) {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, CmdDrive>) return MsgType::kCmdDrive;
        else if constexpr (std::is_same_v<T, CmdCamera>) return MsgType::kCmdCamera;
        else if constexpr (std::is_same_v<T, CmdMode>) return MsgType::kCmdMode;
        else if constexpr (std::is_same_v<T, CmdRecord>) return MsgType::kCmdRecord;
        else if constexpr (std::is_same_v<T, Telemetry>) return MsgType::kTelemetry;
        else if constexpr (std::is_same_v<T, VideoFrame>) return MsgType::kVideoFrame;
        else return MsgType::kEvent;
      },
      m);
}

inline bool is_command(const Message& m) {
  return static_cast<std::uint8_t>(type_of(m)) < 0x10;
}

/// Fixed payload size for a type, 0 for VideoFrame (variable), -1 for unknown.
inline int fixed_payload_size(std::uint8_t type) {
  switch (static_cast<MsgType>(type)) {
    case MsgType::kCmdDrive: return 2;
    case MsgType::kCmdCamera: return 3;
    case MsgType::kCmdMode: return 1;
    case MsgType::kCmdRecord: return 1;
    case MsgType::kTelemetry: return 33;
    case MsgType::kVideoFrame: return 0;
    case MsgType::kEvent: return 10;
  }
  return -1;
}

class EncodeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

namespace detail {

class Writer {
 public:
  explicit Writer(std::vector<std::uint8_t>& out) : out_(out) {}

  template <typename T>
  void put(T v) {
    if constexpr (std::is_same_v<T, float>) {
      put(std::bit_cast<std::uint32_t>(v));
    } else {
      using U = std::make_unsigned_t<T>;
      const U u = static_cast<U>(v);
      for (int shift = (sizeof(U) - 1) * 8; shift >= 0; shift -= 8) {
        out_.push_back(static_cast<std::uint8_t>(u >> shift));
      }
    }
  }
  void put_bytes(std::span<const std::uint8_t> bytes) {
    out_.insert(out_.end(), bytes.begin(), bytes.end());
  }

 private:
  std::vector<std::uint8_t>& out_;
};

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> in) : in_(in) {}

  template <typename T>
  T get() {
    if constexpr (std::is_same_v<T, float>) {
      return std::bit_cast<float>(get<std::uint32_t>());
    } else {
      using U = std::make_unsigned_t<T>;
      U u = 0;
      for (std::size_t i = 0; i < sizeof(U); ++i) u = static_cast<U>((u << 8) | in_[pos_++]);
      return static_cast<T>(u);
    }
  }
  std::span<const std::uint8_t> rest() const { return in_.subspan(pos_); }

 private:
  std::span<const std::uint8_t> in_;
  std::size_t pos_ = 0;
};

inline void encode_payload(Writer& w, const CmdDrive& m) {
  w.put(m.throttle);
  w.put(m.steer);
}
inline void encode_payload(Writer& w, const CmdCamera& m) {
  w.put(m.delta_pan);
  w.put(m.delta_tilt);
}
inline void encode_payload(Writer& w, const CmdMode& m) { w.put(m.mode); }
inline void encode_payload(Writer& w, const CmdRecord& m) { w.put(m.action); }
inline void encode_payload(Writer& w, const Telemetry& m) {
  w.put(m.tick);
  w.put(m.x);
  w.put(m.y);
  w.put(m.heading);
  w.put(m.speed);
  w.put(m.range_cm);
  w.put(m.battery_mv);
  w.put(m.mode);
  w.put(m.phase);
  w.put(m.pan);
  w.put(m.tilt);
}
inline void encode_payload(Writer& w, const VideoFrame& m) {
  w.put(m.tick);
  w.put(m.pan);
  w.put(m.width);
  w.put(m.height);
  w.put_bytes(m.pixels);
}
inline void encode_payload(Writer& w, const Event& m) {
  w.put(m.tick);
  w.put(m.code);
  w.put(m.detail);
}

}  // namespace detail

/// Appends one wire frame for `msg` to `out`.
inline void encode_into(const Message& msg, std::vector<std::uint8_t>& out) {
  if (const auto* v = std::get_if<VideoFrame>(&msg)) {
    if (v->pixels.size() > kMaxPayload - kVideoHeaderSize) {
      throw EncodeError("video frame of " + std::to_string(v->pixels.size()) +
                        " pixels exceeds the wire frame budget");
    }
    if (v->pixels.size() != static_cast<std::size_t>(v->width) * v->height) {
      throw EncodeError("video frame pixel count does not match width*height");
    }
  }
  const std::size_t start = out.size();
  detail::Writer w(out);
  w.put(kMagic);
  w.put(kVersion);
  w.put(static_cast<std::uint8_t>(type_of(msg)));
  w.put(std::uint16_t{0});
  std::visit([&](const auto& m) { detail::encode_payload(w, m); }, msg);
  const std::size_t len = out.size() - start - kHeaderSize;
  out[start + 3] = static_cast<std::uint8_t>(len >> 8);
  out[start + 4] = static_cast<std::uint8_t>(len);
}

inline std::vector<std::uint8_t> encode(const Message& msg) {
  std::vector<std::uint8_t> out;
  encode_into(msg, out);
  return out;
}

enum class DecodeErrorCode : std::uint8_t { kBadMagic, kBadVersion, kBadType, kBadLength };

inline const char* to_string(DecodeErrorCode c) {
  switch (c) {
    case DecodeErrorCode::kBadMagic: return "BAD_MAGIC";
    case DecodeErrorCode::kBadVersion: return "BAD_VERSION";
    case DecodeErrorCode::kBadType: return "BAD_TYPE";
    case DecodeErrorCode::kBadLength: return "BAD_LENGTH";
  }
  return "?";
}

struct Decoded {
  Message message;
  std::size_t consumed = 0;
};
struct NeedMore {};
struct DecodeError {
  DecodeErrorCode code;
};

using DecodeResult = std::variant<Decoded, NeedMore, DecodeError>;

/// Parses one wire frame from the head of `buf`. Header fields are checked as
/// soon as they are available, so garbage is rejected without waiting for
/// more input.
inline DecodeResult decode(std::span<const std::uint8_t> buf) {
  if (buf.size() >= 1 && buf[0] != kMagic) return DecodeError{DecodeErrorCode::kBadMagic};
  if (buf.size() >= 2 && buf[1] != kVersion) return DecodeError{DecodeErrorCode::kBadVersion};
  int fixed = 0;
  if (buf.size() >= 3) {
    fixed = fixed_payload_size(buf[2]);
    if (fixed < 0) return DecodeError{DecodeErrorCode::kBadType};
  }
  if (buf.size() < kHeaderSize) return NeedMore{};

  const std::size_t len = (static_cast<std::size_t>(buf[3]) << 8) | buf[4];
  if (fixed > 0 && len != static_cast<std::size_t>(fixed)) {
    return DecodeError{DecodeErrorCode::kBadLength};
  }
  if (fixed == 0 && len < kVideoHeaderSize) return DecodeError{DecodeErrorCode::kBadLength};
  if (buf.size() < kHeaderSize + len) return NeedMore{};

  detail::Reader r(buf.subspan(kHeaderSize, len));
  Message msg;
  switch (static_cast<MsgType>(buf[2])) {
    case MsgType::kCmdDrive: {
      CmdDrive m;
      m.throttle = r.get<std::int8_t>();
      m.steer = r.get<std::int8_t>();
      msg = m;
      break;
    }
    case MsgType::kCmdCamera: {
      CmdCamera m;
      m.delta_pan = r.get<std::int16_t>();
      m.delta_tilt = r.get<std::int8_t>();
      msg = m;
      break;
    }
    case MsgType::kCmdMode:
      msg = CmdMode{r.get<std::uint8_t>()};
      break;
    case MsgType::kCmdRecord:
      msg = CmdRecord{r.get<std::uint8_t>()};
      break;
    case MsgType::kTelemetry: {
      Telemetry m;
      m.tick = r.get<std::uint64_t>();
      m.x = r.get<float>();
      m.y = r.get<float>();
      m.heading = r.get<float>();
      m.speed = r.get<float>();
      m.range_cm = r.get<std::uint16_t>();
      m.battery_mv = r.get<std::uint16_t>();
      m.mode = r.get<std::uint8_t>();
      m.phase = r.get<std::uint8_t>();
      m.pan = r.get<std::uint16_t>();
      m.tilt = r.get<std::int8_t>();
      msg = m;
      break;
    }
    case MsgType::kVideoFrame: {
      VideoFrame m;
      m.tick = r.get<std::uint64_t>();
      m.pan = r.get<std::uint16_t>();
      m.width = r.get<std::uint16_t>();
      m.height = r.get<std::uint16_t>();
      auto px = r.rest();
      if (px.size() != static_cast<std::size_t>(m.width) * m.height) {
        return DecodeError{DecodeErrorCode::kBadLength};
      }
      m.pixels.assign(px.begin(), px.end());
      msg = std::move(m);
      break;
    }
    case MsgType::kEvent: {
      Event m;
      m.tick = r.get<std::uint64_t>();
      m.code = r.get<std::uint8_t>();
      m.detail = r.get<std::uint8_t>();
      msg = m;
      break;
    }
  }
  return Decoded{std::move(msg), kHeaderSize + len};
}

/// Per-connection decoder for a byte stream carrying back-to-back frames.
class StreamDecoder {
 public:
  void feed(std::span<const std::uint8_t> bytes) {
    buf_.insert(buf_.end(), bytes.begin(), bytes.end());
  }

  /// Next complete message, NeedMore when the buffer holds only a prefix, or
  /// the decode error. After an error the stream is unusable.
  DecodeResult next() {
    auto res = decode(std::span<const std::uint8_t>(buf_).subspan(head_));
    if (auto* d = std::get_if<Decoded>(&res)) {
      head_ += d->consumed;
      if (head_ == buf_.size()) {
        buf_.clear();
        head_ = 0;
      } else if (head_ > 4096 && head_ * 2 > buf_.size()) {
        buf_.erase(buf_.begin(), buf_.begin() + static_cast<std::ptrdiff_t>(head_));
        head_ = 0;
      }
    }
    return res;
  }

  std::size_t buffered() const { return buf_.size() - head_; }

 private:
  std::vector<std::uint8_t> buf_;
  std::size_t head_ = 0;
};

/// Hex helpers for test vectors and headless command scripts.
inline std::string to_hex(std::span<const std::uint8_t> bytes, bool spaced = true) {
  static constexpr char digits[] = "0123456789ABCDEF";
  std::string out;
  for (std::size_t i = 0; i < bytes.size(); ++i) {
    if (spaced && i > 0) out.push_back(' ');
    out.push_back(digits[bytes[i] >> 4]);
    out.push_back(digits[bytes[i] & 0xF]);
  }
  return out;
}

/// Parses hex digits, ignoring whitespace. Throws std::invalid_argument.
inline std::vector<std::uint8_t> from_hex(std::string_view text) {
  auto nibble = [](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
  };
  std::vector<std::uint8_t> out;
  int hi = -1;
  for (char c : text) {
    if (c == ' ' || c == '\t' || c == '\r' || c == '\n') continue;
    int v = nibble(c);
    if (v < 0) throw std::invalid_argument(std::string("bad hex digit '") + c + "'");
    if (hi < 0) {
      hi = v;
    } else {
      out.push_back(static_cast<std::uint8_t>(hi << 4 | v));
      hi = -1;
    }
  }
  if (hi >= 0) throw std::invalid_argument("odd number of hex digits");
  return out;
}

}  // namespace wos::proto
