// Copyright 2026 The DP-PSI Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Frame layout, all integers little-endian:
//
//   u32 length   bytes that follow this field (= 5 + body size)
//   u8  type     0x01 X_a, 0x02 Y_b_sub, 0x03 X_ab_pi, 0x04 IndexSet,
//                0x0F Abort
//   u32 count    element or index count (0 for Abort)
//   body         count * 32-byte elements, or count * u32 indices

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "dppsi/error.h"
#include "dppsi/group.h"

namespace dppsi {

enum class MessageType : std::uint8_t {
  kXa = 0x01,
  kYbSub = 0x02,
  kXabPi = 0x03,
  kIndexSet = 0x04,
  kAbort = 0x0F,
};

inline constexpr std::size_t kLengthFieldBytes = 4;
inline constexpr std::size_t kFrameHeaderBytes = 9;
inline constexpr std::size_t kIndexBytes = 4;
inline constexpr std::size_t kMaxFrameBytes = std::size_t{1} << 34;

inline const char* MessageTypeName(MessageType t) {
  switch (t) {
    case MessageType::kXa:
      return "X_a";
    case MessageType::kYbSub:
      return "Y_b_sub";
    case MessageType::kXabPi:
      return "X_ab_pi";
    case MessageType::kIndexSet:
      return "IndexSet";
    case MessageType::kAbort:
      return "Abort";
  }
  return "?";
}

inline bool IsElementMessage(MessageType t) {
  return t == MessageType::kXa || t == MessageType::kYbSub ||
         t == MessageType::kXabPi;
}

namespace wire_detail {

inline void PutU32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

inline std::uint32_t GetU32(std::span<const std::uint8_t> in, std::size_t at) {
  std::uint32_t v = 0;
  for (int i = 3; i >= 0; --i) v = (v << 8) | in[at + i];
  return v;
}

}  // namespace wire_detail

// One protocol message. Element messages carry `elements`; IndexSet carries
// `indices`. Elements are not group-validated here; sessions validate them.
struct Message {
  MessageType type = MessageType::kAbort;
  std::vector<GroupElement> elements;
  std::vector<std::uint32_t> indices;

  static Message Elements(MessageType type, std::vector<GroupElement> elems) {
    Message m;
    m.type = type;
    m.elements = std::move(elems);
    return m;
  }

  static Message IndexSet(std::vector<std::uint32_t> idx) {
    Message m;
    m.type = MessageType::kIndexSet;
    m.indices = std::move(idx);
    return m;
  }

  static Message Abort() { return Message{}; }

  std::size_t count() const {
    return type == MessageType::kIndexSet ? indices.size() : elements.size();
  }

  std::size_t EncodedSize() const {
    if (type == MessageType::kIndexSet) {
      return kFrameHeaderBytes + kIndexBytes * indices.size();
    }
    if (type == MessageType::kAbort) return kFrameHeaderBytes;
    return kFrameHeaderBytes + kElementBytes * elements.size();
  }

  std::vector<std::uint8_t> Encode() const {
    std::vector<std::uint8_t> out;
    const std::size_t total = EncodedSize();
    if (total - kLengthFieldBytes > UINT32_MAX) {
      throw WireError("message too large to frame");
    }
    out.reserve(total);
    wire_detail::PutU32(out, static_cast<std::uint32_t>(total - kLengthFieldBytes));
    out.push_back(static_cast<std::uint8_t>(type));
    if (type == MessageType::kAbort) {
      wire_detail::PutU32(out, 0);
    } else if (type == MessageType::kIndexSet) {
      wire_detail::PutU32(out, static_cast<std::uint32_t>(indices.size()));
      for (auto i : indices) wire_detail::PutU32(out, i);
    } else {
      wire_detail::PutU32(out, static_cast<std::uint32_t>(elements.size()));
      for (const auto& e : elements) {
        out.insert(out.end(), e.bytes().begin(), e.bytes().end());
      }
    }
    return out;
  }

  // Parses one complete frame (length field included).
  static Message Decode(std::span<const std::uint8_t> frame) {
    if (frame.size() < kFrameHeaderBytes) throw WireError("truncated frame header");
    const std::uint32_t length = wire_detail::GetU32(frame, 0);
    if (length != frame.size() - kLengthFieldBytes) {
      throw WireError("frame length field does not match frame size");
    }
    const std::uint8_t tag = frame[4];
    const std::uint32_t count = wire_detail::GetU32(frame, 5);
    const auto body = frame.subspan(kFrameHeaderBytes);
    Message m;
    switch (tag) {
      case 0x01:
      case 0x02:
      case 0x03: {
        m.type = static_cast<MessageType>(tag);
        if (body.size() != std::size_t{count} * kElementBytes) {
          throw WireError("element body size does not match count");
        }
        m.elements.reserve(count);
        for (std::uint32_t i = 0; i < count; ++i) {
          m.elements.push_back(
              GroupElement::FromSpan(body.subspan(i * kElementBytes, kElementBytes)));
        }
        break;
      }
      case 0x04: {
        m.type = MessageType::kIndexSet;
        if (body.size() != std::size_t{count} * kIndexBytes) {
          throw WireError("index body size does not match count");
        }
        m.indices.reserve(count);
        for (std::uint32_t i = 0; i < count; ++i) {
          m.indices.push_back(wire_detail::GetU32(body, i * kIndexBytes));
        }
        break;
      }
      case 0x0F:
        m.type = MessageType::kAbort;
        if (count != 0 || !body.empty()) throw WireError("abort frame has a body");
        break;
      default:
        throw WireError("unknown message type " + std::to_string(tag));
    }
    return m;
  }

  friend bool operator==(const Message&, const Message&) = default;
};

// Closed-form DP-PSI transcript size in bytes, both directions.
inline std::size_t TranscriptBytes(std::size_t sender_size,
                                   std::size_t receiver_sub_size,
                                   std::size_t dp_intersection_size) {
  return 4 * kFrameHeaderBytes + kElementBytes * (2 * sender_size + receiver_sub_size) +
         kIndexBytes * dp_intersection_size;
}

}  // namespace dppsi
