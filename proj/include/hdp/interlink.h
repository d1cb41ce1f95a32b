// Copyright 2026 The HDP Authors
// SPDX-License-Identifier: Apache-2.0

// Wire format between targets (big-endian):
//
//   0       2       3        4       6              8
//   | magic | ver   | stage  | flags | metadata_len | TLVs... | payload...
//   | 4844  | 01    | id     |       |              |
//
// flags: bit0 matched_upstream, bit1 decision_present, bit2 to_controller.
// TLV: type(1) length(1) value(length).

#ifndef HDP_INTERLINK_H_
#define HDP_INTERLINK_H_

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "hdp/bits.h"

namespace hdp::interlink {

inline constexpr std::uint16_t kMagic = 0x4844;
inline constexpr std::uint8_t kVersion = 1;
inline constexpr std::size_t kHeaderSize = 8;

inline constexpr std::uint16_t kFlagMatchedUpstream = 1u << 0;
inline constexpr std::uint16_t kFlagDecisionPresent = 1u << 1;
inline constexpr std::uint16_t kFlagToController = 1u << 2;
inline constexpr std::uint16_t kKnownFlags =
    kFlagMatchedUpstream | kFlagDecisionPresent | kFlagToController;

enum TlvType : std::uint8_t {
  kEgressDecision = 1,
  kIngressPort = 2,
  kOpaque = 3,
};

struct MetadataTlv {
  std::uint8_t type = kOpaque;
  Bytes value;

  bool operator==(const MetadataTlv&) const = default;
};

struct Frame {
  std::uint8_t stage_id = 0;
  std::uint16_t flags = 0;
  std::vector<MetadataTlv> tlvs;
  Bytes payload;

  bool matched_upstream() const { return flags & kFlagMatchedUpstream; }
  bool decision_present() const { return flags & kFlagDecisionPresent; }

  // Value of the first TLV of a type carrying a 16-bit port.
  std::optional<std::uint16_t> PortTlv(std::uint8_t type) const;
  const MetadataTlv* FindTlv(std::uint8_t type) const;

  bool operator==(const Frame&) const = default;
};

MetadataTlv PortTlv(std::uint8_t type, std::uint16_t port);

// Throws Error(kInvariantViolation) if the frame breaks a TLV or flag rule.
Bytes EncodeFrame(const Frame& frame);

// Strict decoder; throws DecodeError with the offending byte offset.
Frame DecodeFrame(std::span<const std::uint8_t> bytes);

}  // namespace hdp::interlink

#endif  // HDP_INTERLINK_H_
