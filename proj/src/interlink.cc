// Copyright 2026 The HDP Authors
// SPDX-License-Identifier: Apache-2.0

#include "hdp/interlink.h"

#include "hdp/error.h"

namespace hdp::interlink {
namespace {

constexpr std::size_t kMaxTlvBytes = 0xffff;

void Put16(Bytes& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v >> 8));
  out.push_back(static_cast<std::uint8_t>(v & 0xff));
}

std::uint16_t Get16(std::span<const std::uint8_t> b, std::size_t at) {
  return static_cast<std::uint16_t>((b[at] << 8) | b[at + 1]);
}

// Shared by encode and decode; returns a message or empty.
std::string TlvRuleViolation(const MetadataTlv& tlv, bool& seen_decision,
                             bool& seen_ingress) {
  switch (tlv.type) {
    case kEgressDecision:
    case kIngressPort: {
      if (tlv.value.size() != 2) return "port TLV must have length 2";
      bool& seen = tlv.type == kEgressDecision ? seen_decision : seen_ingress;
      if (seen) return "duplicate TLV type " + std::to_string(tlv.type);
      seen = true;
      return "";
    }
    case kOpaque:
      return "";
    default:
      return "unknown TLV type " + std::to_string(tlv.type);
  }
}

}  // namespace

const MetadataTlv* Frame::FindTlv(std::uint8_t type) const {
  for (const MetadataTlv& t : tlvs) {
    if (t.type == type) return &t;
  }
  return nullptr;
}

std::optional<std::uint16_t> Frame::PortTlv(std::uint8_t type) const {
  const MetadataTlv* t = FindTlv(type);
  if (t == nullptr || t->value.size() != 2) return std::nullopt;
  return static_cast<std::uint16_t>((t->value[0] << 8) | t->value[1]);
}

MetadataTlv PortTlv(std::uint8_t type, std::uint16_t port) {
  return {type, {static_cast<std::uint8_t>(port >> 8),
                 static_cast<std::uint8_t>(port & 0xff)}};
}

Bytes EncodeFrame(const Frame& frame) {
  if (frame.flags & ~kKnownFlags) {
    throw Error(ErrorCode::kInvariantViolation, "reserved flag bits set");
  }
  bool seen_decision = false;
  bool seen_ingress = false;
  std::size_t tlv_bytes = 0;
  for (const MetadataTlv& tlv : frame.tlvs) {
    const std::string why = TlvRuleViolation(tlv, seen_decision, seen_ingress);
    if (!why.empty()) throw Error(ErrorCode::kInvariantViolation, why);
    if (tlv.value.size() > 0xff) {
      throw Error(ErrorCode::kInvariantViolation, "TLV value exceeds 255 bytes");
    }
    tlv_bytes += 2 + tlv.value.size();
  }
  if (tlv_bytes > kMaxTlvBytes) {
    throw Error(ErrorCode::kInvariantViolation, "metadata exceeds 65535 bytes");
  }
  if (frame.decision_present() != seen_decision) {
    throw Error(ErrorCode::kInvariantViolation,
                "decision_present flag disagrees with egress_decision TLV");
  }
  Bytes out;
  out.reserve(kHeaderSize + tlv_bytes + frame.payload.size());
  Put16(out, kMagic);
  out.push_back(kVersion);
  out.push_back(frame.stage_id);
  Put16(out, frame.flags);
  Put16(out, static_cast<std::uint16_t>(tlv_bytes));
  for (const MetadataTlv& tlv : frame.tlvs) {
    out.push_back(tlv.type);
    out.push_back(static_cast<std::uint8_t>(tlv.value.size()));
    out.insert(out.end(), tlv.value.begin(), tlv.value.end());
  }
  out.insert(out.end(), frame.payload.begin(), frame.payload.end());
  return out;
}

Frame DecodeFrame(std::span<const std::uint8_t> bytes) {
  // Each header field is checked as soon as it is fully present so that
  // corruption is reported ahead of truncation further on.
  if (bytes.size() < 2) {
    throw DecodeError(ErrorCode::kTruncated, bytes.size(), "short header");
  }
  if (Get16(bytes, 0) != kMagic) {
    throw DecodeError(ErrorCode::kBadMagic, 0, "bad magic");
  }
  if (bytes.size() < 3) {
    throw DecodeError(ErrorCode::kTruncated, bytes.size(), "short header");
  }
  if (bytes[2] != kVersion) {
    throw DecodeError(ErrorCode::kUnsupportedVersion, 2,
                      "version " + std::to_string(bytes[2]));
  }
  if (bytes.size() < kHeaderSize) {
    throw DecodeError(ErrorCode::kTruncated, bytes.size(), "short header");
  }
  Frame frame;
  frame.stage_id = bytes[3];
  frame.flags = Get16(bytes, 4);
  if (frame.flags & ~kKnownFlags) {
    throw DecodeError(ErrorCode::kReservedBitsSet, 4, "reserved flag bits set");
  }
  const std::size_t metadata_len = Get16(bytes, 6);
  if (bytes.size() < kHeaderSize + metadata_len) {
    throw DecodeError(ErrorCode::kTruncated, bytes.size(),
                      "metadata section needs " + std::to_string(metadata_len) +
                          " bytes");
  }
  const std::size_t end = kHeaderSize + metadata_len;
  std::size_t at = kHeaderSize;
  bool seen_decision = false;
  bool seen_ingress = false;
  while (at < end) {
    if (end - at < 2) {
      throw DecodeError(ErrorCode::kMalformedTlv, at, "TLV header overruns metadata");
    }
    MetadataTlv tlv;
    tlv.type = bytes[at];
    const std::size_t len = bytes[at + 1];
    if (end - at - 2 < len) {
      throw DecodeError(ErrorCode::kMalformedTlv, at, "TLV value overruns metadata");
    }
    tlv.value.assign(bytes.begin() + static_cast<long>(at + 2),
                     bytes.begin() + static_cast<long>(at + 2 + len));
    const std::string why = TlvRuleViolation(tlv, seen_decision, seen_ingress);
    if (!why.empty()) throw DecodeError(ErrorCode::kMalformedTlv, at, why);
    frame.tlvs.push_back(std::move(tlv));
    at += 2 + len;
  }
  if (frame.decision_present() != seen_decision) {
    throw DecodeError(ErrorCode::kMalformedTlv, 4,
                      "decision_present flag disagrees with TLVs");
  }
  frame.payload.assign(bytes.begin() + static_cast<long>(end), bytes.end());
  return frame;
}

}  // namespace hdp::interlink
