// Copyright 2026 The HDP Authors
// SPDX-License-Identifier: Apache-2.0

// Packet-level building blocks shared by the reference executor and the
// partitioned runtime: parse, deparse, key construction, action primitives.

#ifndef HDP_EXEC_H_
#define HDP_EXEC_H_

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hdp/bits.h"
#include "hdp/pipeline.h"

namespace hdp {

// Header instances indexed like Pipeline::headers; nullopt when invalid.
struct PacketHeaders {
  std::vector<std::optional<Bytes>> headers;
  Bytes payload;
};

struct ParseOutcome {
  bool accepted = false;
  std::string reject_reason;
  PacketHeaders packet;
};

ParseOutcome ParsePacket(const Pipeline& program,
                         std::span<const std::uint8_t> bytes);

// Valid headers in deparser order, then the unparsed payload.
Bytes DeparsePacket(const Pipeline& program, const PacketHeaders& packet);

struct Metadata {
  std::uint16_t ingress_port = 0;
  std::uint16_t egress_spec = 0;
  bool egress_written = false;
  bool drop = false;

  bool operator==(const Metadata&) const = default;
};

struct PacketContext {
  PacketHeaders packet;
  Metadata md;
};

// Key fields of an invalid header read as zeros.
Bytes BuildKey(const Pipeline& program, const MatchTable& table,
               const PacketHeaders& packet);

using ExternHook = std::function<void(const std::string& extern_name)>;

// Runs the primitives of `call.action` in order. Extern calls are forwarded
// to `on_extern`, which decides whether the call has an effect.
void RunAction(const Pipeline& program, const ActionCall& call,
               PacketContext& ctx, const ExternHook& on_extern);

struct Verdict {
  enum class Kind { kForward, kDrop };

  Kind kind = Kind::kDrop;
  std::uint16_t port = 0;
  Bytes packet;

  static Verdict Forward(std::uint16_t port, Bytes packet) {
    return {Kind::kForward, port, std::move(packet)};
  }
  static Verdict Drop() { return {}; }
  bool is_forward() const { return kind == Kind::kForward; }
  std::string ToString() const;

  bool operator==(const Verdict&) const = default;
};

Verdict FinalVerdict(const Pipeline& program, const PacketContext& ctx);

}  // namespace hdp

#endif  // HDP_EXEC_H_
