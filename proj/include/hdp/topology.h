// Copyright 2026 The HDP Authors
// SPDX-License-Identifier: Apache-2.0

// Target capability profiles and the chain of targets forming one data
// plane. Immutable after load.

#ifndef HDP_TOPOLOGY_H_
#define HDP_TOPOLOGY_H_

#include <cstdint>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "hdp/pipeline.h"

namespace hdp {

enum class CapabilityLevel { kVeryLow, kLow, kLimited, kHigh, kVeryHigh };

std::string_view CapabilityLevelName(CapabilityLevel level);

enum class TargetKind { kAsic, kFpga, kCpu, kNic };

std::string_view TargetKindName(TargetKind kind);

// Descriptive only; nothing in the simulator reads these.
struct CapabilityLevels {
  CapabilityLevel programmability = CapabilityLevel::kLimited;
  CapabilityLevel throughput = CapabilityLevel::kLimited;
  CapabilityLevel latency = CapabilityLevel::kLimited;
  CapabilityLevel power = CapabilityLevel::kLimited;

  bool operator==(const CapabilityLevels&) const = default;
};

inline constexpr std::uint64_t kDefaultNetworkBandwidthBps = 10'000'000'000;

struct TargetProfile {
  std::string id;
  TargetKind kind = TargetKind::kAsic;
  std::set<ExternKind> supported_externs;
  std::uint64_t table_capacity = 0;       // entries
  std::uint64_t per_packet_latency_ns = 1;
  double service_rate_pps = 1;
  bool network_facing = false;
  // Bandwidth of the external port; only meaningful when network-facing.
  std::uint64_t network_bandwidth_bps = kDefaultNetworkBandwidthBps;
  CapabilityLevels levels;

  bool operator==(const TargetProfile&) const = default;
};

struct Link {
  std::string a;
  std::string b;
  std::uint64_t latency_ns = 1000;
  std::uint64_t bandwidth_bps = 10'000'000'000;

  bool operator==(const Link&) const = default;
};

// Default profile for a kind (qualitative levels; absolute figures are
// configuration defaults).
TargetProfile DefaultProfile(TargetKind kind, std::string id);
Link DefaultLink(std::string a, std::string b);

class Topology {
 public:
  // Validates and computes the chain order. Throws Error.
  Topology(std::vector<TargetProfile> targets, std::vector<Link> links);

  const std::vector<TargetProfile>& targets() const { return targets_; }
  const std::vector<Link>& links() const { return links_; }

  // Targets ordered by distance from the network-facing target.
  const std::vector<std::string>& chain() const { return chain_; }
  const TargetProfile& front() const { return *Find(chain_.front()); }

  const TargetProfile* Find(const std::string& id) const;
  // Position in chain(); -1 if unknown.
  int ChainPosition(const std::string& id) const;
  // Link joining two adjacent chain members; nullptr otherwise.
  const Link* LinkBetween(const std::string& a, const std::string& b) const;

  bool operator==(const Topology& other) const {
    return targets_ == other.targets_ && links_ == other.links_;
  }

 private:
  std::vector<TargetProfile> targets_;
  std::vector<Link> links_;
  std::vector<std::string> chain_;
};

// JSON with "targets" and "links" arrays. Omitted profile fields take the
// defaults of the target's kind.
Topology LoadTopology(std::string_view text);
std::string SerializeTopology(const Topology& topology);

struct ExternRequirement {
  ExternKind kind;
};
struct TableSpaceRequirement {
  std::uint64_t entries;
};
using Requirement = std::variant<ExternRequirement, TableSpaceRequirement>;

struct CapabilityResult {
  bool ok = false;
  std::string reason;
};

// `used_entries` is capacity already allocated on the target.
CapabilityResult CapabilityCheck(const TargetProfile& target,
                                 const Requirement& requirement,
                                 std::uint64_t used_entries = 0);

}  // namespace hdp

#endif  // HDP_TOPOLOGY_H_
