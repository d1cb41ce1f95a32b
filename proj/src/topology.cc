// Copyright 2026 The HDP Authors
// SPDX-License-Identifier: Apache-2.0

#include "hdp/topology.h"

#include <map>
#include <optional>
#include <queue>

#include "hdp/error.h"
#include "json.hpp"

namespace hdp {
namespace {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

constexpr std::pair<CapabilityLevel, const char*> kLevelNames[] = {
    {CapabilityLevel::kVeryLow, "very_low"},
    {CapabilityLevel::kLow, "low"},
    {CapabilityLevel::kLimited, "limited"},
    {CapabilityLevel::kHigh, "high"},
    {CapabilityLevel::kVeryHigh, "very_high"},
};

constexpr std::pair<TargetKind, const char*> kKindNames[] = {
    {TargetKind::kAsic, "asic"},
    {TargetKind::kFpga, "fpga"},
    {TargetKind::kCpu, "cpu"},
    {TargetKind::kNic, "nic"},
};

[[noreturn]] void Fail(const std::string& path, const std::string& what) {
  throw Error(ErrorCode::kSyntax, path + ": " + what);
}

std::optional<TargetKind> ParseKind(const std::string& name) {
  for (auto [k, n] : kKindNames) {
    if (name == n) return k;
  }
  return std::nullopt;
}

std::optional<CapabilityLevel> ParseLevel(const std::string& name) {
  for (auto [l, n] : kLevelNames) {
    if (name == n) return l;
  }
  return std::nullopt;
}

std::uint64_t GetUnsigned(const json& obj, const char* key,
                          const std::string& path, std::uint64_t fallback) {
  auto it = obj.find(key);
  if (it == obj.end()) return fallback;
  if (!it->is_number_integer() || it->get<std::int64_t>() < 0) {
    Fail(path + "." + key, "expected a non-negative integer");
  }
  return it->get<std::uint64_t>();
}

void CheckKeys(const json& obj, const std::string& path,
               std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) Fail(path, "expected an object");
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || it.key() == a;
    if (!ok) Fail(path, "unknown key '" + it.key() + "'");
  }
}

}  // namespace

std::string_view CapabilityLevelName(CapabilityLevel level) {
  for (auto [l, n] : kLevelNames) {
    if (l == level) return n;
  }
  return "unknown";
}

std::string_view TargetKindName(TargetKind kind) {
  for (auto [k, n] : kKindNames) {
    if (k == kind) return n;
  }
  return "unknown";
}

TargetProfile DefaultProfile(TargetKind kind, std::string id) {
  using L = CapabilityLevel;
  TargetProfile t;
  t.id = std::move(id);
  t.kind = kind;
  switch (kind) {
    case TargetKind::kAsic:
      t.table_capacity = 1024;
      t.per_packet_latency_ns = 400;
      t.service_rate_pps = 15'000'000;
      t.levels = {L::kLimited, L::kVeryHigh, L::kVeryLow, L::kVeryHigh};
      break;
    case TargetKind::kFpga:
      t.table_capacity = 10240;
      t.per_packet_latency_ns = 2000;
      t.service_rate_pps = 1'500'000;
      t.supported_externs = {ExternKind::kPacketCounter};
      t.levels = {L::kHigh, L::kHigh, L::kLow, L::kHigh};
      break;
    case TargetKind::kNic:
      t.table_capacity = 4096;
      t.per_packet_latency_ns = 1500;
      t.service_rate_pps = 3'000'000;
      t.supported_externs = {ExternKind::kPacketCounter};
      t.levels = {L::kHigh, L::kLimited, L::kLimited, L::kHigh};
      break;
    case TargetKind::kCpu:
      t.table_capacity = 1'000'000;
      t.per_packet_latency_ns = 10'000;
      t.service_rate_pps = 500'000;
      t.supported_externs = {ExternKind::kPacketCounter};
      t.levels = {L::kVeryHigh, L::kVeryLow, L::kVeryHigh, L::kLow};
      break;
  }
  return t;
}

Link DefaultLink(std::string a, std::string b) {
  Link l;
  l.a = std::move(a);
  l.b = std::move(b);
  return l;
}

Topology::Topology(std::vector<TargetProfile> targets, std::vector<Link> links)
    : targets_(std::move(targets)), links_(std::move(links)) {
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < targets_.size(); ++i) {
    const TargetProfile& t = targets_[i];
    if (!index.emplace(t.id, i).second) {
      throw Error(ErrorCode::kDuplicateTarget, "target id '" + t.id + "'");
    }
    if (t.per_packet_latency_ns == 0 || !(t.service_rate_pps > 0)) {
      throw Error(ErrorCode::kInvariantViolation,
                  "target '" + t.id + "' needs positive latency and rate");
    }
    if (t.kind == TargetKind::kAsic && !t.supported_externs.empty()) {
      throw Error(ErrorCode::kInvariantViolation,
                  "asic target '" + t.id + "' cannot support externs");
    }
    if (t.network_facing && t.network_bandwidth_bps == 0) {
      throw Error(ErrorCode::kInvariantViolation,
                  "target '" + t.id + "' needs a positive network bandwidth");
    }
  }
  if (targets_.empty()) {
    throw Error(ErrorCode::kNetworkFacing, "topology has no targets");
  }
  std::vector<std::string> facing;
  for (const TargetProfile& t : targets_) {
    if (t.network_facing) facing.push_back(t.id);
  }
  if (facing.size() != 1) {
    throw Error(ErrorCode::kNetworkFacing,
                "expected exactly one network-facing target, found " +
                    std::to_string(facing.size()));
  }

  std::map<std::string, std::vector<std::string>> adj;
  std::set<std::pair<std::string, std::string>> seen;
  for (const Link& l : links_) {
    if (!index.contains(l.a) || !index.contains(l.b)) {
      throw Error(ErrorCode::kUnresolvedReference,
                  "link " + l.a + "-" + l.b + " names an unknown target");
    }
    if (l.a == l.b) {
      throw Error(ErrorCode::kInvariantViolation, "self link on " + l.a);
    }
    if (l.bandwidth_bps == 0) {
      throw Error(ErrorCode::kInvariantViolation,
                  "link " + l.a + "-" + l.b + " needs positive bandwidth");
    }
    if (!seen.insert(std::minmax(l.a, l.b)).second) {
      throw Error(ErrorCode::kNotAChain,
                  "parallel links between " + l.a + " and " + l.b);
    }
    adj[l.a].push_back(l.b);
    adj[l.b].push_back(l.a);
  }

  // BFS from the network-facing target gives both connectivity and order.
  std::set<std::string> visited{facing.front()};
  std::queue<std::string> q;
  q.push(facing.front());
  while (!q.empty()) {
    const std::string cur = q.front();
    q.pop();
    chain_.push_back(cur);
    for (const std::string& n : adj[cur]) {
      if (visited.insert(n).second) q.push(n);
    }
  }
  if (chain_.size() != targets_.size()) {
    throw Error(ErrorCode::kDisconnected,
                std::to_string(targets_.size() - chain_.size()) +
                    " target(s) unreachable from " + facing.front());
  }
  if (links_.size() != targets_.size() - 1) {
    throw Error(ErrorCode::kNotAChain, "link graph contains a cycle");
  }
  for (const auto& [id, ns] : adj) {
    if (ns.size() > 2) {
      throw Error(ErrorCode::kNotAChain, "target '" + id + "' has degree " +
                                             std::to_string(ns.size()));
    }
  }
  if (adj[facing.front()].size() > 1) {
    throw Error(ErrorCode::kNotAChain,
                "network-facing target must be an end of the chain");
  }
}

const TargetProfile* Topology::Find(const std::string& id) const {
  for (const TargetProfile& t : targets_) {
    if (t.id == id) return &t;
  }
  return nullptr;
}

int Topology::ChainPosition(const std::string& id) const {
  for (std::size_t i = 0; i < chain_.size(); ++i) {
    if (chain_[i] == id) return static_cast<int>(i);
  }
  return -1;
}

const Link* Topology::LinkBetween(const std::string& a,
                                  const std::string& b) const {
  for (const Link& l : links_) {
    if ((l.a == a && l.b == b) || (l.a == b && l.b == a)) return &l;
  }
  return nullptr;
}

Topology LoadTopology(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kSyntax,
                "byte " + std::to_string(e.byte) + ": " + e.what());
  }
  CheckKeys(doc, "$", {"targets", "links"});
  if (!doc.contains("targets") || !doc["targets"].is_array()) {
    Fail("$", "missing 'targets' array");
  }
  std::vector<TargetProfile> targets;
  for (std::size_t i = 0; i < doc["targets"].size(); ++i) {
    const json& jt = doc["targets"][i];
    const std::string path = "$.targets[" + std::to_string(i) + "]";
    CheckKeys(jt, path,
              {"id", "kind", "network_facing", "table_capacity_entries",
               "per_packet_latency_ns", "service_rate_pps",
               "supported_externs", "network_bandwidth_bps", "levels"});
    if (!jt.contains("id") || !jt["id"].is_string()) Fail(path, "missing 'id'");
    if (!jt.contains("kind") || !jt["kind"].is_string()) {
      Fail(path, "missing 'kind'");
    }
    const auto kind = ParseKind(jt["kind"].get<std::string>());
    if (!kind) Fail(path + ".kind", "unknown target kind");
    TargetProfile t = DefaultProfile(*kind, jt["id"].get<std::string>());
    if (jt.contains("network_facing")) {
      if (!jt["network_facing"].is_boolean()) {
        Fail(path + ".network_facing", "expected a boolean");
      }
      t.network_facing = jt["network_facing"].get<bool>();
    }
    t.table_capacity =
        GetUnsigned(jt, "table_capacity_entries", path, t.table_capacity);
    t.per_packet_latency_ns =
        GetUnsigned(jt, "per_packet_latency_ns", path, t.per_packet_latency_ns);
    t.network_bandwidth_bps =
        GetUnsigned(jt, "network_bandwidth_bps", path, t.network_bandwidth_bps);
    if (jt.contains("service_rate_pps")) {
      if (!jt["service_rate_pps"].is_number()) {
        Fail(path + ".service_rate_pps", "expected a number");
      }
      t.service_rate_pps = jt["service_rate_pps"].get<double>();
    }
    if (jt.contains("supported_externs")) {
      if (!jt["supported_externs"].is_array()) {
        Fail(path + ".supported_externs", "expected an array");
      }
      t.supported_externs.clear();
      for (const json& e : jt["supported_externs"]) {
        auto k = e.is_string() ? ParseExternKind(e.get<std::string>())
                               : std::nullopt;
        if (!k) Fail(path + ".supported_externs", "unknown extern kind");
        t.supported_externs.insert(*k);
      }
    }
    if (jt.contains("levels")) {
      const json& jl = jt["levels"];
      CheckKeys(jl, path + ".levels",
                {"programmability", "throughput", "latency", "power"});
      auto level = [&](const char* key, CapabilityLevel& out) {
        if (!jl.contains(key)) return;
        auto l = jl[key].is_string() ? ParseLevel(jl[key].get<std::string>())
                                     : std::nullopt;
        if (!l) Fail(path + ".levels." + key, "unknown capability level");
        out = *l;
      };
      level("programmability", t.levels.programmability);
      level("throughput", t.levels.throughput);
      level("latency", t.levels.latency);
      level("power", t.levels.power);
    }
    targets.push_back(std::move(t));
  }
  std::vector<Link> links;
  if (doc.contains("links")) {
    if (!doc["links"].is_array()) Fail("$.links", "expected an array");
    for (std::size_t i = 0; i < doc["links"].size(); ++i) {
      const json& jl = doc["links"][i];
      const std::string path = "$.links[" + std::to_string(i) + "]";
      CheckKeys(jl, path, {"a", "b", "latency_ns", "bandwidth_bps"});
      if (!jl.contains("a") || !jl["a"].is_string() || !jl.contains("b") ||
          !jl["b"].is_string()) {
        Fail(path, "links need string endpoints 'a' and 'b'");
      }
      Link l = DefaultLink(jl["a"].get<std::string>(), jl["b"].get<std::string>());
      l.latency_ns = GetUnsigned(jl, "latency_ns", path, l.latency_ns);
      l.bandwidth_bps = GetUnsigned(jl, "bandwidth_bps", path, l.bandwidth_bps);
      links.push_back(std::move(l));
    }
  }
  return Topology(std::move(targets), std::move(links));
}

std::string SerializeTopology(const Topology& topology) {
  ojson doc;
  ojson targets = ojson::array();
  for (const TargetProfile& t : topology.targets()) {
    ojson jt;
    jt["id"] = t.id;
    jt["kind"] = TargetKindName(t.kind);
    jt["network_facing"] = t.network_facing;
    jt["table_capacity_entries"] = t.table_capacity;
    jt["per_packet_latency_ns"] = t.per_packet_latency_ns;
    jt["service_rate_pps"] = t.service_rate_pps;
    ojson externs = ojson::array();
    for (ExternKind k : t.supported_externs) externs.push_back(ExternKindName(k));
    jt["supported_externs"] = externs;
    jt["network_bandwidth_bps"] = t.network_bandwidth_bps;
    jt["levels"] = {
        {"programmability", CapabilityLevelName(t.levels.programmability)},
        {"throughput", CapabilityLevelName(t.levels.throughput)},
        {"latency", CapabilityLevelName(t.levels.latency)},
        {"power", CapabilityLevelName(t.levels.power)}};
    targets.push_back(jt);
  }
  ojson links = ojson::array();
  for (const Link& l : topology.links()) {
    links.push_back({{"a", l.a},
                     {"b", l.b},
                     {"latency_ns", l.latency_ns},
                     {"bandwidth_bps", l.bandwidth_bps}});
  }
  doc["targets"] = targets;
  doc["links"] = links;
  return doc.dump(2) + "\n";
}

CapabilityResult CapabilityCheck(const TargetProfile& target,
                                 const Requirement& requirement,
                                 std::uint64_t used_entries) {
  if (const auto* ext = std::get_if<ExternRequirement>(&requirement)) {
    if (target.supported_externs.contains(ext->kind)) return {true, ""};
    if (target.supported_externs.empty()) {
      return {false, "externs unsupported on " +
                         std::string(TargetKindName(target.kind))};
    }
    return {false, std::string(ExternKindName(ext->kind)) +
                       " unsupported on " + target.id};
  }
  const auto& space = std::get<TableSpaceRequirement>(requirement);
  const std::uint64_t remaining =
      used_entries >= target.table_capacity ? 0
                                            : target.table_capacity - used_entries;
  if (space.entries <= remaining) return {true, ""};
  return {false, std::to_string(space.entries) + " entries requested, " +
                     std::to_string(remaining) + " remaining on " + target.id};
}

}  // namespace hdp
