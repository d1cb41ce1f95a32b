// Copyright 2026 The HDP Authors
// SPDX-License-Identifier: Apache-2.0

// The single control-plane entity. Each logical table is presented as one
// table whatever its split; the view decides where entries live, keeps the
// front cache coherent with the authoritative partitions and applies cache
// promotions once per epoch.
//
// Promotion/eviction in asic_cache mode: at the end of each epoch, entries
// whose front-observed miss count reached the threshold are promoted in
// descending miss count (ties: ascending key bytes). When the cache is full
// the least-recently-used cached entry is evicted, where "use" is the later
// of its promotion time and its last front hit (ties: ascending key). An
// entry promoted in the current epoch is never evicted by a later candidate
// of the same epoch; promotion stops instead.
//
// All mutations happen between packets. Writers must be serialized.

#ifndef HDP_CONTROL_PLANE_H_
#define HDP_CONTROL_PLANE_H_

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "hdp/partition.h"
#include "hdp/pipeline.h"
#include "json.hpp"

namespace hdp {

struct CachePolicy {
  SplitMode mode = SplitMode::kNone;
  std::uint64_t cache_capacity = 0;
  std::uint64_t promotion_threshold = 1;
  std::uint64_t epoch_length = 1000;  // packets

  bool operator==(const CachePolicy&) const = default;
};

struct PlacementDecision {
  std::string authoritative;  // target id
  std::size_t partition = 0;  // index into TablePlacement::partitions
  std::optional<std::string> cached_at;

  bool operator==(const PlacementDecision&) const = default;
};

struct LogicalEntry {
  ActionCall action;
  std::size_t partition = 0;
  bool cached = false;
  std::uint64_t last_use = 0;  // meaningful while cached
  std::uint64_t front_hits = 0;
  std::uint64_t front_misses = 0;
};

struct EpochResult {
  std::vector<Bytes> promoted;
  std::vector<Bytes> evicted;  // evicted[i] made room for promoted[j] in order
};

class LogicalTableView {
 public:
  LogicalTableView(const Pipeline& program, const MatchTable& table,
                   const TablePlacement& placement, CachePolicy policy);

  const std::string& name() const { return table_->name; }
  const CachePolicy& policy() const { return policy_; }
  const TablePlacement& placement() const { return placement_; }

  // Throws DuplicateKey, CapacityExceeded or InvalidArgument.
  PlacementDecision Insert(const Bytes& key, const ActionCall& action);
  // Removes the entry and any cached copy. Throws NotFound.
  void Delete(const Bytes& key);
  // No-op unless the policy is asic_cache.
  EpochResult RunEpoch(const std::map<Bytes, std::uint64_t>& miss_counts,
                       std::uint64_t now);

  void RecordFrontHit(const Bytes& key, std::uint64_t time);
  void RecordFrontMisses(const Bytes& key, std::uint64_t count);

  const std::map<Bytes, LogicalEntry>& entries() const { return entries_; }
  std::optional<PlacementDecision> Find(const Bytes& key) const;
  TableEntries PartitionContents(std::size_t partition) const;
  std::uint64_t Occupancy(std::size_t partition) const;
  std::uint64_t LogicalCapacity() const { return placement_.LogicalCapacity(); }
  std::vector<Bytes> CachedKeys() const;

  // Empty iff every cached key exists authoritatively with the same action
  // and no partition is over capacity.
  std::vector<std::string> CoherenceViolations() const;

  // Parses a key given as one value (single-field keys) or an array.
  Bytes ParseKey(const nlohmann::json& key) const;
  nlohmann::ordered_json KeyJson(const Bytes& key) const;
  ActionCall ParseAction(const nlohmann::json& action,
                         const nlohmann::json& args) const;

 private:
  std::optional<std::size_t> CachePartition() const;
  void EraseFromCache(const Bytes& key, LogicalEntry& entry);

  const Pipeline* program_;
  const MatchTable* table_;
  TablePlacement placement_;
  CachePolicy policy_;
  std::size_t key_bytes_;
  std::map<Bytes, LogicalEntry> entries_;
  std::vector<std::uint64_t> occupancy_;
  std::set<std::pair<std::uint64_t, Bytes>> lru_;  // (last_use, key)
};

// Read access to extern state living in the data plane.
class CounterSource {
 public:
  virtual ~CounterSource() = default;
  virtual std::optional<std::uint64_t> ReadCounter(const std::string& name,
                                                   bool reset) = 0;
};

class ControlPlane {
 public:
  // Policies are keyed by table; tables without an entry get the mode of
  // their placement and default parameters.
  ControlPlane(const Pipeline& program, const PartitionPlan& plan,
               std::map<std::string, CachePolicy> policies = {});

  ControlPlane(const ControlPlane&) = delete;
  ControlPlane& operator=(const ControlPlane&) = delete;

  LogicalTableView& view(const std::string& table);
  const LogicalTableView& view(const std::string& table) const;
  const std::map<std::string, LogicalTableView>& views() const { return views_; }

  PlacementDecision Insert(const std::string& table, const Bytes& key,
                           const ActionCall& action);
  void Delete(const std::string& table, const Bytes& key);
  EpochResult RunEpoch(const std::string& table,
                       const std::map<Bytes, std::uint64_t>& miss_counts,
                       std::uint64_t now);
  // Throws UnknownExtern when the plan does not place `extern_name`.
  std::uint64_t ReadCounter(const std::string& extern_name, bool reset);

  void AttachDataPlane(CounterSource* source) { data_plane_ = source; }
  // Bumped by every mutation; the data plane resyncs when it changes.
  std::uint64_t generation() const { return generation_; }
  void Touch() { ++generation_; }

  nlohmann::ordered_json Snapshot() const;

  // JSON request/response API:
  //   {"op":"insert","table":t,"key":k,"action":a,"args":[...]}
  //   {"op":"delete","table":t,"key":k}
  //   {"op":"read_counter","extern":e,"reset":false}
  //   {"op":"snapshot"}
  // Responses: {"status":"ok","payload":...} or
  //            {"status":"error","error":<code>,"message":...}.
  nlohmann::ordered_json Handle(const nlohmann::json& request);
  std::string HandleLine(std::string_view line);

 private:
  const Pipeline* program_;
  const PartitionPlan* plan_;
  std::map<std::string, LogicalTableView> views_;
  CounterSource* data_plane_ = nullptr;
  std::uint64_t generation_ = 0;
};

}  // namespace hdp

#endif  // HDP_CONTROL_PLANE_H_
