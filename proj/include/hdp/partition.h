// Copyright 2026 The HDP Authors
// SPDX-License-Identifier: Apache-2.0

// Splits one logical pipeline into per-target sub-pipelines.
//
// Placement is greedy and deterministic:
//   1. targets are ordered by chain distance from the network-facing target;
//   2. each extern goes to the nearest target supporting its kind;
//   3. tables are placed per their split mode (none, static_split,
//      asic_cache), non-split tables on the nearest target with room;
//   4. every change of executing target is bridged by an encap/decap pair,
//      and each participating target gets a copy of the parser/deparser.
//
// A split table executes as two steps: a probe of the front partition on the
// network-facing target and, on miss, a lookup of the rear partition. A rear
// miss returns to the front, which applies the table's default action.

#ifndef HDP_PARTITION_H_
#define HDP_PARTITION_H_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hdp/pipeline.h"
#include "hdp/topology.h"
#include "json.hpp"

namespace hdp {

enum class SplitMode { kNone, kStaticSplit, kAsicCache };

std::string_view SplitModeName(SplitMode mode);

struct TableSplit {
  SplitMode mode = SplitMode::kNone;
  std::uint64_t asic_share = 0;      // kStaticSplit
  std::uint64_t cache_capacity = 0;  // kAsicCache

  bool operator==(const TableSplit&) const = default;
};

struct PlacementConstraint {
  std::map<std::string, std::string> pins;  // stage name -> target id
  std::map<std::string, TableSplit> tables;
  std::map<std::string, std::uint64_t> capacity_overrides;
};

// The "constraints" section of a scenario:
//   {"pins": {"stage": "target"},
//    "tables": {"l2": {"mode": "asic_cache", "cache_capacity": 1024}},
//    "capacity_overrides": {"asic": 512}}
PlacementConstraint ParseConstraints(const nlohmann::json& section);

struct TablePartition {
  std::string target;
  std::uint64_t capacity = 0;
  PartitionRole role = PartitionRole::kAuthoritative;

  bool operator==(const TablePartition&) const = default;
};

struct TablePlacement {
  std::string table;
  SplitMode mode = SplitMode::kNone;
  // One partition, or front then rear for a split table.
  std::vector<TablePartition> partitions;

  bool split() const { return partitions.size() == 2; }
  const TablePartition& front() const { return partitions.front(); }
  const TablePartition& rear() const { return partitions.back(); }
  // Entries the logical table can hold; cache slots add nothing.
  std::uint64_t LogicalCapacity() const;

  bool operator==(const TablePlacement&) const = default;
};

struct StagePlacement {
  std::string home;  // executing target; the rear target for split tables
  bool split = false;
  std::string front;  // split only

  bool operator==(const StagePlacement&) const = default;
};

enum class EntryKind {
  kRunFrom,       // continue the stage list at `stage`
  kRearLookup,    // look up the rear partition of split stage `stage`
  kFrontDefault,  // apply the default action of split stage `stage`
  kEgress,        // pipeline finished elsewhere; finalize the verdict
};

std::string_view EntryKindName(EntryKind kind);

// A resume point, identified on the wire by its stage_id.
struct EntryPoint {
  std::uint8_t stage_id = 0;
  std::string target;
  EntryKind kind = EntryKind::kRunFrom;
  std::size_t stage = 0;

  bool operator==(const EntryPoint&) const = default;
};

// A bridge crossing: `from` encapsulates at `at_stage` towards `to_entry`.
struct Hop {
  std::string from;
  std::size_t at_stage = 0;
  std::uint8_t to_entry = 0;

  bool operator==(const Hop&) const = default;
};

struct SubPipeline {
  std::string target;
  std::vector<std::size_t> stages;  // executed (fully or as one split step)
  std::vector<std::uint8_t> entry_ids;  // decap bridges
  std::vector<std::uint8_t> exit_ids;   // encap bridges

  bool operator==(const SubPipeline&) const = default;
};

struct OverheadReport {
  std::size_t participating_targets = 0;
  std::size_t parser_replicas = 0;
  std::size_t extra_parser_replicas = 0;
  std::size_t bridges = 0;

  bool operator==(const OverheadReport&) const = default;
};

struct PartitionPlan {
  std::string front;
  std::vector<SubPipeline> subpipelines;  // chain order
  std::vector<StagePlacement> stages;     // parallel to Pipeline::stages
  std::vector<TablePlacement> tables;
  std::map<std::string, std::string> extern_hosts;
  std::vector<EntryPoint> entries;
  std::vector<Hop> hops;
  std::map<std::string, std::uint64_t> capacities;  // after overrides
  OverheadReport overhead;

  const EntryPoint* FindEntry(std::uint8_t stage_id) const;
  std::optional<std::uint8_t> EntryId(const std::string& target, EntryKind kind,
                                      std::size_t stage) const;
  const TablePlacement* FindTable(const std::string& table) const;
  const SubPipeline* FindSubPipeline(const std::string& target) const;
  bool Participates(const std::string& target) const {
    return FindSubPipeline(target) != nullptr;
  }

  bool operator==(const PartitionPlan&) const = default;
};

// Throws Error with kUnsupportedExtern, kCapacityExceeded, kUnmappablePin or
// kInfeasible.
PartitionPlan Partition(const Pipeline& program, const Topology& topology,
                        const PlacementConstraint& constraint);

nlohmann::ordered_json PlanToJson(const PartitionPlan& plan);

// One program text per participating target, keyed by target id.
std::map<std::string, std::string> EmitSubprograms(const Pipeline& program,
                                                   const PartitionPlan& plan);
Pipeline SubprogramFor(const Pipeline& program, const PartitionPlan& plan,
                       const std::string& target);

}  // namespace hdp

#endif  // HDP_PARTITION_H_
