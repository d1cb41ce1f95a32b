// Copyright 2026 The HDP Authors
// SPDX-License-Identifier: Apache-2.0

// Scenario files tie a program, a topology, placement constraints, table
// entries and traffic together. Paths are relative to the scenario file.
//
// {
//   "name": "l2_hdp",
//   "program": "../programs/l2_counter.prog.json",
//   "topology": "../topologies/asic_fpga.topo",
//   "constraints": {...},                       // see ParseConstraints
//   "cache_policy": {"l2": {"promotion_threshold": 1, "epoch_length": 100}},
//   "entries": [{"table": "l2", "key": "00:00:00:00:00:01",
//                "action": "forward", "args": [1]}],
//   "synthetic_entries": {"table": "l2", "count": 2048, "action": "forward",
//                         "ports": [1, 2, 3]},
//   "trace": "../traces/l2_small.trace",
//   "synthetic_trace": {"packets": 10000, "hot_keys": 64, "hot_fraction": 0.99,
//                       "miss_fraction": 0.0, "interarrival_ns": 100,
//                       "frame_bytes": 64, "ingress_port": 0},
//   "seed": 1,
//   "line_rate": {"frame_bytes": 64, "overhead_bytes": 20}   // or {"pps": x}
// }
//
// Synthetic entries and traces draw from one mt19937_64 seeded with `seed`,
// entries first.

#ifndef HDP_SCENARIO_H_
#define HDP_SCENARIO_H_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hdp/control_plane.h"
#include "hdp/partition.h"
#include "hdp/pipeline.h"
#include "hdp/report.h"
#include "hdp/runtime.h"
#include "hdp/topology.h"
#include "hdp/trace.h"
#include "json.hpp"

namespace hdp {

struct EntrySpec {
  std::string table;
  nlohmann::json key;
  nlohmann::json action;
  nlohmann::json args;
};

struct SyntheticEntries {
  std::string table;
  std::uint64_t count = 0;
  std::string action;  // empty: first non-default action of the table
  std::vector<std::uint64_t> ports{1};
};

struct SyntheticTrace {
  std::string table;  // empty: the table of the first apply stage
  std::uint64_t packets = 0;
  std::uint64_t hot_keys = 0;
  double hot_fraction = 0;
  double miss_fraction = 0;
  std::uint64_t interarrival_ns = 100;
  std::size_t frame_bytes = 64;
  std::uint16_t ingress_port = 0;
};

struct LineRateSpec {
  std::optional<double> pps;
  std::uint64_t frame_bytes = 64;
  std::uint64_t overhead_bytes = 20;
};

struct Scenario {
  std::string name;
  std::string program_path;
  std::string topology_path;
  nlohmann::json constraints = nlohmann::json::object();
  std::map<std::string, CachePolicy> policies;
  std::vector<EntrySpec> entries;
  std::optional<SyntheticEntries> synthetic_entries;
  std::optional<std::string> trace_path;
  std::optional<SyntheticTrace> synthetic_trace;
  std::uint64_t seed = 0;
  LineRateSpec line_rate;
};

// Throws Error(kIo) or Error(kSyntax).
Scenario ParseScenario(std::string_view text, const std::string& base_dir);
Scenario LoadScenario(const std::string& path);

struct ScenarioInputs {
  Pipeline program;
  Topology topology;
  PlacementConstraint constraint;
};

// Loads and validates the program and topology, parses the constraints.
ScenarioInputs LoadInputs(const Scenario& scenario);

// A packet that the program parses with `key` in the key fields of `table`;
// zero elsewhere except parser select fields, padded to `frame_bytes`.
// Throws Error(kInvalidArgument) if no parser path extracts the key.
Bytes PacketForKey(const Pipeline& program, const MatchTable& table,
                   const Bytes& key, std::size_t frame_bytes);

struct ScenarioResult {
  Report report;
  std::vector<PathRecord> paths;
};

// Partition, install entries, run traffic, summarize. Infeasible placements
// throw Error with a code for which IsInfeasible() holds.
ScenarioResult RunScenario(const Scenario& scenario);

}  // namespace hdp

#endif  // HDP_SCENARIO_H_
