// Copyright 2026 The HDP Authors
// SPDX-License-Identifier: Apache-2.0

#include "hdp/report.h"

#include <algorithm>
#include <cmath>

namespace hdp {

using ojson = nlohmann::ordered_json;

double LineRatePps(double bandwidth_bps, std::uint64_t frame_bytes,
                   std::uint64_t overhead_bytes) {
  return std::floor(bandwidth_bps /
                    (static_cast<double>(frame_bytes + overhead_bytes) * 8.0));
}

Report BuildReport(const std::string& scenario, const Pipeline& program,
                   const PartitionPlan& plan, const SimStats& stats,
                   double line_rate_pps) {
  Report r;
  r.scenario = scenario;
  r.overhead = plan.overhead;
  r.front_capacity = plan.capacities.at(plan.front);
  for (const TablePlacement& tp : plan.tables) {
    r.max_logical_capacity = std::max(r.max_logical_capacity, tp.LogicalCapacity());
  }

  // Hits in front partitions of split tables over packets offered.
  std::uint64_t front_hits = 0;
  bool any_split = false;
  for (const TablePlacement& tp : plan.tables) {
    if (!tp.split()) continue;
    any_split = true;
    const TablePartition& f = tp.front();
    const std::string label =
        tp.table + "/" + f.target + "/" +
        (f.role == PartitionRole::kCache ? "cache" : "authoritative");
    if (auto it = stats.partitions.find(label); it != stats.partitions.end()) {
      front_hits += it->second.hits;
    }
  }
  if (any_split && stats.packets_in > 0) {
    r.front_hit_fraction =
        static_cast<double>(front_hits) / static_cast<double>(stats.packets_in);
  }

  r.stats = stats;
  r.sustainable_rate = stats.sustainable_rate;
  r.line_rate_pps = line_rate_pps;

  r.flags.generic_externs = !program.externs.empty();
  for (const ExternDecl& e : program.externs) {
    if (!plan.extern_hosts.contains(e.name)) r.flags.generic_externs = false;
  }
  r.flags.extensible_tables = r.max_logical_capacity > r.front_capacity;
  r.flags.line_rate = r.sustainable_rate && *r.sustainable_rate >= line_rate_pps;
  return r;
}

ojson ReportToJson(const Report& r) {
  ojson out;
  out["scenario"] = r.scenario;
  out["overhead"] = {{"participating_targets", r.overhead.participating_targets},
                     {"parser_replicas", r.overhead.parser_replicas},
                     {"extra_parser_replicas", r.overhead.extra_parser_replicas},
                     {"bridges", r.overhead.bridges}};
  out["capacity"] = {{"front_target", r.front_capacity},
                     {"max_logical_table", r.max_logical_capacity}};
  out["front_hit_fraction"] =
      r.front_hit_fraction ? ojson(*r.front_hit_fraction) : ojson();
  out["stats"] = StatsToJson(r.stats);
  out["sustainable_rate_pps"] =
      r.sustainable_rate ? ojson(*r.sustainable_rate) : ojson("no traffic");
  out["line_rate_pps"] = r.line_rate_pps;
  out["flags"] = {{"generic_externs", r.flags.generic_externs},
                  {"extensible_tables", r.flags.extensible_tables},
                  {"line_rate", r.flags.line_rate}};
  return out;
}

}  // namespace hdp
