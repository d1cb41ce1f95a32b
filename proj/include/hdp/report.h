// Copyright 2026 The HDP Authors
// SPDX-License-Identifier: Apache-2.0

// Run summary with the three platform flags. Every flag is computed from the
// plan and the run:
//   generic_externs    the plan hosts every extern and there is at least one
//   extensible_tables  some table holds more entries than the front target
//   line_rate          sustainable rate >= configured line rate

#ifndef HDP_REPORT_H_
#define HDP_REPORT_H_

#include <cstdint>
#include <optional>
#include <string>

#include "hdp/partition.h"
#include "hdp/runtime.h"
#include "json.hpp"

namespace hdp {

struct ReportFlags {
  bool generic_externs = false;
  bool extensible_tables = false;
  bool line_rate = false;

  bool operator==(const ReportFlags&) const = default;
};

struct Report {
  std::string scenario;
  OverheadReport overhead;
  std::uint64_t front_capacity = 0;
  std::uint64_t max_logical_capacity = 0;
  std::optional<double> front_hit_fraction;  // split tables only
  SimStats stats;
  std::optional<double> sustainable_rate;
  double line_rate_pps = 0;
  ReportFlags flags;
};

// floor(bandwidth / ((frame + overhead) * 8))
double LineRatePps(double bandwidth_bps, std::uint64_t frame_bytes,
                   std::uint64_t overhead_bytes);

Report BuildReport(const std::string& scenario, const Pipeline& program,
                   const PartitionPlan& plan, const SimStats& stats,
                   double line_rate_pps);

nlohmann::ordered_json ReportToJson(const Report& report);

}  // namespace hdp

#endif  // HDP_REPORT_H_
