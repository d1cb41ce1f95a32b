// Copyright 2026 The HDP Authors
// SPDX-License-Identifier: Apache-2.0

// Monolithic single-target executor. It is the semantic oracle every
// partitioned execution is compared against.

#ifndef HDP_REFERENCE_H_
#define HDP_REFERENCE_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "hdp/exec.h"
#include "hdp/pipeline.h"

namespace hdp {

struct ReferenceResult {
  Verdict verdict;
  std::string reject_reason;  // non-empty iff the parser rejected
  std::vector<std::string> trace;
};

// Mutates only `externs`. Deterministic in all inputs.
ReferenceResult ExecuteReference(const Pipeline& program,
                                 std::span<const std::uint8_t> packet,
                                 std::uint16_t ingress_port,
                                 const TableState& tables, ExternState& externs);

}  // namespace hdp

#endif  // HDP_REFERENCE_H_
