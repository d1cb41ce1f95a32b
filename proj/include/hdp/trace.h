// Copyright 2026 The HDP Authors
// SPDX-License-Identifier: Apache-2.0

// Traffic traces: one record per line, "<arrival_ns> <ingress_port> <hex>".
// Blank lines and lines starting with '#' are skipped.

#ifndef HDP_TRACE_H_
#define HDP_TRACE_H_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "hdp/bits.h"

namespace hdp {

struct TraceRecord {
  std::uint64_t arrival_ns = 0;
  std::uint16_t ingress_port = 0;
  Bytes packet;

  bool operator==(const TraceRecord&) const = default;
};

using TrafficTrace = std::vector<TraceRecord>;

// Throws Error(kSyntax) naming the line; arrival times must not decrease.
TrafficTrace ParseTrace(std::string_view text);
std::string SerializeTrace(const TrafficTrace& trace);

}  // namespace hdp

#endif  // HDP_TRACE_H_
