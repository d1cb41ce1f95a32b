// Copyright 2026 The HDP Authors
// SPDX-License-Identifier: Apache-2.0

#include "hdp/trace.h"

#include <limits>
#include <sstream>

#include "hdp/error.h"

namespace hdp {

TrafficTrace ParseTrace(std::string_view text) {
  TrafficTrace out;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    const auto fail = [&](const std::string& what) {
      throw Error(ErrorCode::kSyntax,
                  "trace line " + std::to_string(lineno) + ": " + what);
    };
    std::istringstream fields(line);
    std::string t, port, hex, extra;
    if (!(fields >> t >> port >> hex) || (fields >> extra)) {
      fail("expected <arrival_ns> <ingress_port> <hex>");
    }
    TraceRecord r;
    try {
      std::size_t used = 0;
      r.arrival_ns = std::stoull(t, &used);
      if (used != t.size() || t[0] == '-') fail("bad arrival time '" + t + "'");
      const unsigned long long p = std::stoull(port, &used);
      if (used != port.size() || port[0] == '-' ||
          p > std::numeric_limits<std::uint16_t>::max()) {
        fail("bad ingress port '" + port + "'");
      }
      r.ingress_port = static_cast<std::uint16_t>(p);
    } catch (const std::logic_error&) {
      fail("bad number");
    }
    try {
      r.packet = FromHex(hex);
    } catch (const Error&) {
      fail("bad packet hex");
    }
    if (!out.empty() && r.arrival_ns < out.back().arrival_ns) {
      fail("arrival time decreases");
    }
    out.push_back(std::move(r));
  }
  return out;
}

std::string SerializeTrace(const TrafficTrace& trace) {
  std::string out;
  for (const TraceRecord& r : trace) {
    out += std::to_string(r.arrival_ns) + " " + std::to_string(r.ingress_port) +
           " " + ToHex(r.packet) + "\n";
  }
  return out;
}

}  // namespace hdp
