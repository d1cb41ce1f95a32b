// Copyright 2026 The HDP Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef HDP_VALIDATE_H_
#define HDP_VALIDATE_H_

#include <string>
#include <vector>

#include "hdp/pipeline.h"

namespace hdp {

struct Diagnostic {
  std::string rule;      // e.g. "parser-not-acyclic"
  std::string location;  // e.g. "parser.states[parse_eth]"
  std::string message;

  bool operator==(const Diagnostic&) const = default;
};

inline constexpr char kRuleUnresolved[] = "unresolved-reference";

// Empty iff the program satisfies every structural rule.
std::vector<Diagnostic> ValidateProgram(const Pipeline& program);

struct ParserPath {
  std::vector<std::string> states;
  std::vector<std::string> headers;  // extracted, in order
  bool accepted = false;
};

// All start-to-terminal paths. Requires an acyclic, resolved parser; returns
// an empty list otherwise.
std::vector<ParserPath> EnumerateParserPaths(const Pipeline& program);

// Fields used by any parser select.
std::vector<FieldRef> ParserSelectFields(const Pipeline& program);

}  // namespace hdp

#endif  // HDP_VALIDATE_H_
