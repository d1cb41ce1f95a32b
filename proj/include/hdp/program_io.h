// Copyright 2026 The HDP Authors
// SPDX-License-Identifier: Apache-2.0

// JSON program files. Top-level keys: name, headers, parser, actions,
// tables, externs, stages, deparser. Widths are in bits; 48-bit values are
// written as lowercase colon-hex.

#ifndef HDP_PROGRAM_IO_H_
#define HDP_PROGRAM_IO_H_

#include <string>
#include <string_view>

#include "hdp/pipeline.h"
#include "json.hpp"

namespace hdp {

// Parses and validates a program. Throws Error with kSyntax (position or
// JSON path in the message), kUnresolvedReference (names the symbol) or
// kInvariantViolation (names the rule).
Pipeline LoadProgram(std::string_view text);

// Parses without running the validator; structural/format errors still
// throw. Useful for inspecting invalid programs.
Pipeline ParseProgram(std::string_view text);

nlohmann::ordered_json ProgramToJson(const Pipeline& program);
std::string SerializeProgram(const Pipeline& program);

// Reads a whole file; throws kIo.
std::string ReadFile(const std::string& path);

}  // namespace hdp

#endif  // HDP_PROGRAM_IO_H_
