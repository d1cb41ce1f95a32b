// Copyright 2026 The HDP Authors
// SPDX-License-Identifier: Apache-2.0

// Random small programs, topologies, constraints and traffic for the
// equivalence tests.

#ifndef HDP_TESTS_RANDOM_PROGRAM_H_
#define HDP_TESTS_RANDOM_PROGRAM_H_

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "hdp/partition.h"
#include "hdp/pipeline.h"
#include "hdp/topology.h"
#include "hdp/trace.h"
#include "json.hpp"

namespace hdp::testing {

// Valid (ValidateProgram is empty) programs with 1-3 headers, a DAG parser,
// 1-3 tables and optional counter externs. Field values stay in small pools
// so random traffic hits table entries often.
Pipeline RandomProgram(std::mt19937_64& rng);

// A chain of 2-3 targets; the front never hosts externs.
Topology RandomTopology(std::mt19937_64& rng);

// Per-table split modes chosen at random.
nlohmann::json RandomConstraints(std::mt19937_64& rng, const Pipeline& program);

// Random key for `table` drawn from the small value pool.
Bytes RandomKey(std::mt19937_64& rng, const Pipeline& program, const MatchTable& table);
ActionCall RandomCall(std::mt19937_64& rng, const Pipeline& program,
                      const std::string& action);

// Mostly parseable packets along random parser paths, some truncated.
TrafficTrace RandomTrace(std::mt19937_64& rng, const Pipeline& program,
                         std::size_t packets);

}  // namespace hdp::testing

#endif  // HDP_TESTS_RANDOM_PROGRAM_H_
