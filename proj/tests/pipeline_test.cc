// Copyright 2026 The HDP Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <random>

#include "hdp/error.h"
#include "hdp/exec.h"
#include "hdp/program_io.h"
#include "hdp/validate.h"
#include "json.hpp"
#include "random_program.h"
#include "test_util.h"

namespace hdp {
namespace {

using nlohmann::json;
using testing::L2Program;
using testing::SourcePath;

json L2Json() { return json::parse(ReadFile(SourcePath("programs/l2_counter.prog.json"))); }

ErrorCode LoadError(const std::string& text) {
  try {
    LoadProgram(text);
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "program loaded";
  return ErrorCode::kIo;
}

bool HasRule(const std::vector<Diagnostic>& diags, const std::string& rule) {
  for (const Diagnostic& d : diags) {
    if (d.rule == rule) return true;
  }
  return false;
}

TEST(LoadProgram, BundledL2Counter) {
  const Pipeline p = L2Program();
  ASSERT_EQ(p.headers.size(), 1u);
  EXPECT_EQ(p.headers[0].name, "ethernet");
  ASSERT_EQ(p.headers[0].fields.size(), 3u);
  EXPECT_EQ(p.headers[0].fields[0], (FieldDef{"dst", 48}));
  EXPECT_EQ(p.headers[0].fields[1], (FieldDef{"src", 48}));
  EXPECT_EQ(p.headers[0].fields[2], (FieldDef{"ethertype", 16}));
  ASSERT_EQ(p.tables.size(), 1u);
  EXPECT_EQ(p.tables[0].key, (std::vector<FieldRef>{{"ethernet", "dst"}}));
  ASSERT_EQ(p.externs.size(), 1u);
  EXPECT_EQ(p.externs[0].kind, ExternKind::kPacketCounter);
  EXPECT_TRUE(ValidateProgram(p).empty());
}

TEST(LoadProgram, ZeroStagesIsValid) {
  json j = L2Json();
  j["stages"] = json::array();
  const Pipeline p = LoadProgram(j.dump());
  EXPECT_TRUE(p.stages.empty());
}

TEST(LoadProgram, UndeclaredKeyFieldIsUnresolved) {
  json j = L2Json();
  j["tables"][0]["key"] = {"ethernet.vlan"};
  try {
    LoadProgram(j.dump());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kUnresolvedReference);
    EXPECT_NE(std::string(e.what()).find("ethernet.vlan"), std::string::npos);
  }
}

TEST(LoadProgram, NegativeSizeFailsAtLoad) {
  json j = L2Json();
  j["tables"][0]["size"] = -1;
  EXPECT_EQ(LoadError(j.dump()), ErrorCode::kSyntax);
  EXPECT_THROW(ParseProgram(j.dump()), Error);
}

TEST(LoadProgram, SyntaxErrorReportsPosition) {
  try {
    LoadProgram("{\"headers\": [}");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kSyntax);
    EXPECT_NE(std::string(e.what()).find("byte 14"), std::string::npos) << e.what();
  }
}

TEST(LoadProgram, InvariantViolationNamesRule) {
  json j = L2Json();
  j["headers"][0]["fields"][2]["width"] = 15;
  try {
    LoadProgram(j.dump());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInvariantViolation);
    EXPECT_NE(std::string(e.what()).find("header-byte-aligned"), std::string::npos);
  }
}

TEST(ValidateProgram, CyclicParser) {
  json j = L2Json();
  j["parser"]["states"] = {
      {{"name", "a"}, {"extract", "ethernet"}, {"default", "b"}},
      {{"name", "b"}, {"default", "a"}}};
  j["parser"]["start"] = "a";
  const Pipeline p = ParseProgram(j.dump());
  EXPECT_TRUE(HasRule(ValidateProgram(p), "parser-not-acyclic"));
}

TEST(ValidateProgram, RuleCoverage) {
  Pipeline p = L2Program();
  {
    Pipeline q = p;
    q.headers[0].fields.push_back({"dst", 8});
    EXPECT_TRUE(HasRule(ValidateProgram(q), "field-name-unique"));
  }
  {
    Pipeline q = p;
    q.tables[0].size_hint = -1;
    EXPECT_TRUE(HasRule(ValidateProgram(q), "table-size-nonnegative"));
  }
  {
    Pipeline q = p;
    q.actions[0].body[0].operand.param.reset();
    q.actions[0].body[0].operand.constant = FromUint(0x10000, 24);
    EXPECT_FALSE(ValidateProgram(q).empty());
  }
  {
    Pipeline q = p;
    q.deparser.clear();
    EXPECT_TRUE(HasRule(ValidateProgram(q), "deparser-order"));
  }
  {
    Pipeline q = p;
    q.stages.push_back(q.stages[0]);
    EXPECT_TRUE(HasRule(ValidateProgram(q), "stage-name-unique"));
  }
  for (const Diagnostic& d : ValidateProgram(p)) ADD_FAILURE() << d.rule;
}

TEST(ProgramIo, LoadSerializeIsIdempotentOnL2) {
  const Pipeline p = L2Program();
  const std::string once = SerializeProgram(p);
  const Pipeline q = LoadProgram(once);
  EXPECT_EQ(p, q);
  EXPECT_EQ(once, SerializeProgram(q));
}

TEST(ProgramIo, LoadSerializeIsIdempotentOnRandomPrograms) {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 300; ++i) {
    const Pipeline p = testing::RandomProgram(rng);
    ASSERT_TRUE(ValidateProgram(p).empty()) << SerializeProgram(p);
    const Pipeline q = LoadProgram(SerializeProgram(p));
    ASSERT_EQ(p, q) << SerializeProgram(p);
  }
}

TEST(Exec, ParseDeparseRoundTrip) {
  std::mt19937_64 rng(5);
  int accepted = 0;
  for (int i = 0; i < 300; ++i) {
    const Pipeline p = testing::RandomProgram(rng);
    for (const TraceRecord& r : testing::RandomTrace(rng, p, 20)) {
      const ParseOutcome out = ParsePacket(p, r.packet);
      if (!out.accepted) continue;
      ++accepted;
      ASSERT_EQ(DeparsePacket(p, out.packet), r.packet);
    }
  }
  EXPECT_GT(accepted, 1000);
}

TEST(Exec, TruncatedPacketRejects) {
  const Pipeline p = L2Program();
  const ParseOutcome out = ParsePacket(p, Bytes(13, 0));
  EXPECT_FALSE(out.accepted);
  EXPECT_FALSE(out.reject_reason.empty());
}

}  // namespace
}  // namespace hdp
