// Copyright 2026 The HDP Authors
// SPDX-License-Identifier: Apache-2.0

#include "hdp/reference.h"

#include <gtest/gtest.h>

#include <random>

#include "random_program.h"
#include "test_util.h"

namespace hdp {
namespace {

using testing::L2Packet;
using testing::L2Program;
using testing::Mac;
using testing::Port;

TEST(ExecuteReference, HitForwardsUnchangedBytes) {
  const Pipeline p = L2Program();
  TableState tables;
  tables["l2"][Mac("aa:bb:cc:dd:ee:ff")] = {"forward", {Port(2)}};
  ExternState externs;
  const Bytes pkt = L2Packet(Mac("aa:bb:cc:dd:ee:ff"));
  const ReferenceResult r = ExecuteReference(p, pkt, 0, tables, externs);
  EXPECT_EQ(r.verdict, Verdict::Forward(2, pkt));
  EXPECT_TRUE(r.reject_reason.empty());
}

TEST(ExecuteReference, MissAppliesDefaultDrop) {
  const Pipeline p = L2Program();
  ExternState externs;
  const ReferenceResult r =
      ExecuteReference(p, L2Packet(Mac("00:00:00:00:00:01")), 0, {}, externs);
  EXPECT_EQ(r.verdict, Verdict::Drop());
  EXPECT_EQ(externs["fpga_counter"], 0u);
}

TEST(ExecuteReference, CounterCountsHitActions) {
  const Pipeline p = L2Program();
  TableState tables;
  tables["l2"][Mac("aa:bb:cc:dd:ee:ff")] = {"forward", {Port(2)}};
  ExternState externs;
  for (int i = 0; i < 3; ++i) {
    ExecuteReference(p, L2Packet(Mac("aa:bb:cc:dd:ee:ff")), 0, tables, externs);
  }
  EXPECT_EQ(externs["fpga_counter"], 3u);
}

TEST(ExecuteReference, MalformedPacketDropsWithReason) {
  const Pipeline p = L2Program();
  ExternState externs;
  const ReferenceResult r = ExecuteReference(p, Bytes{1, 2, 3}, 0, {}, externs);
  EXPECT_EQ(r.verdict, Verdict::Drop());
  EXPECT_FALSE(r.reject_reason.empty());
}

TEST(ExecuteReference, LastWriterWins) {
  Pipeline p = L2Program();
  // drop then forward: forward wins; forward then drop: drop wins.
  ActionDef both{"both", {{"port", 16}}, {}};
  Primitive drop;
  drop.op = PrimitiveOp::kMarkDrop;
  Primitive fwd;
  fwd.op = PrimitiveOp::kSetEgressPort;
  fwd.operand.param = "port";
  both.body = {drop, fwd};
  ActionDef rev = both;
  rev.name = "rev";
  rev.body = {fwd, drop};
  p.actions.push_back(both);
  p.actions.push_back(rev);
  p.tables[0].actions = {"forward", "drop", "both", "rev"};
  TableState tables;
  tables["l2"][Mac("00:00:00:00:00:01")] = {"both", {Port(7)}};
  tables["l2"][Mac("00:00:00:00:00:02")] = {"rev", {Port(7)}};
  ExternState externs;
  const Bytes a = L2Packet(Mac("00:00:00:00:00:01"));
  EXPECT_EQ(ExecuteReference(p, a, 0, tables, externs).verdict, Verdict::Forward(7, a));
  EXPECT_EQ(ExecuteReference(p, L2Packet(Mac("00:00:00:00:00:02")), 0, tables, externs)
                .verdict,
            Verdict::Drop());
}

TEST(ExecuteReference, Deterministic) {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 100; ++i) {
    const Pipeline p = testing::RandomProgram(rng);
    TableState tables;
    for (const MatchTable& t : p.tables) {
      for (int k = 0; k < 4; ++k) {
        tables[t.name][testing::RandomKey(rng, p, t)] =
            testing::RandomCall(rng, p, t.actions[0]);
      }
    }
    for (const TraceRecord& r : testing::RandomTrace(rng, p, 10)) {
      ExternState e1, e2;
      const ReferenceResult a = ExecuteReference(p, r.packet, r.ingress_port, tables, e1);
      const ReferenceResult b = ExecuteReference(p, r.packet, r.ingress_port, tables, e2);
      ASSERT_EQ(a.verdict, b.verdict);
      ASSERT_EQ(a.trace, b.trace);
      ASSERT_EQ(e1, e2);
    }
  }
}

}  // namespace
}  // namespace hdp
