// Copyright 2026 The HDP Authors
// SPDX-License-Identifier: Apache-2.0

#include "hdp/runtime.h"

#include <gtest/gtest.h>

#include "equivalence.h"
#include "hdp/error.h"
#include "hdp/interlink.h"
#include "hdp/reference.h"
#include "test_util.h"

namespace hdp {
namespace {

using nlohmann::json;
using testing::AsicFpga;
using testing::L2Packet;
using testing::L2Program;
using testing::MacN;
using testing::Port;

struct L2Cache {
  L2Cache()
      : program(L2Program()),
        topology(AsicFpga()),
        plan(Partition(program, topology,
                       ParseConstraints(json{{"tables",
                                              {{"l2",
                                                {{"mode", "asic_cache"},
                                                 {"cache_capacity", 1024}}}}}}))),
        cp(program, plan, {{"l2", Policy()}}) {}

  static CachePolicy Policy() {
    CachePolicy p;
    p.epoch_length = 1'000'000;  // no automatic epochs
    return p;
  }

  // Installs keys 0..n-1 forwarding to port 1 + i % 4 and caches the first
  // `cached` of them.
  void Install(std::uint64_t n, std::uint64_t cached) {
    std::map<Bytes, std::uint64_t> misses;
    for (std::uint64_t i = 0; i < n; ++i) {
      cp.Insert("l2", MacN(i), {"forward", {Port(1 + i % 4)}});
      if (i < cached) misses[MacN(i)] = 1;
    }
    cp.RunEpoch("l2", misses, 0);
  }

  TableState Merged() const {
    TableState t;
    for (const auto& [k, e] : cp.view("l2").entries()) t["l2"][k] = e.action;
    return t;
  }

  Pipeline program;
  Topology topology;
  PartitionPlan plan;
  ControlPlane cp;
};

TEST(ProcessOnTarget, CacheHitIsLocal) {
  L2Cache f;
  f.cp.Insert("l2", MacN(7), {"forward", {Port(2)}});
  f.cp.RunEpoch("l2", {{MacN(7), 1}}, 0);
  Simulator sim(f.program, f.topology, f.plan, f.cp);
  const Bytes pkt = L2Packet(MacN(7));
  const TargetOutput out = sim.ProcessOnTarget("asic", {true, pkt, 0});
  ASSERT_EQ(out.kind, TargetOutput::Kind::kLocalVerdict);
  EXPECT_EQ(out.verdict, Verdict::Forward(2, pkt));
  EXPECT_EQ(sim.ReadCounter("fpga_counter", false), 0u);
}

TEST(ProcessOnTarget, FrontMissGoesDownstream) {
  L2Cache f;
  Simulator sim(f.program, f.topology, f.plan, f.cp);
  const Bytes pkt = L2Packet(MacN(7));
  const TargetOutput out = sim.ProcessOnTarget("asic", {true, pkt, 5});
  ASSERT_EQ(out.kind, TargetOutput::Kind::kToNext);
  const interlink::Frame frame = interlink::DecodeFrame(out.frame);
  EXPECT_FALSE(frame.matched_upstream());
  EXPECT_FALSE(frame.decision_present());
  EXPECT_EQ(frame.PortTlv(interlink::kIngressPort), 5);
  const EntryPoint* e = f.plan.FindEntry(frame.stage_id);
  ASSERT_NE(e, nullptr);
  EXPECT_EQ(e->target, "fpga");
  EXPECT_EQ(e->kind, EntryKind::kRearLookup);
  EXPECT_EQ(frame.payload, pkt);
}

TEST(ProcessOnTarget, RearHitCountsAndReturnsDecision) {
  L2Cache f;
  f.cp.Insert("l2", MacN(7), {"forward", {Port(3)}});
  Simulator sim(f.program, f.topology, f.plan, f.cp);
  const Bytes pkt = L2Packet(MacN(7));
  const TargetOutput down = sim.ProcessOnTarget("asic", {true, pkt, 0});
  const TargetOutput up = sim.ProcessOnTarget("fpga", {false, down.frame, 0});
  ASSERT_EQ(up.kind, TargetOutput::Kind::kToPrev);
  const interlink::Frame frame = interlink::DecodeFrame(up.frame);
  EXPECT_TRUE(frame.matched_upstream());
  EXPECT_EQ(frame.PortTlv(interlink::kEgressDecision), 3);
  EXPECT_EQ(sim.ReadCounter("fpga_counter", false), 1u);

  const TargetOutput last = sim.ProcessOnTarget("asic", {false, up.frame, 0});
  ASSERT_EQ(last.kind, TargetOutput::Kind::kLocalVerdict);
  ExternState externs;
  const ReferenceResult want = ExecuteReference(f.program, pkt, 0, f.Merged(), externs);
  EXPECT_EQ(last.verdict, want.verdict);
  EXPECT_EQ(externs["fpga_counter"], 1u);
}

TEST(ProcessOnTarget, RearMissReturnsWithoutDecision) {
  L2Cache f;
  Simulator sim(f.program, f.topology, f.plan, f.cp);
  const TargetOutput down = sim.ProcessOnTarget("asic", {true, L2Packet(MacN(1)), 0});
  const TargetOutput up = sim.ProcessOnTarget("fpga", {false, down.frame, 0});
  ASSERT_EQ(up.kind, TargetOutput::Kind::kToPrev);
  const interlink::Frame frame = interlink::DecodeFrame(up.frame);
  EXPECT_FALSE(frame.decision_present());
  EXPECT_EQ(f.plan.FindEntry(frame.stage_id)->kind, EntryKind::kFrontDefault);
  const TargetOutput last = sim.ProcessOnTarget("asic", {false, up.frame, 0});
  EXPECT_EQ(last.verdict, Verdict::Drop());
}

TEST(ProcessOnTarget, BadInputs) {
  L2Cache f;
  Simulator sim(f.program, f.topology, f.plan, f.cp);
  EXPECT_THROW(sim.ProcessOnTarget("fpga", {true, L2Packet(MacN(1)), 0}), Error);
  const TargetOutput bad = sim.ProcessOnTarget("fpga", {false, Bytes{0x48, 0x45, 1}, 0});
  EXPECT_EQ(bad.kind, TargetOutput::Kind::kLocalVerdict);
  EXPECT_EQ(bad.verdict, Verdict::Drop());
  EXPECT_NE(bad.reason.find("BadMagic"), std::string::npos);
}

TEST(RunTrace, SevenCachedThreeRear) {
  L2Cache f;
  f.Install(10, 7);
  Simulator sim(f.program, f.topology, f.plan, f.cp);
  TrafficTrace trace;
  for (std::uint64_t i = 0; i < 10; ++i) trace.push_back({i * 10, 0, L2Packet(MacN(i))});
  const TableState merged = f.Merged();
  ExternState ref_externs;
  sim.Run(trace);
  for (std::size_t i = 0; i < trace.size(); ++i) {
    const ReferenceResult want =
        ExecuteReference(f.program, trace[i].packet, 0, merged, ref_externs);
    EXPECT_EQ(sim.paths()[i].verdict, want.verdict) << i;
  }
  const SimStats s = sim.Stats();
  EXPECT_EQ(s.targets[0].first, "asic");
  EXPECT_EQ(s.targets[0].second.hits, 7u);
  EXPECT_EQ(s.targets[1].second.hits, 3u);
  EXPECT_EQ(s.counters.at("fpga_counter"), 3u);
  EXPECT_EQ(s.drops, 0u);
  EXPECT_EQ(s.forwards, 10u);
  EXPECT_DOUBLE_EQ(s.traffic_fraction.at("fpga"), 0.3);
  EXPECT_DOUBLE_EQ(s.traffic_fraction.at("asic"), 1.0);
  EXPECT_DOUBLE_EQ(*s.sustainable_rate, 5'000'000.0);
}

TEST(RunTrace, EmptyTrace) {
  L2Cache f;
  Simulator sim(f.program, f.topology, f.plan, f.cp);
  sim.Run({});
  const SimStats s = sim.Stats();
  EXPECT_EQ(s.packets_in, 0u);
  EXPECT_EQ(s.forwards + s.drops, 0u);
  EXPECT_EQ(s.counters.at("fpga_counter"), 0u);
  for (const auto& [id, t] : s.targets) EXPECT_EQ(t, TargetStats{});
  EXPECT_FALSE(s.sustainable_rate);
  EXPECT_EQ(StatsToJson(s)["sustainable_rate_pps"], "no traffic");
}

TEST(RunTrace, MissEverywhereDropsAfterVisitingBoth) {
  L2Cache f;
  Simulator sim(f.program, f.topology, f.plan, f.cp);
  const PathRecord p = sim.Inject(L2Packet(MacN(99)), 0);
  EXPECT_EQ(p.verdict, Verdict::Drop());
  ASSERT_EQ(p.steps.size(), 3u);
  EXPECT_EQ(p.steps[1].target, "fpga");
  const SimStats s = sim.Stats();
  EXPECT_EQ(s.drops, 1u);
  EXPECT_EQ(s.counters.at("fpga_counter"), 0u);
}

TEST(RunTrace, LatencyAccounting) {
  L2Cache f;
  f.Install(4, 2);
  Simulator sim(f.program, f.topology, f.plan, f.cp);
  const PathRecord hit = sim.Inject(L2Packet(MacN(0)), 0);
  const PathRecord far = sim.Inject(L2Packet(MacN(3)), 0);
  const PathRecord miss = sim.Inject(L2Packet(MacN(50)), 0);
  EXPECT_EQ(hit.latency_ns, 400u);
  EXPECT_EQ(far.latency_ns, 400u + 1000 + 2000 + 1000 + 400);
  EXPECT_EQ(miss.latency_ns, far.latency_ns);
  EXPECT_GT(far.latency_ns, hit.latency_ns);
  const SimStats s = sim.Stats();
  EXPECT_EQ(s.latency.min_ns, 400u);
  EXPECT_EQ(s.latency.max_ns, 4800u);
}

TEST(RunTrace, TransitThroughMiddleTarget) {
  const Topology topo = LoadTopology(R"({"targets":[
      {"id":"asic","kind":"asic","network_facing":true},
      {"id":"nic","kind":"nic","supported_externs":[],"per_packet_latency_ns":300},
      {"id":"fpga","kind":"fpga"}],
    "links":[{"a":"asic","b":"nic","latency_ns":10},{"a":"nic","b":"fpga","latency_ns":20}]})");
  const Pipeline p = L2Program();
  const PartitionPlan plan = Partition(p, topo, {});
  ASSERT_EQ(plan.FindTable("l2")->partitions[0].target, "fpga");
  ControlPlane cp(p, plan);
  cp.Insert("l2", MacN(1), {"forward", {Port(9)}});
  Simulator sim(p, topo, plan, cp);
  const Bytes pkt = L2Packet(MacN(1));
  const PathRecord r = sim.Inject(pkt, 0);
  EXPECT_EQ(r.verdict, Verdict::Forward(9, pkt));
  ASSERT_EQ(r.steps.size(), 5u);
  EXPECT_EQ(r.steps[1].action, "transit");
  EXPECT_EQ(r.steps[3].action, "transit");
  EXPECT_EQ(r.latency_ns, 400u + 10 + 300 + 20 + 2000 + 20 + 300 + 10 + 400);
  EXPECT_EQ(sim.Stats().targets[1].second.visits, 2u);
  EXPECT_EQ(sim.Stats().targets[1].second.packets, 1u);
}

TEST(RunTrace, EpochsPromoteHotKeys) {
  Pipeline program = L2Program();
  const Topology topology = AsicFpga();
  const PartitionPlan plan = Partition(
      program, topology,
      ParseConstraints(json{{"tables", {{"l2", {{"mode", "asic_cache"}, {"cache_capacity", 2}}}}}}));
  CachePolicy policy;
  policy.epoch_length = 4;
  ControlPlane cp(program, plan, {{"l2", policy}});
  for (std::uint64_t i = 0; i < 3; ++i) cp.Insert("l2", MacN(i), {"forward", {Port(1)}});
  Simulator sim(program, topology, plan, cp);
  for (int i = 0; i < 4; ++i) sim.Inject(L2Packet(MacN(i % 2)), 0);
  EXPECT_EQ(cp.view("l2").CachedKeys().size(), 2u);
  // Now both hot keys hit at the front.
  EXPECT_EQ(sim.Inject(L2Packet(MacN(0)), 0).steps.size(), 1u);
  EXPECT_EQ(sim.Stats().epochs, 1u);
  EXPECT_EQ(sim.Stats().promotions, 2u);
}

TEST(SustainableRate, Formula) {
  const Topology t = AsicFpga();
  EXPECT_DOUBLE_EQ(*SustainableRate({{"asic", 1.0}, {"fpga", 0.3}}, t), 5'000'000.0);
  EXPECT_DOUBLE_EQ(*SustainableRate({{"asic", 1.0}, {"fpga", 0.0}}, t), 15'000'000.0);
  const Topology single = LoadTopology(R"({"targets":[{"id":"fpga","kind":"fpga","network_facing":true}],"links":[]})");
  EXPECT_DOUBLE_EQ(*SustainableRate({{"fpga", 1.0}}, single), 1'500'000.0);
  EXPECT_FALSE(SustainableRate({{"asic", 0.0}}, t));
}

TEST(RunTrace, DeterministicAndConserving) {
  const auto run = [] {
    L2Cache f;
    f.Install(40, 5);
    Simulator sim(f.program, f.topology, f.plan, f.cp);
    for (std::uint64_t i = 0; i < 200; ++i) sim.Inject(L2Packet(MacN((i * 7) % 50)), 0);
    const SimStats s = sim.Stats();
    EXPECT_EQ(s.forwards + s.drops, s.packets_in);
    for (const auto& [id, fr] : s.traffic_fraction) {
      EXPECT_GE(fr, 0.0);
      EXPECT_LE(fr, 1.0);
    }
    return StatsToJson(s).dump();
  };
  EXPECT_EQ(run(), run());
}

TEST(OracleEquivalence, RandomPrograms) {
  std::size_t feasible = 0;
  for (std::uint64_t seed = 1000; seed < 1300; ++seed) {
    const testing::EquivalenceResult r = testing::RunEquivalenceCase(seed);
    if (!r.feasible) continue;
    ++feasible;
    ASSERT_EQ(r.mismatches, 0u) << r.first_mismatch;
  }
  EXPECT_GT(feasible, 250u);
}

}  // namespace
}  // namespace hdp
