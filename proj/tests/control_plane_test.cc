// Copyright 2026 The HDP Authors
// SPDX-License-Identifier: Apache-2.0

#include "hdp/control_plane.h"

#include <gtest/gtest.h>

#include "coherence.h"
#include "hdp/error.h"
#include "hdp/runtime.h"
#include "test_util.h"

namespace hdp {
namespace {

using nlohmann::json;
using testing::AsicFpga;
using testing::L2Program;
using testing::MacN;
using testing::Port;

ErrorCode Code(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error";
  return ErrorCode::kIo;
}

struct Fixture {
  explicit Fixture(const json& constraints, std::int64_t size_hint = 10240,
                   std::map<std::string, CachePolicy> policies = {})
      : program(WithSize(size_hint)),
        topology(AsicFpga()),
        plan(Partition(program, topology, ParseConstraints(constraints))),
        cp(program, plan, std::move(policies)) {}

  static Pipeline WithSize(std::int64_t n) {
    Pipeline p = L2Program();
    p.tables[0].size_hint = n;
    return p;
  }

  Pipeline program;
  Topology topology;
  PartitionPlan plan;
  ControlPlane cp;
};

json StaticSplit(std::uint64_t share) {
  return {{"tables", {{"l2", {{"mode", "static_split"}, {"asic_share", share}}}}}};
}

json AsicCache(std::uint64_t cache) {
  return {{"tables", {{"l2", {{"mode", "asic_cache"}, {"cache_capacity", cache}}}}}};
}

const ActionCall kFwd{"forward", {Port(3)}};

TEST(Insert, StaticSplitFillsFrontFirst) {
  Fixture f(StaticSplit(1024), 11264);
  for (std::uint64_t i = 0; i < 1023; ++i) f.cp.Insert("l2", MacN(i), kFwd);
  EXPECT_EQ(f.cp.view("l2").Occupancy(0), 1023u);
  EXPECT_EQ(f.cp.Insert("l2", MacN(5000), kFwd).authoritative, "asic");
  EXPECT_EQ(f.cp.Insert("l2", MacN(5001), kFwd).authoritative, "fpga");
  EXPECT_EQ(f.cp.view("l2").Occupancy(0), 1024u);
  EXPECT_EQ(f.cp.view("l2").Occupancy(1), 1u);
}

TEST(Insert, AsicCacheAlwaysAuthoritativeOnMainMemory) {
  Fixture f(AsicCache(1024));
  for (std::uint64_t i = 0; i < 50; ++i) {
    const PlacementDecision d = f.cp.Insert("l2", MacN(i), kFwd);
    EXPECT_EQ(d.authoritative, "fpga");
    EXPECT_FALSE(d.cached_at);
  }
  EXPECT_EQ(f.cp.view("l2").Occupancy(0), 0u);
}

TEST(Insert, Errors) {
  Fixture f(StaticSplit(1), 2);
  f.cp.Insert("l2", MacN(1), kFwd);
  EXPECT_EQ(Code([&] { f.cp.Insert("l2", MacN(1), kFwd); }), ErrorCode::kDuplicateKey);
  f.cp.Insert("l2", MacN(2), kFwd);
  EXPECT_EQ(Code([&] { f.cp.Insert("l2", MacN(3), kFwd); }), ErrorCode::kCapacityExceeded);
  EXPECT_EQ(Code([&] { f.cp.Insert("l2", Bytes{1, 2}, kFwd); }), ErrorCode::kInvalidArgument);
  EXPECT_EQ(Code([&] { f.cp.Insert("l2", MacN(9), {"forward", {}}); }),
            ErrorCode::kInvalidArgument);
  EXPECT_EQ(Code([&] { f.cp.Insert("l2", MacN(9), {"nope", {}}); }),
            ErrorCode::kInvalidArgument);
  EXPECT_EQ(Code([&] { f.cp.Insert("nope", MacN(9), kFwd); }), ErrorCode::kNotFound);
}

TEST(LogicalCapacity, Definitions) {
  Fixture split(StaticSplit(1024), 11264);
  EXPECT_EQ(split.cp.view("l2").LogicalCapacity(), 11264u);
  Fixture cache(AsicCache(1024));
  EXPECT_EQ(cache.cp.view("l2").LogicalCapacity(), 10240u);
}

TEST(Delete, CachedKeyLeavesBothPartitions) {
  Fixture f(AsicCache(4));
  f.cp.Insert("l2", MacN(1), kFwd);
  f.cp.RunEpoch("l2", {{MacN(1), 1}}, 10);
  ASSERT_EQ(f.cp.view("l2").Find(MacN(1))->cached_at, "asic");
  f.cp.Delete("l2", MacN(1));
  EXPECT_TRUE(f.cp.view("l2").PartitionContents(0).empty());
  EXPECT_TRUE(f.cp.view("l2").PartitionContents(1).empty());
  EXPECT_EQ(f.cp.view("l2").Occupancy(0), 0u);
}

TEST(Delete, RearOnlyAndAbsent) {
  Fixture f(AsicCache(4));
  f.cp.Insert("l2", MacN(1), kFwd);
  f.cp.Delete("l2", MacN(1));
  EXPECT_FALSE(f.cp.view("l2").Find(MacN(1)));
  EXPECT_EQ(Code([&] { f.cp.Delete("l2", MacN(1)); }), ErrorCode::kNotFound);
}

TEST(RunEpoch, ThresholdAndFreeSlot) {
  CachePolicy policy;
  policy.promotion_threshold = 3;
  Fixture f(AsicCache(4), 10240, {{"l2", policy}});
  f.cp.Insert("l2", MacN(1), kFwd);
  f.cp.Insert("l2", MacN(2), kFwd);
  const EpochResult r = f.cp.RunEpoch("l2", {{MacN(1), 5}, {MacN(2), 2}}, 100);
  EXPECT_EQ(r.promoted, std::vector<Bytes>{MacN(1)});
  EXPECT_TRUE(r.evicted.empty());
  EXPECT_EQ(f.cp.view("l2").CachedKeys(), std::vector<Bytes>{MacN(1)});
}

TEST(RunEpoch, EqualMissesOneSlotSmallerKeyWins) {
  Fixture f(AsicCache(1));
  f.cp.Insert("l2", MacN(9), kFwd);
  f.cp.Insert("l2", MacN(4), kFwd);
  const EpochResult r = f.cp.RunEpoch("l2", {{MacN(9), 7}, {MacN(4), 7}}, 100);
  EXPECT_EQ(r.promoted, std::vector<Bytes>{MacN(4)});
  EXPECT_TRUE(r.evicted.empty());
}

TEST(RunEpoch, EvictsLeastRecentlyHit) {
  Fixture f(AsicCache(2));
  for (std::uint64_t i = 1; i <= 3; ++i) f.cp.Insert("l2", MacN(i), kFwd);
  f.cp.RunEpoch("l2", {{MacN(1), 1}, {MacN(2), 1}}, 10);
  LogicalTableView& v = f.cp.view("l2");
  v.RecordFrontHit(MacN(1), 15);  // key 2 is now least recent
  const EpochResult r = f.cp.RunEpoch("l2", {{MacN(3), 4}}, 20);
  EXPECT_EQ(r.promoted, std::vector<Bytes>{MacN(3)});
  EXPECT_EQ(r.evicted, std::vector<Bytes>{MacN(2)});
  // Tie on recency: smaller key goes first.
  f.cp.Insert("l2", MacN(7), kFwd);
  const EpochResult r2 = f.cp.RunEpoch("l2", {{MacN(7), 1}}, 30);
  EXPECT_EQ(r2.evicted, std::vector<Bytes>{MacN(1)});
}

TEST(RunEpoch, SameEpochPromotionsAreNotEvicted) {
  Fixture f(AsicCache(1));
  for (std::uint64_t i = 1; i <= 3; ++i) f.cp.Insert("l2", MacN(i), kFwd);
  const EpochResult r = f.cp.RunEpoch("l2", {{MacN(1), 3}, {MacN(2), 2}, {MacN(3), 1}}, 5);
  EXPECT_EQ(r.promoted, std::vector<Bytes>{MacN(1)});
  EXPECT_TRUE(r.evicted.empty());
}

TEST(RunEpoch, IgnoresMissingAndCachedKeysAndOtherModes) {
  Fixture f(AsicCache(2));
  f.cp.Insert("l2", MacN(1), kFwd);
  f.cp.RunEpoch("l2", {{MacN(1), 1}}, 1);
  const EpochResult r = f.cp.RunEpoch("l2", {{MacN(1), 9}, {MacN(50), 9}}, 2);
  EXPECT_TRUE(r.promoted.empty());
  Fixture s(StaticSplit(16), 100);
  s.cp.Insert("l2", MacN(1), kFwd);
  EXPECT_TRUE(s.cp.RunEpoch("l2", {{MacN(1), 9}}, 2).promoted.empty());
}

TEST(RunEpoch, DeterministicGivenState) {
  const auto run = [] {
    Fixture f(AsicCache(3));
    for (std::uint64_t i = 0; i < 10; ++i) f.cp.Insert("l2", MacN(i), kFwd);
    std::map<Bytes, std::uint64_t> m;
    for (std::uint64_t i = 0; i < 10; ++i) m[MacN(i)] = i % 4;
    std::vector<EpochResult> out;
    out.push_back(f.cp.RunEpoch("l2", m, 1));
    out.push_back(f.cp.RunEpoch("l2", m, 2));
    return f.cp.Snapshot().dump() + std::to_string(out[0].promoted.size());
  };
  EXPECT_EQ(run(), run());
}

TEST(CachePolicy, RejectsZeroParameters) {
  CachePolicy bad;
  bad.epoch_length = 0;
  EXPECT_THROW(Fixture(AsicCache(2), 10240, {{"l2", bad}}), Error);
}

TEST(Coherence, RandomizedSequencesMatchOracle) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const testing::CoherenceResult r =
        testing::RunCoherenceSequence(seed, 2000, 1 + seed % 16);
    EXPECT_EQ(r.stale_entries, 0u) << r.first_problem;
    EXPECT_EQ(r.violations, 0u) << r.first_problem;
    EXPECT_EQ(r.lru_mismatches, 0u) << r.first_problem;
    EXPECT_EQ(r.capacity_breaches, 0u);
    EXPECT_GT(r.promotions, 0u);
  }
}

TEST(Api, RequestsAndResponses) {
  Fixture f(AsicCache(4));
  const auto call = [&](const std::string& line) { return json::parse(f.cp.HandleLine(line)); };
  json r = call(R"({"op":"insert","table":"l2","key":"00:00:00:00:00:01","action":"forward","args":[2]})");
  EXPECT_EQ(r["status"], "ok");
  EXPECT_EQ(r["payload"]["authoritative"], "fpga");
  r = call(R"({"op":"insert","table":"l2","key":"00:00:00:00:00:01","action":"forward","args":[2]})");
  EXPECT_EQ(r["error"], "DuplicateKey");
  r = call(R"({"op":"snapshot"})");
  ASSERT_EQ(r["payload"]["tables"][0]["entries"].size(), 1u);
  EXPECT_EQ(r["payload"]["tables"][0]["entries"][0]["key"], "00:00:00:00:00:01");
  r = call(R"({"op":"read_counter","extern":"fpga_counter"})");
  EXPECT_EQ(r["payload"]["count"], 0);
  r = call(R"({"op":"read_counter","extern":"bogus"})");
  EXPECT_EQ(r["error"], "UnknownExtern");
  r = call(R"({"op":"delete","table":"l2","key":"00:00:00:00:00:01"})");
  EXPECT_EQ(r["status"], "ok");
  r = call(R"({"op":"delete","table":"l2","key":"00:00:00:00:00:01"})");
  EXPECT_EQ(r["error"], "NotFound");
  for (const char* bad : {"not json", "[]", R"({"op":"frobnicate"})", R"({"op":"insert"})",
                          R"({"op":"insert","table":"l2","key":"zz","action":"forward"})"}) {
    EXPECT_EQ(call(bad)["status"], "error") << bad;
  }
}

TEST(ReadCounter, ResetAndUnknown) {
  Fixture f(AsicCache(4));
  f.cp.Insert("l2", MacN(1), kFwd);
  Simulator sim(f.program, f.topology, f.plan, f.cp);
  for (int i = 0; i < 3; ++i) sim.Inject(testing::L2Packet(MacN(1)), 0);
  EXPECT_EQ(f.cp.ReadCounter("fpga_counter", true), 3u);
  EXPECT_EQ(f.cp.ReadCounter("fpga_counter", false), 0u);
  EXPECT_EQ(Code([&] { f.cp.ReadCounter("nope", false); }), ErrorCode::kUnknownExtern);
}

}  // namespace
}  // namespace hdp
