// Copyright 2026 The HDP Authors
// SPDX-License-Identifier: Apache-2.0

// Packet-level execution of a partition plan over a chain of targets.
//
// Each packet enters raw at the network-facing target. Targets hand work to
// each other as encoded interlink frames; a frame whose resume point lives
// further along is forwarded unchanged by the targets in between. Latency is
// the sum of per-packet latency of every target visit plus link latency of
// every crossing. There is no queueing; throughput is computed analytically
// from the fraction of traffic each target sees.

#ifndef HDP_RUNTIME_H_
#define HDP_RUNTIME_H_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "hdp/control_plane.h"
#include "hdp/exec.h"
#include "hdp/partition.h"
#include "hdp/pipeline.h"
#include "hdp/topology.h"
#include "hdp/trace.h"
#include "json.hpp"

namespace hdp {

struct HitMiss {
  std::uint64_t hits = 0;
  std::uint64_t misses = 0;

  bool operator==(const HitMiss&) const = default;
};

struct TargetStats {
  std::uint64_t packets = 0;  // distinct packets that visited
  std::uint64_t visits = 0;
  std::uint64_t hits = 0;
  std::uint64_t misses = 0;

  bool operator==(const TargetStats&) const = default;
};

// Runtime state of one target.
struct TargetInstance {
  const TargetProfile* profile = nullptr;
  // table -> partition index -> entries installed on this target
  std::map<std::string, std::map<std::size_t, TableEntries>> partitions;
  ExternState externs;  // hosted externs only
  TargetStats stats;
};

struct TargetInput {
  bool raw = false;  // raw packet (network-facing target only) or a frame
  Bytes bytes;
  std::uint16_t ingress_port = 0;  // raw only
};

struct TargetOutput {
  enum class Kind { kLocalVerdict, kToNext, kToPrev };
  Kind kind = Kind::kLocalVerdict;
  Verdict verdict;        // kLocalVerdict
  std::string reason;     // drop reason, if any
  Bytes frame;            // kToNext / kToPrev
  std::string action;     // what this target did, for the path record
};

struct PathStep {
  std::string target;
  std::string action;

  bool operator==(const PathStep&) const = default;
};

struct PathRecord {
  std::vector<PathStep> steps;
  std::uint64_t latency_ns = 0;
  Verdict verdict;
  std::string drop_reason;

  bool operator==(const PathRecord&) const = default;
};

struct LatencyStats {
  std::uint64_t min_ns = 0;
  double mean_ns = 0;
  std::uint64_t max_ns = 0;

  bool operator==(const LatencyStats&) const = default;
};

struct SimStats {
  std::uint64_t seed = 0;
  std::uint64_t packets_in = 0;
  std::uint64_t forwards = 0;
  std::uint64_t drops = 0;
  std::map<std::string, std::uint64_t> drop_reasons;
  std::vector<std::pair<std::string, TargetStats>> targets;  // chain order
  // "table/target/role" -> hits, misses
  std::map<std::string, HitMiss> partitions;
  std::map<std::string, std::uint64_t> counters;
  LatencyStats latency;
  std::map<std::string, double> traffic_fraction;
  std::optional<double> sustainable_rate;  // nullopt: no traffic
  std::uint64_t epochs = 0;
  std::uint64_t promotions = 0;
  std::uint64_t evictions = 0;

  bool operator==(const SimStats&) const = default;
};

// min over targets with f_t > 0 of service_rate_t / f_t.
std::optional<double> SustainableRate(
    const std::map<std::string, double>& traffic_fraction,
    const Topology& topology);

struct SimOptions {
  std::size_t hop_limit = 64;
  bool record_paths = true;
};

class Simulator : public CounterSource {
 public:
  // Attaches itself to `control` for counter reads; `control` must outlive
  // the simulator.
  Simulator(const Pipeline& program, const Topology& topology,
            const PartitionPlan& plan, ControlPlane& control,
            SimOptions options = {});
  ~Simulator() override;

  Simulator(const Simulator&) = delete;
  Simulator& operator=(const Simulator&) = delete;

  // One step at one target. Mutates the instance's stats and externs only.
  TargetOutput ProcessOnTarget(const std::string& target, const TargetInput& input);

  // Full chain for one packet, then epoch bookkeeping.
  PathRecord Inject(const Bytes& packet, std::uint16_t ingress_port);

  void Run(const TrafficTrace& trace);

  SimStats Stats() const;
  const std::vector<PathRecord>& paths() const { return paths_; }
  const TargetInstance& instance(const std::string& target) const;

  std::optional<std::uint64_t> ReadCounter(const std::string& name,
                                           bool reset) override;

  void set_seed(std::uint64_t seed) { seed_ = seed; }

 private:
  void Resync();
  TargetOutput RunFrom(const std::string& target, PacketContext& ctx,
                       std::size_t stage, std::string action);
  TargetOutput Send(const std::string& from, const std::string& to,
                    const PacketContext& ctx, EntryKind kind, std::size_t stage,
                    std::string action);
  void Apply(const std::string& target, const ActionCall& call,
             PacketContext& ctx);
  const ActionCall* Lookup(const std::string& target, const std::string& table,
                           std::size_t partition, const Bytes& key, bool front);
  void EndOfPacket();

  const Pipeline& program_;
  const Topology& topology_;
  const PartitionPlan& plan_;
  ControlPlane& control_;
  SimOptions options_;
  std::map<std::string, TargetInstance> instances_;
  std::uint64_t synced_generation_ = 0;
  bool synced_ = false;

  std::uint64_t seed_ = 0;
  std::uint64_t clock_ = 0;  // packets injected so far
  bool matched_ = false;     // last lookup of the current packet hit
  std::uint64_t forwards_ = 0;
  std::uint64_t drops_ = 0;
  std::map<std::string, std::uint64_t> drop_reasons_;
  std::map<std::string, HitMiss> partition_stats_;
  std::map<std::string, std::uint64_t> visited_by_;  // packets per target
  std::vector<std::uint64_t> latencies_;
  std::vector<PathRecord> paths_;
  // asic_cache tables: key -> front misses in the current epoch
  std::map<std::string, std::map<Bytes, std::uint64_t>> epoch_misses_;
  std::uint64_t epochs_ = 0;
  std::uint64_t promotions_ = 0;
  std::uint64_t evictions_ = 0;
};

nlohmann::ordered_json StatsToJson(const SimStats& stats);
nlohmann::ordered_json PathToJson(const PathRecord& path);

}  // namespace hdp

#endif  // HDP_RUNTIME_H_
