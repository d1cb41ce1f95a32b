// Copyright 2026 The HDP Authors
// SPDX-License-Identifier: Apache-2.0

#include "hdp/runtime.h"

#include <algorithm>
#include <set>

#include "hdp/error.h"
#include "hdp/interlink.h"

namespace hdp {
namespace {

using ojson = nlohmann::ordered_json;

std::string PartitionLabel(const std::string& table, const TablePartition& part) {
  return table + "/" + part.target + "/" +
         (part.role == PartitionRole::kCache ? "cache" : "authoritative");
}

TargetOutput Dropped(std::string reason, std::string action) {
  TargetOutput out;
  out.kind = TargetOutput::Kind::kLocalVerdict;
  out.verdict = Verdict::Drop();
  out.reason = std::move(reason);
  out.action = std::move(action);
  return out;
}

}  // namespace

std::optional<double> SustainableRate(
    const std::map<std::string, double>& traffic_fraction,
    const Topology& topology) {
  std::optional<double> rate;
  for (const auto& [id, f] : traffic_fraction) {
    if (f <= 0) continue;
    const double r = topology.Find(id)->service_rate_pps / f;
    if (!rate || r < *rate) rate = r;
  }
  return rate;
}

Simulator::Simulator(const Pipeline& program, const Topology& topology,
                     const PartitionPlan& plan, ControlPlane& control,
                     SimOptions options)
    : program_(program),
      topology_(topology),
      plan_(plan),
      control_(control),
      options_(options) {
  for (const std::string& id : topology.chain()) {
    instances_[id].profile = topology.Find(id);
  }
  for (const auto& [name, host] : plan.extern_hosts) {
    instances_.at(host).externs[name] = 0;
  }
  for (const TablePlacement& tp : plan.tables) {
    for (const TablePartition& part : tp.partitions) {
      partition_stats_[PartitionLabel(tp.table, part)];
    }
  }
  control_.AttachDataPlane(this);
}

Simulator::~Simulator() { control_.AttachDataPlane(nullptr); }

const TargetInstance& Simulator::instance(const std::string& target) const {
  return instances_.at(target);
}

void Simulator::Resync() {
  if (synced_ && synced_generation_ == control_.generation()) return;
  for (const TablePlacement& tp : plan_.tables) {
    const LogicalTableView& view = control_.view(tp.table);
    for (std::size_t i = 0; i < tp.partitions.size(); ++i) {
      instances_.at(tp.partitions[i].target).partitions[tp.table][i] =
          view.PartitionContents(i);
    }
  }
  synced_ = true;
  synced_generation_ = control_.generation();
}

void Simulator::Apply(const std::string& target, const ActionCall& call,
                      PacketContext& ctx) {
  TargetInstance& inst = instances_.at(target);
  // Extern calls take effect only where the extern lives.
  RunAction(program_, call, ctx, [&](const std::string& name) {
    auto host = plan_.extern_hosts.find(name);
    if (host != plan_.extern_hosts.end() && host->second == target) {
      ++inst.externs[name];
    }
  });
}

const ActionCall* Simulator::Lookup(const std::string& target,
                                    const std::string& table,
                                    std::size_t partition, const Bytes& key,
                                    bool front) {
  TargetInstance& inst = instances_.at(target);
  const TablePlacement* tp = plan_.FindTable(table);
  const TableEntries& entries = inst.partitions[table][partition];
  auto it = entries.find(key);
  const bool hit = it != entries.end();
  matched_ = hit;
  HitMiss& hm = partition_stats_[PartitionLabel(table, tp->partitions[partition])];
  if (hit) {
    ++hm.hits;
    ++inst.stats.hits;
  } else {
    ++hm.misses;
    ++inst.stats.misses;
  }
  if (front) {
    LogicalTableView& view = control_.view(table);
    if (hit) {
      view.RecordFrontHit(key, clock_);
    } else {
      view.RecordFrontMisses(key, 1);
      if (tp->mode == SplitMode::kAsicCache) ++epoch_misses_[table][key];
    }
  }
  return hit ? &it->second : nullptr;
}

TargetOutput Simulator::Send(const std::string& from, const std::string& to,
                             const PacketContext& ctx, EntryKind kind,
                             std::size_t stage, std::string action) {
  const auto id = plan_.EntryId(to, kind, stage);
  if (!id) {
    return Dropped("no resume point " + std::string(EntryKindName(kind)) +
                       " for stage " + std::to_string(stage) + " on " + to,
                   std::move(action));
  }
  interlink::Frame frame;
  frame.stage_id = *id;
  if (matched_) frame.flags |= interlink::kFlagMatchedUpstream;
  frame.tlvs.push_back(interlink::PortTlv(interlink::kIngressPort, ctx.md.ingress_port));
  if (ctx.md.egress_written) {
    frame.flags |= interlink::kFlagDecisionPresent;
    frame.tlvs.push_back(
        interlink::PortTlv(interlink::kEgressDecision, ctx.md.egress_spec));
  }
  if (ctx.md.drop) frame.tlvs.push_back({interlink::kOpaque, Bytes{0x01}});
  frame.payload = DeparsePacket(program_, ctx.packet);

  TargetOutput out;
  out.kind = topology_.ChainPosition(to) > topology_.ChainPosition(from)
                 ? TargetOutput::Kind::kToNext
                 : TargetOutput::Kind::kToPrev;
  out.frame = interlink::EncodeFrame(frame);
  out.action = std::move(action) + " -> " + std::string(EntryKindName(kind)) +
               "@" + to + " (stage_id " + std::to_string(*id) + ")";
  return out;
}

TargetOutput Simulator::RunFrom(const std::string& target, PacketContext& ctx,
                                std::size_t stage, std::string action) {
  const auto note = [&](const std::string& s) {
    if (!action.empty()) action += "; ";
    action += s;
  };
  while (true) {
    if (stage == program_.stages.size()) {
      if (target != plan_.front) {
        return Send(target, plan_.front, ctx, EntryKind::kEgress, stage,
                    std::move(action));
      }
      TargetOutput out;
      out.verdict = FinalVerdict(program_, ctx);
      if (!out.verdict.is_forward()) out.reason = "dropped by action";
      note(out.verdict.is_forward() ? "forward " + std::to_string(out.verdict.port)
                                    : "drop");
      out.action = std::move(action);
      return out;
    }
    const Stage& s = program_.stages[stage];
    if (s.kind == StageKind::kBridge) {
      ++stage;
      continue;
    }
    const StagePlacement& sp = plan_.stages[stage];
    const std::string& here = sp.split ? sp.front : sp.home;
    if (target != here) {
      return Send(target, here, ctx, EntryKind::kRunFrom, stage, std::move(action));
    }
    if (s.kind == StageKind::kCall) {
      auto host = plan_.extern_hosts.find(s.ref);
      if (host != plan_.extern_hosts.end() && host->second == target) {
        ++instances_.at(target).externs[s.ref];
      }
      note("call " + s.ref);
      ++stage;
      continue;
    }
    const MatchTable& t = *program_.FindTable(s.ref);
    const Bytes key = BuildKey(program_, t, ctx.packet);
    const ActionCall* call = Lookup(target, t.name, 0, key, target == plan_.front);
    if (call != nullptr) {
      note(t.name + " hit " + call->action);
      Apply(target, *call, ctx);
    } else if (sp.split) {
      note(t.name + " miss");
      return Send(target, sp.home, ctx, EntryKind::kRearLookup, stage,
                  std::move(action));
    } else {
      note(t.name + " miss " + t.default_action.action);
      Apply(target, t.default_action, ctx);
    }
    ++stage;
  }
}

TargetOutput Simulator::ProcessOnTarget(const std::string& target,
                                        const TargetInput& input) {
  Resync();
  TargetInstance& inst = instances_.at(target);
  ++inst.stats.visits;
  if (input.raw) {
    if (target != plan_.front) {
      throw Error(ErrorCode::kInvalidArgument,
                  "raw packet offered to " + target + ", which is not network-facing");
    }
    ParseOutcome parsed = ParsePacket(program_, input.bytes);
    if (!parsed.accepted) return Dropped(parsed.reject_reason, "parse reject");
    PacketContext ctx{std::move(parsed.packet), {}};
    ctx.md.ingress_port = input.ingress_port;
    return RunFrom(target, ctx, 0, "");
  }

  interlink::Frame frame;
  try {
    frame = interlink::DecodeFrame(input.bytes);
  } catch (const DecodeError& e) {
    return Dropped(std::string("decode: ") + e.what(), "decode error");
  }
  const EntryPoint* entry = plan_.FindEntry(frame.stage_id);
  if (entry == nullptr) {
    return Dropped("unknown stage_id " + std::to_string(frame.stage_id),
                   "decode error");
  }
  if (entry->target != target) {
    TargetOutput out;
    out.kind = topology_.ChainPosition(entry->target) > topology_.ChainPosition(target)
                   ? TargetOutput::Kind::kToNext
                   : TargetOutput::Kind::kToPrev;
    out.frame = input.bytes;
    out.action = "transit";
    return out;
  }

  ParseOutcome parsed = ParsePacket(program_, frame.payload);
  if (!parsed.accepted) {
    return Dropped("re-parse: " + parsed.reject_reason, "parse reject");
  }
  PacketContext ctx{std::move(parsed.packet), {}};
  ctx.md.ingress_port = frame.PortTlv(interlink::kIngressPort).value_or(0);
  if (frame.decision_present()) {
    ctx.md.egress_spec = frame.PortTlv(interlink::kEgressDecision).value_or(0);
    ctx.md.egress_written = true;
  }
  if (const auto* opaque = frame.FindTlv(interlink::kOpaque)) {
    ctx.md.drop = opaque->value == Bytes{0x01};
  }
  matched_ = frame.matched_upstream();

  switch (entry->kind) {
    case EntryKind::kRunFrom:
      return RunFrom(target, ctx, entry->stage, "");
    case EntryKind::kRearLookup: {
      const MatchTable& t = *program_.FindTable(program_.stages[entry->stage].ref);
      const TablePlacement* tp = plan_.FindTable(t.name);
      const Bytes key = BuildKey(program_, t, ctx.packet);
      const ActionCall* call =
          Lookup(target, t.name, tp->partitions.size() - 1, key, false);
      if (call == nullptr) {
        return Send(target, plan_.front, ctx, EntryKind::kFrontDefault,
                    entry->stage, t.name + " miss");
      }
      Apply(target, *call, ctx);
      return RunFrom(target, ctx, entry->stage + 1, t.name + " hit " + call->action);
    }
    case EntryKind::kFrontDefault: {
      const MatchTable& t = *program_.FindTable(program_.stages[entry->stage].ref);
      Apply(target, t.default_action, ctx);
      return RunFrom(target, ctx, entry->stage + 1,
                     t.name + " default " + t.default_action.action);
    }
    case EntryKind::kEgress: {
      TargetOutput out;
      out.verdict = FinalVerdict(program_, ctx);
      if (!out.verdict.is_forward()) out.reason = "dropped by action";
      out.action = out.verdict.is_forward()
                       ? "forward " + std::to_string(out.verdict.port)
                       : "drop";
      return out;
    }
  }
  return Dropped("bad resume point", "decode error");
}

PathRecord Simulator::Inject(const Bytes& packet, std::uint16_t ingress_port) {
  Resync();
  ++clock_;
  matched_ = false;
  PathRecord rec;
  std::set<std::string> visited;
  std::string current = plan_.front;
  TargetInput input{true, packet, ingress_port};
  const auto& chain = topology_.chain();
  for (std::size_t hops = 0;; ++hops) {
    if (hops >= options_.hop_limit) {
      rec.verdict = Verdict::Drop();
      rec.drop_reason = "hop limit exceeded";
      break;
    }
    const TargetInstance& inst = instances_.at(current);
    rec.latency_ns += inst.profile->per_packet_latency_ns;
    visited.insert(current);
    TargetOutput out = ProcessOnTarget(current, input);
    rec.steps.push_back({current, out.action});
    if (out.kind == TargetOutput::Kind::kLocalVerdict) {
      rec.verdict = std::move(out.verdict);
      rec.drop_reason = std::move(out.reason);
      break;
    }
    const int pos = topology_.ChainPosition(current) +
                    (out.kind == TargetOutput::Kind::kToNext ? 1 : -1);
    if (pos < 0 || pos >= static_cast<int>(chain.size())) {
      rec.verdict = Verdict::Drop();
      rec.drop_reason = "frame sent past the end of the chain";
      break;
    }
    const std::string& next = chain[static_cast<std::size_t>(pos)];
    rec.latency_ns += topology_.LinkBetween(current, next)->latency_ns;
    input = TargetInput{false, std::move(out.frame), 0};
    current = next;
  }

  for (const std::string& t : visited) {
    ++instances_.at(t).stats.packets;
    ++visited_by_[t];
  }
  if (rec.verdict.is_forward()) {
    ++forwards_;
  } else {
    ++drops_;
    ++drop_reasons_[rec.drop_reason];
  }
  latencies_.push_back(rec.latency_ns);
  EndOfPacket();
  if (options_.record_paths) paths_.push_back(rec);
  return rec;
}

void Simulator::EndOfPacket() {
  for (const TablePlacement& tp : plan_.tables) {
    if (tp.mode != SplitMode::kAsicCache) continue;
    const CachePolicy& policy = control_.view(tp.table).policy();
    if (clock_ % policy.epoch_length != 0) continue;
    auto& misses = epoch_misses_[tp.table];
    const EpochResult r = control_.RunEpoch(tp.table, misses, clock_);
    ++epochs_;
    promotions_ += r.promoted.size();
    evictions_ += r.evicted.size();
    misses.clear();
  }
}

void Simulator::Run(const TrafficTrace& trace) {
  for (const TraceRecord& r : trace) Inject(r.packet, r.ingress_port);
}

std::optional<std::uint64_t> Simulator::ReadCounter(const std::string& name,
                                                    bool reset) {
  auto host = plan_.extern_hosts.find(name);
  if (host == plan_.extern_hosts.end()) return std::nullopt;
  std::uint64_t& v = instances_.at(host->second).externs[name];
  const std::uint64_t out = v;
  if (reset) v = 0;
  return out;
}

SimStats Simulator::Stats() const {
  SimStats s;
  s.seed = seed_;
  s.packets_in = clock_;
  s.forwards = forwards_;
  s.drops = drops_;
  s.drop_reasons = drop_reasons_;
  for (const std::string& id : topology_.chain()) {
    s.targets.emplace_back(id, instances_.at(id).stats);
    double f = 0;
    if (clock_ > 0) {
      auto it = visited_by_.find(id);
      f = it == visited_by_.end() ? 0.0
                                  : static_cast<double>(it->second) /
                                        static_cast<double>(clock_);
    }
    s.traffic_fraction[id] = f;
  }
  s.partitions = partition_stats_;
  for (const auto& [name, host] : plan_.extern_hosts) {
    s.counters[name] = instances_.at(host).externs.at(name);
  }
  if (!latencies_.empty()) {
    s.latency.min_ns = *std::min_element(latencies_.begin(), latencies_.end());
    s.latency.max_ns = *std::max_element(latencies_.begin(), latencies_.end());
    double sum = 0;
    for (std::uint64_t l : latencies_) sum += static_cast<double>(l);
    s.latency.mean_ns = sum / static_cast<double>(latencies_.size());
  }
  if (clock_ > 0) s.sustainable_rate = SustainableRate(s.traffic_fraction, topology_);
  s.epochs = epochs_;
  s.promotions = promotions_;
  s.evictions = evictions_;
  return s;
}

ojson StatsToJson(const SimStats& s) {
  ojson targets = ojson::array();
  for (const auto& [id, t] : s.targets) {
    targets.push_back({{"target", id},
                       {"packets", t.packets},
                       {"visits", t.visits},
                       {"hits", t.hits},
                       {"misses", t.misses}});
  }
  ojson partitions = ojson::array();
  for (const auto& [label, hm] : s.partitions) {
    partitions.push_back({{"partition", label}, {"hits", hm.hits}, {"misses", hm.misses}});
  }
  ojson counters = ojson::object();
  for (const auto& [name, v] : s.counters) counters[name] = v;
  ojson reasons = ojson::object();
  for (const auto& [r, n] : s.drop_reasons) reasons[r] = n;
  ojson fractions = ojson::object();
  for (const auto& [id, f] : s.traffic_fraction) fractions[id] = f;
  ojson out;
  out["seed"] = s.seed;
  out["packets_in"] = s.packets_in;
  out["forwards"] = s.forwards;
  out["drops"] = s.drops;
  out["drop_reasons"] = reasons;
  out["targets"] = targets;
  out["partitions"] = partitions;
  out["counters"] = counters;
  out["latency_ns"] = {{"min", s.latency.min_ns},
                       {"mean", s.latency.mean_ns},
                       {"max", s.latency.max_ns}};
  out["traffic_fraction"] = fractions;
  if (s.sustainable_rate) {
    out["sustainable_rate_pps"] = *s.sustainable_rate;
  } else {
    out["sustainable_rate_pps"] = "no traffic";
  }
  out["cache"] = {{"epochs", s.epochs},
                  {"promotions", s.promotions},
                  {"evictions", s.evictions}};
  return out;
}

ojson PathToJson(const PathRecord& path) {
  ojson steps = ojson::array();
  for (const PathStep& st : path.steps) {
    steps.push_back({{"target", st.target}, {"action", st.action}});
  }
  ojson out;
  out["steps"] = steps;
  out["latency_ns"] = path.latency_ns;
  out["verdict"] = path.verdict.ToString();
  if (!path.drop_reason.empty()) out["drop_reason"] = path.drop_reason;
  return out;
}

}  // namespace hdp
