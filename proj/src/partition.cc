// Copyright 2026 The HDP Authors
// SPDX-License-Identifier: Apache-2.0

#include "hdp/partition.h"

#include <algorithm>
#include <deque>
#include <set>
#include <tuple>

#include "hdp/error.h"
#include "hdp/program_io.h"
#include "hdp/validate.h"

namespace hdp {
namespace {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

[[noreturn]] void Syntax(const std::string& path, const std::string& what) {
  throw Error(ErrorCode::kSyntax, path + ": " + what);
}

std::uint64_t NonNegative(const json& obj, const char* key,
                          const std::string& path) {
  if (!obj.contains(key)) Syntax(path, std::string("missing '") + key + "'");
  const json& v = obj[key];
  if (!v.is_number_integer() || v.get<std::int64_t>() < 0) {
    Syntax(path + "." + key, "expected a non-negative integer");
  }
  return v.get<std::uint64_t>();
}

std::string JoinIds(const std::vector<std::string>& ids) {
  std::string out;
  for (const auto& id : ids) out += (out.empty() ? "" : ",") + id;
  return out;
}

class Partitioner {
 public:
  Partitioner(const Pipeline& p, const Topology& topo,
              const PlacementConstraint& c)
      : p_(p), topo_(topo), c_(c) {}

  PartitionPlan Run() {
    plan_.front = topo_.chain().front();
    for (const TargetProfile& t : topo_.targets()) {
      auto it = c_.capacity_overrides.find(t.id);
      plan_.capacities[t.id] =
          it != c_.capacity_overrides.end() ? it->second : t.table_capacity;
      used_[t.id] = 0;
    }
    for (const auto& [target, cap] : c_.capacity_overrides) {
      if (topo_.Find(target) == nullptr) {
        throw Error(ErrorCode::kUnmappablePin,
                    "capacity override names unknown target '" + target + "'");
      }
      (void)cap;
    }
    CheckPins();
    PlaceExterns();
    PlaceStages();
    Explore();
    BuildSubPipelines();
    CheckSelectWrites();
    Verify();
    return std::move(plan_);
  }

 private:
  std::optional<std::string> PinFor(const std::string& stage_name) const {
    auto it = c_.pins.find(stage_name);
    if (it == c_.pins.end()) return std::nullopt;
    return it->second;
  }

  void CheckPins() {
    for (const auto& [stage, target] : c_.pins) {
      const bool known = std::any_of(
          p_.stages.begin(), p_.stages.end(),
          [&](const Stage& s) { return s.kind != StageKind::kBridge && s.name == stage; });
      if (!known) {
        throw Error(ErrorCode::kUnmappablePin, "no stage named '" + stage + "'");
      }
      if (topo_.Find(target) == nullptr) {
        throw Error(ErrorCode::kUnmappablePin, "stage '" + stage +
                                                   "' pinned to unknown target '" +
                                                   target + "'");
      }
    }
  }

  void PlaceExterns() {
    for (const ExternDecl& e : p_.externs) {
      std::optional<std::string> pinned;
      for (const Stage& s : p_.stages) {
        if (s.kind == StageKind::kCall && s.ref == e.name) {
          if (auto pin = PinFor(s.name)) {
            pinned = pin;
            break;
          }
        }
      }
      if (pinned) {
        const auto check = CapabilityCheck(*topo_.Find(*pinned),
                                           ExternRequirement{e.kind});
        if (!check.ok) {
          throw Error(ErrorCode::kUnmappablePin,
                      "extern '" + e.name + "' pinned to " + *pinned + ": " +
                          check.reason);
        }
        plan_.extern_hosts[e.name] = *pinned;
        continue;
      }
      std::vector<std::string> checked;
      for (const std::string& id : topo_.chain()) {
        checked.push_back(id);
        if (CapabilityCheck(*topo_.Find(id), ExternRequirement{e.kind}).ok) {
          plan_.extern_hosts[e.name] = id;
          break;
        }
      }
      if (!plan_.extern_hosts.contains(e.name)) {
        throw Error(ErrorCode::kUnsupportedExtern,
                    e.name + " (" + std::string(ExternKindName(e.kind)) +
                        "); targets checked: " + JoinIds(checked));
      }
    }
  }

  std::uint64_t Remaining(const std::string& target) const {
    const std::uint64_t cap = plan_.capacities.at(target);
    const std::uint64_t used = used_.at(target);
    return used >= cap ? 0 : cap - used;
  }

  bool Fits(const std::string& target, std::uint64_t entries) const {
    TargetProfile t = *topo_.Find(target);
    t.table_capacity = plan_.capacities.at(target);
    return CapabilityCheck(t, TableSpaceRequirement{entries}, used_.at(target)).ok;
  }

  // Target all of the table's extern calls are hosted on, if any.
  std::optional<std::string> RequiredHost(const MatchTable& t) const {
    std::optional<std::string> host;
    for (const std::string& e : p_.TableExterns(t)) {
      const std::string& h = plan_.extern_hosts.at(e);
      if (host && *host != h) {
        throw Error(ErrorCode::kInfeasible,
                    "table '" + t.name + "' calls externs hosted on " + *host +
                        " and " + h);
      }
      host = h;
    }
    return host;
  }

  void Allocate(TablePlacement& tp, const std::string& target,
                std::uint64_t entries, PartitionRole role) {
    used_[target] += entries;
    tp.partitions.push_back({target, entries, role});
  }

  // Picks the first candidate with room for `entries` that can host the
  // table's externs. Throws with the right error when none qualifies.
  std::string PickTarget(const MatchTable& t, const std::vector<std::string>& candidates,
                         std::uint64_t entries, const std::optional<std::string>& pin,
                         const std::optional<std::string>& host) {
    if (pin) {
      if (host && *pin != *host) {
        throw Error(ErrorCode::kUnmappablePin,
                    "table '" + t.name + "' pinned to " + *pin +
                        " but its externs live on " + *host);
      }
      if (!Fits(*pin, entries)) {
        throw Error(ErrorCode::kCapacityExceeded,
                    "table '" + t.name + "' on " + *pin + ": " +
                        std::to_string(entries) + " entries, " +
                        std::to_string(Remaining(*pin)) + " free");
      }
      return *pin;
    }
    for (const std::string& id : candidates) {
      if (host && id != *host) continue;
      if (Fits(id, entries)) return id;
    }
    const std::string where = host ? *host : JoinIds(candidates);
    throw Error(ErrorCode::kCapacityExceeded,
                "table '" + t.name + "' (" + std::to_string(entries) +
                    " entries) fits on none of: " + (where.empty() ? "<none>" : where));
  }

  void PlaceTable(const MatchTable& t, const Stage& stage) {
    TablePlacement tp;
    tp.table = t.name;
    auto split_it = c_.tables.find(t.name);
    const TableSplit split =
        split_it != c_.tables.end() ? split_it->second : TableSplit{};
    tp.mode = split.mode;
    const auto pin = PinFor(stage.name);
    const auto host = RequiredHost(t);
    const auto size = static_cast<std::uint64_t>(t.size_hint);
    const std::vector<std::string>& chain = topo_.chain();
    const std::vector<std::string> behind(chain.begin() + 1, chain.end());

    switch (split.mode) {
      case SplitMode::kNone:
        Allocate(tp, PickTarget(t, chain, size, pin, host), size,
                 PartitionRole::kAuthoritative);
        break;
      case SplitMode::kStaticSplit: {
        const std::uint64_t share = split.asic_share;
        const std::uint64_t rest = size > share ? size - share : 0;
        if (share > 0) {
          if (!Fits(plan_.front, share)) {
            throw Error(ErrorCode::kCapacityExceeded,
                        "table '" + t.name + "' front share of " +
                            std::to_string(share) + " on " + plan_.front +
                            ", " + std::to_string(Remaining(plan_.front)) +
                            " free");
          }
          Allocate(tp, plan_.front, share, PartitionRole::kAuthoritative);
        }
        if (rest > 0) {
          if (behind.empty() && !pin) {
            throw Error(ErrorCode::kCapacityExceeded,
                        "table '" + t.name + "' needs " + std::to_string(rest) +
                            " entries beyond " + plan_.front +
                            " but no target follows it");
          }
          Allocate(tp, PickTarget(t, behind, rest, pin, host), rest,
                   PartitionRole::kAuthoritative);
        }
        if (tp.partitions.empty()) {
          Allocate(tp, plan_.front, 0, PartitionRole::kAuthoritative);
        }
        break;
      }
      case SplitMode::kAsicCache: {
        if (behind.empty() && !pin) {
          throw Error(ErrorCode::kCapacityExceeded,
                      "table '" + t.name + "' needs a main-memory target behind " +
                          plan_.front);
        }
        if (pin && *pin == plan_.front) {
          throw Error(ErrorCode::kUnmappablePin,
                      "cached table '" + t.name + "' cannot be pinned to the front");
        }
        if (split.cache_capacity > 0) {
          if (!Fits(plan_.front, split.cache_capacity)) {
            throw Error(ErrorCode::kCapacityExceeded,
                        "cache for table '" + t.name + "' on " + plan_.front +
                            ": " + std::to_string(split.cache_capacity) +
                            " entries, " + std::to_string(Remaining(plan_.front)) +
                            " free");
          }
          Allocate(tp, plan_.front, split.cache_capacity, PartitionRole::kCache);
        }
        Allocate(tp, PickTarget(t, behind, size, pin, host), size,
                 PartitionRole::kAuthoritative);
        break;
      }
    }
    plan_.tables.push_back(std::move(tp));
  }

  void PlaceStages() {
    for (const Stage& s : p_.stages) {
      StagePlacement sp;
      switch (s.kind) {
        case StageKind::kCall:
          sp.home = plan_.extern_hosts.at(s.ref);
          break;
        case StageKind::kApply: {
          const MatchTable& t = *p_.FindTable(s.ref);
          if (plan_.FindTable(t.name) == nullptr) PlaceTable(t, s);
          const TablePlacement& tp = *plan_.FindTable(t.name);
          sp.home = tp.rear().target;
          if (tp.split()) {
            sp.split = true;
            sp.front = tp.front().target;
          }
          break;
        }
        case StageKind::kBridge:
          // Already-partitioned programs are not re-partitioned; the
          // executor ignores bridge stages.
          sp.home = plan_.front;
          break;
      }
      plan_.stages.push_back(std::move(sp));
    }
  }

  std::uint8_t Send(const std::string& from, std::size_t at_stage,
                    const std::string& target, EntryKind kind, std::size_t stage) {
    const auto key = std::make_tuple(target, kind, stage);
    auto it = entry_ids_.find(key);
    std::uint8_t id;
    if (it == entry_ids_.end()) {
      if (plan_.entries.size() >= 255) {
        throw Error(ErrorCode::kInfeasible, "more than 255 resume points");
      }
      id = static_cast<std::uint8_t>(plan_.entries.size() + 1);
      entry_ids_.emplace(key, id);
      plan_.entries.push_back({id, target, kind, stage});
      work_.push_back({target, kind, stage});
    } else {
      id = it->second;
    }
    Hop hop{from, at_stage, id};
    if (std::find(plan_.hops.begin(), plan_.hops.end(), hop) == plan_.hops.end()) {
      plan_.hops.push_back(hop);
    }
    return id;
  }

  void MarkExecuted(const std::string& target, std::size_t stage) {
    executed_.insert({target, stage});
  }

  // Follows the stage list from `stage` on `at`, forking on split probes.
  void RunFrom(const std::string& at, std::size_t stage) {
    while (true) {
      if (!continuations_.insert({at, stage}).second) return;
      if (stage == p_.stages.size()) {
        if (at != plan_.front) {
          Send(at, stage, plan_.front, EntryKind::kEgress, stage);
        }
        return;
      }
      if (p_.stages[stage].kind == StageKind::kBridge) {
        ++stage;
        continue;
      }
      const StagePlacement& sp = plan_.stages[stage];
      if (!sp.split) {
        if (at != sp.home) {
          Send(at, stage, sp.home, EntryKind::kRunFrom, stage);
          return;
        }
        MarkExecuted(at, stage);
        ++stage;
        continue;
      }
      if (at != sp.front) {
        Send(at, stage, sp.front, EntryKind::kRunFrom, stage);
        return;
      }
      MarkExecuted(at, stage);
      Send(at, stage, sp.home, EntryKind::kRearLookup, stage);  // miss
      ++stage;                                                  // hit
    }
  }

  void Explore() {
    RunFrom(plan_.front, 0);
    while (!work_.empty()) {
      const WorkItem item = work_.front();
      work_.pop_front();
      switch (item.kind) {
        case EntryKind::kRunFrom:
          RunFrom(item.target, item.stage);
          break;
        case EntryKind::kRearLookup:
          MarkExecuted(item.target, item.stage);
          RunFrom(item.target, item.stage + 1);  // hit
          Send(item.target, item.stage, plan_.front, EntryKind::kFrontDefault,
               item.stage);  // miss
          break;
        case EntryKind::kFrontDefault:
          RunFrom(item.target, item.stage + 1);
          break;
        case EntryKind::kEgress:
          break;
      }
    }
  }

  void BuildSubPipelines() {
    std::set<std::string> participating{plan_.front};
    for (const StagePlacement& sp : plan_.stages) {
      participating.insert(sp.home);
      if (sp.split) participating.insert(sp.front);
    }
    for (const auto& [e, host] : plan_.extern_hosts) participating.insert(host);
    for (const TablePlacement& tp : plan_.tables) {
      for (const TablePartition& part : tp.partitions) {
        participating.insert(part.target);
      }
    }
    for (const std::string& id : topo_.chain()) {
      if (!participating.contains(id)) continue;
      SubPipeline sub;
      sub.target = id;
      for (std::size_t i = 0; i < p_.stages.size(); ++i) {
        if (executed_.contains({id, i})) sub.stages.push_back(i);
      }
      for (const EntryPoint& e : plan_.entries) {
        if (e.target == id) sub.entry_ids.push_back(e.stage_id);
      }
      for (const Hop& h : plan_.hops) {
        if (h.from == id &&
            std::find(sub.exit_ids.begin(), sub.exit_ids.end(), h.to_entry) ==
                sub.exit_ids.end()) {
          sub.exit_ids.push_back(h.to_entry);
        }
      }
      std::sort(sub.exit_ids.begin(), sub.exit_ids.end());
      plan_.subpipelines.push_back(std::move(sub));
    }

    OverheadReport& o = plan_.overhead;
    o.participating_targets = plan_.subpipelines.size();
    o.parser_replicas = o.participating_targets;
    o.extra_parser_replicas = o.participating_targets - 1;
    std::vector<std::string> steps{plan_.front};
    for (std::size_t i = 0; i < plan_.stages.size(); ++i) {
      if (p_.stages[i].kind == StageKind::kBridge) continue;
      const StagePlacement& sp = plan_.stages[i];
      if (sp.split) steps.push_back(sp.front);
      steps.push_back(sp.home);
    }
    std::size_t changes = 0;
    for (std::size_t i = 1; i < steps.size(); ++i) {
      if (steps[i] != steps[i - 1]) ++changes;
    }
    o.bridges = 2 * changes;
  }

  // Downstream targets re-parse the bridged payload, so a write to a parser
  // select field could change the parse path between targets.
  void CheckSelectWrites() {
    if (plan_.subpipelines.size() <= 1) return;
    const std::vector<FieldRef> selects = ParserSelectFields(p_);
    for (const ActionDef& a : p_.actions) {
      for (const Primitive& prim : a.body) {
        if (prim.op == PrimitiveOp::kSetField &&
            std::find(selects.begin(), selects.end(), prim.field) != selects.end()) {
          throw Error(ErrorCode::kInfeasible,
                      "action '" + a.name + "' writes parser select field " +
                          prim.field.ToString() +
                          ", which cannot cross a bridge");
        }
      }
    }
  }

  void Verify() {
    std::map<std::string, std::uint64_t> allocated;
    for (const TablePlacement& tp : plan_.tables) {
      for (const TablePartition& part : tp.partitions) {
        allocated[part.target] += part.capacity;
      }
    }
    for (const auto& [target, total] : allocated) {
      if (total > plan_.capacities.at(target)) {
        throw Error(ErrorCode::kCapacityExceeded,
                    target + " allocated " + std::to_string(total) + " of " +
                        std::to_string(plan_.capacities.at(target)));
      }
    }
    for (const auto& [name, host] : plan_.extern_hosts) {
      const ExternDecl* e = p_.FindExtern(name);
      if (!CapabilityCheck(*topo_.Find(host), ExternRequirement{e->kind}).ok) {
        throw Error(ErrorCode::kUnsupportedExtern, name + " on " + host);
      }
    }
  }

  struct WorkItem {
    std::string target;
    EntryKind kind;
    std::size_t stage;
  };

  const Pipeline& p_;
  const Topology& topo_;
  const PlacementConstraint& c_;
  PartitionPlan plan_;
  std::map<std::string, std::uint64_t> used_;
  std::map<std::tuple<std::string, EntryKind, std::size_t>, std::uint8_t> entry_ids_;
  std::set<std::pair<std::string, std::size_t>> continuations_;
  std::set<std::pair<std::string, std::size_t>> executed_;
  std::deque<WorkItem> work_;
};

ojson PartitionJson(const TablePartition& part) {
  return {{"target", part.target},
          {"capacity", part.capacity},
          {"role", part.role == PartitionRole::kCache ? "cache" : "authoritative"}};
}

MatchTable PartitionTable(const MatchTable& t, const TablePartition& part) {
  MatchTable out = t;
  out.size_hint = static_cast<std::int64_t>(part.capacity);
  out.role = part.role;
  return out;
}

}  // namespace

std::string_view SplitModeName(SplitMode mode) {
  switch (mode) {
    case SplitMode::kNone: return "none";
    case SplitMode::kStaticSplit: return "static_split";
    case SplitMode::kAsicCache: return "asic_cache";
  }
  return "unknown";
}

std::string_view EntryKindName(EntryKind kind) {
  switch (kind) {
    case EntryKind::kRunFrom: return "run_from";
    case EntryKind::kRearLookup: return "rear_lookup";
    case EntryKind::kFrontDefault: return "front_default";
    case EntryKind::kEgress: return "egress";
  }
  return "unknown";
}

PlacementConstraint ParseConstraints(const nlohmann::json& section) {
  PlacementConstraint c;
  if (section.is_null()) return c;
  if (!section.is_object()) Syntax("constraints", "expected an object");
  for (auto it = section.begin(); it != section.end(); ++it) {
    const std::string& key = it.key();
    const json& v = it.value();
    const std::string path = "constraints." + key;
    if (!v.is_object()) Syntax(path, "expected an object");
    if (key == "pins") {
      for (auto p = v.begin(); p != v.end(); ++p) {
        if (!p->is_string()) Syntax(path + "." + p.key(), "expected a target id");
        c.pins[p.key()] = p->get<std::string>();
      }
    } else if (key == "tables") {
      for (auto t = v.begin(); t != v.end(); ++t) {
        const std::string tpath = path + "." + t.key();
        if (!t->is_object() || !t->contains("mode") || !(*t)["mode"].is_string()) {
          Syntax(tpath, "expected {\"mode\": ...}");
        }
        const std::string mode = (*t)["mode"].get<std::string>();
        TableSplit split;
        if (mode == "static_split") {
          split.mode = SplitMode::kStaticSplit;
          split.asic_share = NonNegative(*t, "asic_share", tpath);
        } else if (mode == "asic_cache") {
          split.mode = SplitMode::kAsicCache;
          split.cache_capacity = NonNegative(*t, "cache_capacity", tpath);
        } else if (mode != "none") {
          Syntax(tpath + ".mode", "unknown mode '" + mode + "'");
        }
        for (auto k = t->begin(); k != t->end(); ++k) {
          if (k.key() != "mode" && k.key() != "asic_share" &&
              k.key() != "cache_capacity") {
            Syntax(tpath, "unknown key '" + k.key() + "'");
          }
        }
        c.tables[t.key()] = split;
      }
    } else if (key == "capacity_overrides") {
      for (auto o = v.begin(); o != v.end(); ++o) {
        if (!o->is_number_integer() || o->get<std::int64_t>() < 0) {
          Syntax(path + "." + o.key(), "expected a non-negative integer");
        }
        c.capacity_overrides[o.key()] = o->get<std::uint64_t>();
      }
    } else {
      Syntax("constraints", "unknown key '" + key + "'");
    }
  }
  return c;
}

std::uint64_t TablePlacement::LogicalCapacity() const {
  std::uint64_t total = 0;
  for (const TablePartition& part : partitions) {
    if (part.role == PartitionRole::kAuthoritative) total += part.capacity;
  }
  return total;
}

const EntryPoint* PartitionPlan::FindEntry(std::uint8_t stage_id) const {
  if (stage_id == 0 || stage_id > entries.size()) return nullptr;
  return &entries[stage_id - 1u];
}

std::optional<std::uint8_t> PartitionPlan::EntryId(const std::string& target,
                                                   EntryKind kind,
                                                   std::size_t stage) const {
  for (const EntryPoint& e : entries) {
    if (e.target == target && e.kind == kind && e.stage == stage) return e.stage_id;
  }
  return std::nullopt;
}

const TablePlacement* PartitionPlan::FindTable(const std::string& table) const {
  for (const TablePlacement& tp : tables) {
    if (tp.table == table) return &tp;
  }
  return nullptr;
}

const SubPipeline* PartitionPlan::FindSubPipeline(const std::string& target) const {
  for (const SubPipeline& s : subpipelines) {
    if (s.target == target) return &s;
  }
  return nullptr;
}

PartitionPlan Partition(const Pipeline& program, const Topology& topology,
                        const PlacementConstraint& constraint) {
  const auto diags = ValidateProgram(program);
  if (!diags.empty()) {
    throw Error(ErrorCode::kInvariantViolation,
                "program does not validate: " + diags.front().rule);
  }
  for (const auto& [table, split] : constraint.tables) {
    if (program.FindTable(table) == nullptr) {
      throw Error(ErrorCode::kUnresolvedReference,
                  "constraint names unknown table '" + table + "'");
    }
    (void)split;
  }
  return Partitioner(program, topology, constraint).Run();
}

nlohmann::ordered_json PlanToJson(const PartitionPlan& plan) {
  ojson doc;
  doc["front"] = plan.front;
  ojson subs = ojson::array();
  for (const SubPipeline& s : plan.subpipelines) {
    subs.push_back({{"target", s.target},
                    {"stages", s.stages},
                    {"entry_stage_ids", s.entry_ids},
                    {"exit_stage_ids", s.exit_ids}});
  }
  doc["subpipelines"] = subs;
  ojson stages = ojson::array();
  for (const StagePlacement& sp : plan.stages) {
    ojson js{{"home", sp.home}, {"split", sp.split}};
    if (sp.split) js["front"] = sp.front;
    stages.push_back(js);
  }
  doc["stages"] = stages;
  ojson tables = ojson::array();
  for (const TablePlacement& tp : plan.tables) {
    ojson parts = ojson::array();
    for (const TablePartition& part : tp.partitions) parts.push_back(PartitionJson(part));
    tables.push_back({{"table", tp.table},
                      {"mode", SplitModeName(tp.mode)},
                      {"logical_capacity", tp.LogicalCapacity()},
                      {"partitions", parts}});
  }
  doc["tables"] = tables;
  ojson hosts = ojson::object();
  for (const auto& [e, host] : plan.extern_hosts) hosts[e] = host;
  doc["extern_hosts"] = hosts;
  ojson entries = ojson::array();
  for (const EntryPoint& e : plan.entries) {
    entries.push_back({{"stage_id", e.stage_id},
                       {"target", e.target},
                       {"kind", EntryKindName(e.kind)},
                       {"stage", e.stage}});
  }
  doc["entries"] = entries;
  doc["overhead"] = {{"participating_targets", plan.overhead.participating_targets},
                     {"parser_replicas", plan.overhead.parser_replicas},
                     {"extra_parser_replicas", plan.overhead.extra_parser_replicas},
                     {"bridges", plan.overhead.bridges}};
  return doc;
}

Pipeline SubprogramFor(const Pipeline& program, const PartitionPlan& plan,
                       const std::string& target) {
  if (plan.subpipelines.size() == 1) return program;
  Pipeline out;
  out.name = program.name.empty() ? target : program.name + "@" + target;
  out.headers = program.headers;
  out.parser = program.parser;
  out.deparser = program.deparser;
  for (const ExternDecl& e : program.externs) {
    if (plan.extern_hosts.at(e.name) == target) out.externs.push_back(e);
  }

  std::set<std::string> needed_actions;
  for (const TablePlacement& tp : plan.tables) {
    for (const TablePartition& part : tp.partitions) {
      if (part.target != target) continue;
      const MatchTable& t = *program.FindTable(tp.table);
      out.tables.push_back(PartitionTable(t, part));
      needed_actions.insert(t.actions.begin(), t.actions.end());
      needed_actions.insert(t.default_action.action);
    }
  }
  for (const ActionDef& a : program.actions) {
    if (!needed_actions.contains(a.name)) continue;
    ActionDef copy = a;
    std::erase_if(copy.body, [&](const Primitive& prim) {
      return prim.op == PrimitiveOp::kExternCall &&
             plan.extern_hosts.at(prim.extern_name) != target;
    });
    out.actions.push_back(std::move(copy));
  }

  const std::size_t n = program.stages.size();
  auto peer_of_entry = [&](const EntryPoint& e) {
    for (const Hop& h : plan.hops) {
      if (h.to_entry == e.stage_id) return h.from;
    }
    return std::string();
  };
  for (std::size_t i = 0; i <= n; ++i) {
    for (const EntryPoint& e : plan.entries) {
      if (e.target == target && e.stage == i) {
        Stage s;
        s.kind = StageKind::kBridge;
        s.bridge = {BridgeDirection::kDecap, e.stage_id, peer_of_entry(e)};
        out.stages.push_back(s);
      }
    }
    if (i < n) {
      const StagePlacement& sp = plan.stages[i];
      const Stage& st = program.stages[i];
      if (st.kind != StageKind::kBridge &&
          (sp.home == target || (sp.split && sp.front == target))) {
        out.stages.push_back(st);
      }
    }
    for (const Hop& h : plan.hops) {
      if (h.from == target && h.at_stage == i) {
        Stage s;
        s.kind = StageKind::kBridge;
        s.bridge = {BridgeDirection::kEncap, h.to_entry,
                    plan.FindEntry(h.to_entry)->target};
        out.stages.push_back(s);
      }
    }
  }
  return out;
}

std::map<std::string, std::string> EmitSubprograms(const Pipeline& program,
                                                   const PartitionPlan& plan) {
  std::map<std::string, std::string> out;
  for (const SubPipeline& s : plan.subpipelines) {
    out[s.target] = SerializeProgram(SubprogramFor(program, plan, s.target));
  }
  return out;
}

}  // namespace hdp
