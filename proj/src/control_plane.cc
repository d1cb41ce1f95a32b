// Copyright 2026 The HDP Authors
// SPDX-License-Identifier: Apache-2.0

#include "hdp/control_plane.h"

#include <algorithm>

#include "hdp/error.h"

namespace hdp {
namespace {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

std::string KeyText(const Bytes& key) { return "0x" + ToHex(key); }

}  // namespace

LogicalTableView::LogicalTableView(const Pipeline& program,
                                   const MatchTable& table,
                                   const TablePlacement& placement,
                                   CachePolicy policy)
    : program_(&program),
      table_(&table),
      placement_(placement),
      policy_(policy),
      key_bytes_(program.KeyBytes(table)),
      occupancy_(placement.partitions.size(), 0) {
  if (policy_.promotion_threshold == 0 || policy_.epoch_length == 0) {
    throw Error(ErrorCode::kInvalidArgument,
                "promotion_threshold and epoch_length must be >= 1");
  }
}

std::optional<std::size_t> LogicalTableView::CachePartition() const {
  for (std::size_t i = 0; i < placement_.partitions.size(); ++i) {
    if (placement_.partitions[i].role == PartitionRole::kCache) return i;
  }
  return std::nullopt;
}

PlacementDecision LogicalTableView::Insert(const Bytes& key,
                                           const ActionCall& action) {
  if (key.size() != key_bytes_) {
    throw Error(ErrorCode::kInvalidArgument,
                "key " + KeyText(key) + " must be " + std::to_string(key_bytes_) +
                    " bytes for table '" + name() + "'");
  }
  const ActionDef* a = program_->FindAction(action.action);
  if (a == nullptr || std::find(table_->actions.begin(), table_->actions.end(),
                                action.action) == table_->actions.end()) {
    throw Error(ErrorCode::kInvalidArgument,
                "action '" + action.action + "' is not an action of '" + name() + "'");
  }
  if (action.args.size() != a->params.size()) {
    throw Error(ErrorCode::kInvalidArgument,
                "action '" + a->name + "' takes " +
                    std::to_string(a->params.size()) + " arguments");
  }
  for (std::size_t i = 0; i < action.args.size(); ++i) {
    if (action.args[i].size() != BytesForWidth(a->params[i].width) ||
        !FitsWidth(action.args[i], a->params[i].width)) {
      throw Error(ErrorCode::kInvalidArgument,
                  "argument " + a->params[i].name + " does not fit its width");
    }
  }
  if (entries_.contains(key)) {
    throw Error(ErrorCode::kDuplicateKey, KeyText(key) + " in '" + name() + "'");
  }
  for (std::size_t i = 0; i < placement_.partitions.size(); ++i) {
    const TablePartition& part = placement_.partitions[i];
    if (part.role != PartitionRole::kAuthoritative) continue;
    if (occupancy_[i] >= part.capacity) continue;
    ++occupancy_[i];
    LogicalEntry entry;
    entry.action = action;
    entry.partition = i;
    entries_.emplace(key, std::move(entry));
    return {part.target, i, std::nullopt};
  }
  throw Error(ErrorCode::kCapacityExceeded,
              "table '" + name() + "' is full at " +
                  std::to_string(LogicalCapacity()) + " entries");
}

void LogicalTableView::EraseFromCache(const Bytes& key, LogicalEntry& entry) {
  if (!entry.cached) return;
  lru_.erase({entry.last_use, key});
  --occupancy_[*CachePartition()];
  entry.cached = false;
}

void LogicalTableView::Delete(const Bytes& key) {
  auto it = entries_.find(key);
  if (it == entries_.end()) {
    throw Error(ErrorCode::kNotFound, KeyText(key) + " in '" + name() + "'");
  }
  EraseFromCache(key, it->second);
  --occupancy_[it->second.partition];
  entries_.erase(it);
}

EpochResult LogicalTableView::RunEpoch(
    const std::map<Bytes, std::uint64_t>& miss_counts, std::uint64_t now) {
  EpochResult result;
  const auto cache = CachePartition();
  if (policy_.mode != SplitMode::kAsicCache || !cache) return result;
  const std::uint64_t capacity = placement_.partitions[*cache].capacity;

  std::vector<std::pair<std::uint64_t, Bytes>> candidates;
  for (const auto& [key, misses] : miss_counts) {
    if (misses < policy_.promotion_threshold) continue;
    auto it = entries_.find(key);
    if (it == entries_.end() || it->second.cached) continue;
    candidates.emplace_back(misses, key);
  }
  std::sort(candidates.begin(), candidates.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  });

  std::set<Bytes> promoted_now;
  for (const auto& [misses, key] : candidates) {
    if (capacity == 0) break;
    if (occupancy_[*cache] >= capacity) {
      auto victim = std::find_if(lru_.begin(), lru_.end(), [&](const auto& slot) {
        return !promoted_now.contains(slot.second);
      });
      if (victim == lru_.end()) break;
      const Bytes evicted = victim->second;
      EraseFromCache(evicted, entries_.at(evicted));
      result.evicted.push_back(evicted);
    }
    LogicalEntry& entry = entries_.at(key);
    entry.cached = true;
    entry.last_use = now;
    lru_.insert({now, key});
    ++occupancy_[*cache];
    promoted_now.insert(key);
    result.promoted.push_back(key);
  }
  return result;
}

void LogicalTableView::RecordFrontHit(const Bytes& key, std::uint64_t time) {
  auto it = entries_.find(key);
  if (it == entries_.end()) return;
  LogicalEntry& entry = it->second;
  ++entry.front_hits;
  if (entry.cached && time > entry.last_use) {
    lru_.erase({entry.last_use, key});
    entry.last_use = time;
    lru_.insert({time, key});
  }
}

void LogicalTableView::RecordFrontMisses(const Bytes& key, std::uint64_t count) {
  auto it = entries_.find(key);
  if (it != entries_.end()) it->second.front_misses += count;
}

std::optional<PlacementDecision> LogicalTableView::Find(const Bytes& key) const {
  auto it = entries_.find(key);
  if (it == entries_.end()) return std::nullopt;
  PlacementDecision d;
  d.partition = it->second.partition;
  d.authoritative = placement_.partitions[d.partition].target;
  if (it->second.cached) d.cached_at = placement_.partitions[*CachePartition()].target;
  return d;
}

TableEntries LogicalTableView::PartitionContents(std::size_t partition) const {
  TableEntries out;
  const bool is_cache = placement_.partitions[partition].role == PartitionRole::kCache;
  for (const auto& [key, entry] : entries_) {
    if (is_cache ? entry.cached : entry.partition == partition) {
      out.emplace(key, entry.action);
    }
  }
  return out;
}

std::uint64_t LogicalTableView::Occupancy(std::size_t partition) const {
  return occupancy_[partition];
}

std::vector<Bytes> LogicalTableView::CachedKeys() const {
  std::vector<Bytes> out;
  for (const auto& [key, entry] : entries_) {
    if (entry.cached) out.push_back(key);
  }
  return out;
}

std::vector<std::string> LogicalTableView::CoherenceViolations() const {
  std::vector<std::string> out;
  std::vector<std::uint64_t> counted(placement_.partitions.size(), 0);
  const auto cache = CachePartition();
  for (const auto& [key, entry] : entries_) {
    if (entry.partition >= placement_.partitions.size() ||
        placement_.partitions[entry.partition].role != PartitionRole::kAuthoritative) {
      out.push_back(KeyText(key) + " has no authoritative placement");
      continue;
    }
    ++counted[entry.partition];
    if (entry.cached) {
      if (!cache) {
        out.push_back(KeyText(key) + " cached without a cache partition");
        continue;
      }
      ++counted[*cache];
      if (!lru_.contains({entry.last_use, key})) {
        out.push_back(KeyText(key) + " missing from the LRU index");
      }
    }
  }
  if (cache && lru_.size() != counted[*cache]) {
    out.push_back("LRU index holds stale keys");
  }
  for (std::size_t i = 0; i < placement_.partitions.size(); ++i) {
    if (counted[i] != occupancy_[i]) {
      out.push_back("partition " + std::to_string(i) + " occupancy drift");
    }
    if (counted[i] > placement_.partitions[i].capacity) {
      out.push_back("partition " + std::to_string(i) + " over capacity");
    }
  }
  return out;
}

Bytes LogicalTableView::ParseKey(const json& key) const {
  const auto parse_one = [&](const json& v, const FieldRef& ref) {
    const FieldDef* f = program_->FindField(ref);
    if (v.is_string()) return ParseValue(v.get<std::string>(), f->width);
    if (v.is_number_unsigned() || (v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
      return FromUint(v.get<std::uint64_t>(), f->width);
    }
    throw Error(ErrorCode::kInvalidArgument, "bad key value " + v.dump());
  };
  Bytes out;
  if (key.is_array()) {
    if (key.size() != table_->key.size()) {
      throw Error(ErrorCode::kInvalidArgument,
                  "table '" + name() + "' has " +
                      std::to_string(table_->key.size()) + " key fields");
    }
    for (std::size_t i = 0; i < key.size(); ++i) {
      const Bytes v = parse_one(key[i], table_->key[i]);
      out.insert(out.end(), v.begin(), v.end());
    }
    return out;
  }
  if (table_->key.size() != 1) {
    throw Error(ErrorCode::kInvalidArgument,
                "multi-field key for '" + name() + "' must be an array");
  }
  return parse_one(key, table_->key[0]);
}

ojson LogicalTableView::KeyJson(const Bytes& key) const {
  ojson fields = ojson::array();
  std::size_t at = 0;
  for (const FieldRef& ref : table_->key) {
    const FieldDef* f = program_->FindField(ref);
    const std::size_t n = BytesForWidth(f->width);
    fields.push_back(FormatValue(std::span(key).subspan(at, n), f->width));
    at += n;
  }
  if (fields.size() == 1) return fields[0];
  return fields;
}

ActionCall LogicalTableView::ParseAction(const json& action, const json& args) const {
  if (!action.is_string()) {
    throw Error(ErrorCode::kInvalidArgument, "'action' must be a string");
  }
  ActionCall call;
  call.action = action.get<std::string>();
  const ActionDef* a = program_->FindAction(call.action);
  if (a == nullptr) {
    throw Error(ErrorCode::kInvalidArgument, "unknown action '" + call.action + "'");
  }
  const json list = args.is_null() ? json::array() : args;
  if (!list.is_array() || list.size() != a->params.size()) {
    throw Error(ErrorCode::kInvalidArgument,
                "action '" + a->name + "' takes " +
                    std::to_string(a->params.size()) + " arguments");
  }
  for (std::size_t i = 0; i < list.size(); ++i) {
    const json& v = list[i];
    const std::uint32_t w = a->params[i].width;
    if (v.is_string()) {
      call.args.push_back(ParseValue(v.get<std::string>(), w));
    } else if (v.is_number_integer() && v.get<std::int64_t>() >= 0) {
      call.args.push_back(FromUint(v.get<std::uint64_t>(), w));
    } else {
      throw Error(ErrorCode::kInvalidArgument, "bad argument " + v.dump());
    }
  }
  return call;
}

ControlPlane::ControlPlane(const Pipeline& program, const PartitionPlan& plan,
                           std::map<std::string, CachePolicy> policies)
    : program_(&program), plan_(&plan) {
  for (const TablePlacement& tp : plan.tables) {
    CachePolicy policy;
    if (auto it = policies.find(tp.table); it != policies.end()) policy = it->second;
    policy.mode = tp.mode;
    for (const TablePartition& part : tp.partitions) {
      if (part.role == PartitionRole::kCache) policy.cache_capacity = part.capacity;
    }
    views_.emplace(tp.table, LogicalTableView(program, *program.FindTable(tp.table),
                                              tp, policy));
  }
}

LogicalTableView& ControlPlane::view(const std::string& table) {
  auto it = views_.find(table);
  if (it == views_.end()) {
    throw Error(ErrorCode::kNotFound, "no placed table '" + table + "'");
  }
  return it->second;
}

const LogicalTableView& ControlPlane::view(const std::string& table) const {
  return const_cast<ControlPlane*>(this)->view(table);
}

PlacementDecision ControlPlane::Insert(const std::string& table, const Bytes& key,
                                       const ActionCall& action) {
  PlacementDecision d = view(table).Insert(key, action);
  Touch();
  return d;
}

void ControlPlane::Delete(const std::string& table, const Bytes& key) {
  view(table).Delete(key);
  Touch();
}

EpochResult ControlPlane::RunEpoch(const std::string& table,
                                   const std::map<Bytes, std::uint64_t>& miss_counts,
                                   std::uint64_t now) {
  EpochResult r = view(table).RunEpoch(miss_counts, now);
  if (!r.promoted.empty() || !r.evicted.empty()) Touch();
  return r;
}

std::uint64_t ControlPlane::ReadCounter(const std::string& extern_name, bool reset) {
  if (!plan_->extern_hosts.contains(extern_name)) {
    throw Error(ErrorCode::kUnknownExtern, "'" + extern_name + "'");
  }
  if (data_plane_ == nullptr) return 0;
  auto v = data_plane_->ReadCounter(extern_name, reset);
  if (!v) throw Error(ErrorCode::kUnknownExtern, "'" + extern_name + "'");
  return *v;
}

ojson ControlPlane::Snapshot() const {
  ojson tables = ojson::array();
  for (const auto& [name, v] : views_) {
    ojson parts = ojson::array();
    for (std::size_t i = 0; i < v.placement().partitions.size(); ++i) {
      const TablePartition& part = v.placement().partitions[i];
      parts.push_back({{"target", part.target},
                       {"role", part.role == PartitionRole::kCache ? "cache"
                                                                    : "authoritative"},
                       {"capacity", part.capacity},
                       {"occupancy", v.Occupancy(i)}});
    }
    ojson entries = ojson::array();
    const ActionDef* a = nullptr;
    for (const auto& [key, e] : v.entries()) {
      a = program_->FindAction(e.action.action);
      ojson args = ojson::array();
      for (std::size_t i = 0; i < e.action.args.size(); ++i) {
        args.push_back(FormatValue(e.action.args[i], a->params[i].width));
      }
      const auto d = v.Find(key);
      entries.push_back({{"key", v.KeyJson(key)},
                         {"action", e.action.action},
                         {"args", args},
                         {"authoritative", d->authoritative},
                         {"cached_at", d->cached_at ? ojson(*d->cached_at) : ojson()},
                         {"front_hits", e.front_hits},
                         {"front_misses", e.front_misses}});
    }
    tables.push_back({{"table", name},
                      {"mode", std::string(SplitModeName(v.policy().mode))},
                      {"logical_capacity", v.LogicalCapacity()},
                      {"partitions", parts},
                      {"entries", entries}});
  }
  return {{"tables", tables}};
}

ojson ControlPlane::Handle(const json& request) {
  try {
    if (!request.is_object() || !request.contains("op") || !request["op"].is_string()) {
      throw Error(ErrorCode::kInvalidArgument, "request needs a string 'op'");
    }
    const std::string op = request["op"].get<std::string>();
    auto table_of = [&]() -> LogicalTableView& {
      if (!request.contains("table") || !request["table"].is_string()) {
        throw Error(ErrorCode::kInvalidArgument, "request needs a 'table'");
      }
      return view(request["table"].get<std::string>());
    };
    if (op == "insert") {
      LogicalTableView& v = table_of();
      if (!request.contains("key") || !request.contains("action")) {
        throw Error(ErrorCode::kInvalidArgument, "insert needs 'key' and 'action'");
      }
      const Bytes key = v.ParseKey(request["key"]);
      const ActionCall call = v.ParseAction(
          request["action"], request.contains("args") ? request["args"] : json());
      const PlacementDecision d = Insert(v.name(), key, call);
      return {{"status", "ok"},
              {"payload", {{"authoritative", d.authoritative},
                           {"cached_at", d.cached_at ? ojson(*d.cached_at) : ojson()}}}};
    }
    if (op == "delete") {
      LogicalTableView& v = table_of();
      if (!request.contains("key")) {
        throw Error(ErrorCode::kInvalidArgument, "delete needs 'key'");
      }
      Delete(v.name(), v.ParseKey(request["key"]));
      return {{"status", "ok"}, {"payload", nullptr}};
    }
    if (op == "read_counter") {
      if (!request.contains("extern") || !request["extern"].is_string()) {
        throw Error(ErrorCode::kInvalidArgument, "read_counter needs 'extern'");
      }
      const bool reset = request.value("reset", false);
      return {{"status", "ok"},
              {"payload",
               {{"count", ReadCounter(request["extern"].get<std::string>(), reset)}}}};
    }
    if (op == "snapshot") return {{"status", "ok"}, {"payload", Snapshot()}};
    throw Error(ErrorCode::kInvalidArgument, "unknown op '" + op + "'");
  } catch (const Error& e) {
    return {{"status", "error"},
            {"error", ErrorCodeName(e.code())},
            {"message", e.what()}};
  } catch (const json::exception& e) {
    return {{"status", "error"},
            {"error", ErrorCodeName(ErrorCode::kInvalidArgument)},
            {"message", e.what()}};
  }
}

std::string ControlPlane::HandleLine(std::string_view line) {
  json request;
  try {
    request = json::parse(line.begin(), line.end());
  } catch (const json::parse_error& e) {
    ojson r{{"status", "error"},
            {"error", ErrorCodeName(ErrorCode::kSyntax)},
            {"message", e.what()}};
    return r.dump();
  }
  return Handle(request).dump();
}

}  // namespace hdp
