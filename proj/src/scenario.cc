// Copyright 2026 The HDP Authors
// SPDX-License-Identifier: Apache-2.0

#include "hdp/scenario.h"

#include <filesystem>
#include <random>
#include <set>

#include "hdp/error.h"
#include "hdp/exec.h"
#include "hdp/program_io.h"
#include "hdp/validate.h"

namespace hdp {
namespace {

using json = nlohmann::json;

[[noreturn]] void Bad(const std::string& what) {
  throw Error(ErrorCode::kSyntax, "scenario: " + what);
}

void AllowKeys(const json& obj, const std::string& where,
               std::initializer_list<const char*> keys) {
  if (!obj.is_object()) Bad(where + " must be an object");
  for (const auto& [k, v] : obj.items()) {
    bool known = false;
    for (const char* allowed : keys) known = known || k == allowed;
    if (!known) Bad("unknown key '" + k + "' in " + where);
  }
}

std::uint64_t Uint(const json& obj, const char* key, std::uint64_t fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj[key];
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
    Bad(std::string("'") + key + "' must be a non-negative integer");
  }
  return v.get<std::uint64_t>();
}

double Fraction(const json& obj, const char* key) {
  if (!obj.contains(key)) return 0;
  if (!obj[key].is_number()) Bad(std::string("'") + key + "' must be a number");
  const double v = obj[key].get<double>();
  if (v < 0 || v > 1) Bad(std::string("'") + key + "' must be in [0, 1]");
  return v;
}

std::string Str(const json& obj, const char* key) {
  if (!obj.contains(key) || !obj[key].is_string()) {
    Bad(std::string("'") + key + "' must be a string");
  }
  return obj[key].get<std::string>();
}

std::string Resolve(const std::string& base, const std::string& path) {
  const std::filesystem::path p(path);
  if (p.is_absolute() || base.empty()) return path;
  return (std::filesystem::path(base) / p).lexically_normal().string();
}

double Unit(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

Bytes RandomValue(std::mt19937_64& rng, std::uint32_t width) {
  Bytes v(BytesForWidth(width));
  for (std::size_t i = 0; i < v.size(); i += 8) {
    std::uint64_t r = rng();
    for (std::size_t j = i; j < v.size() && j < i + 8; ++j) {
      v[j] = static_cast<std::uint8_t>(r);
      r >>= 8;
    }
  }
  if (width % 8 != 0) v[0] &= static_cast<std::uint8_t>((1u << (width % 8)) - 1);
  return v;
}

Bytes RandomKey(std::mt19937_64& rng, const Pipeline& p, const MatchTable& t) {
  Bytes key;
  for (const FieldRef& ref : t.key) {
    const Bytes v = RandomValue(rng, p.FindField(ref)->width);
    key.insert(key.end(), v.begin(), v.end());
  }
  return key;
}

const MatchTable& TableFor(const Pipeline& p, const std::string& name) {
  if (!name.empty()) {
    const MatchTable* t = p.FindTable(name);
    if (t == nullptr) throw Error(ErrorCode::kUnresolvedReference, "table '" + name + "'");
    return *t;
  }
  for (const Stage& s : p.stages) {
    if (s.kind == StageKind::kApply) return *p.FindTable(s.ref);
  }
  throw Error(ErrorCode::kInvalidArgument, "program applies no table");
}

void InstallSynthetic(const SyntheticEntries& spec, const Pipeline& p,
                      ControlPlane& cp, std::mt19937_64& rng,
                      std::vector<Bytes>& installed) {
  const MatchTable& t = TableFor(p, spec.table);
  std::string action = spec.action;
  if (action.empty()) {
    for (const std::string& a : t.actions) {
      if (a != t.default_action.action) {
        action = a;
        break;
      }
    }
  }
  const ActionDef* a = p.FindAction(action);
  if (a == nullptr) throw Error(ErrorCode::kUnresolvedReference, "action '" + action + "'");
  if (spec.ports.empty()) Bad("synthetic_entries.ports must not be empty");
  std::set<Bytes> seen;
  for (std::uint64_t i = 0; i < spec.count; ++i) {
    Bytes key;
    do {
      key = RandomKey(rng, p, t);
    } while (!seen.insert(key).second);
    ActionCall call{action, {}};
    for (const ParamDef& param : a->params) {
      const std::uint64_t port = spec.ports[rng() % spec.ports.size()];
      const std::uint64_t mask =
          param.width >= 64 ? ~0ull : ((1ull << param.width) - 1);
      call.args.push_back(FromUint(port & mask, param.width));
    }
    cp.Insert(t.name, key, call);
    installed.push_back(key);
  }
}

TrafficTrace Synthesize(const SyntheticTrace& spec, const Pipeline& p,
                        const ControlPlane& cp, std::mt19937_64& rng) {
  const MatchTable& t = TableFor(p, spec.table);
  const auto& entries = cp.view(t.name).entries();
  std::vector<Bytes> keys;  // installed, in key order
  for (const auto& [k, e] : entries) keys.push_back(k);
  const std::size_t hot = std::min<std::size_t>(spec.hot_keys, keys.size());
  std::vector<Bytes> hot_keys;
  std::vector<std::size_t> order(keys.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  // Partial Fisher-Yates picks the hot set.
  for (std::size_t i = 0; i < hot; ++i) {
    const std::size_t j = i + rng() % (order.size() - i);
    std::swap(order[i], order[j]);
    hot_keys.push_back(keys[order[i]]);
  }

  TrafficTrace trace;
  std::uint64_t now = 0;
  for (std::uint64_t n = 0; n < spec.packets; ++n) {
    const double r = Unit(rng);
    Bytes key;
    if (!hot_keys.empty() && r < spec.hot_fraction) {
      key = hot_keys[rng() % hot_keys.size()];
    } else if (keys.empty() || r < spec.hot_fraction + spec.miss_fraction) {
      do {
        key = RandomKey(rng, p, t);
      } while (entries.contains(key));
    } else {
      key = keys[rng() % keys.size()];
    }
    trace.push_back({now, spec.ingress_port, PacketForKey(p, t, key, spec.frame_bytes)});
    now += spec.interarrival_ns;
  }
  return trace;
}

}  // namespace

Scenario ParseScenario(std::string_view text, const std::string& base_dir) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    Bad(std::string("JSON syntax error at byte ") + std::to_string(e.byte));
  }
  AllowKeys(j, "scenario",
            {"name", "program", "topology", "constraints", "cache_policy", "entries",
             "synthetic_entries", "trace", "synthetic_trace", "seed", "line_rate"});
  Scenario s;
  s.name = j.contains("name") ? Str(j, "name") : "scenario";
  s.program_path = Resolve(base_dir, Str(j, "program"));
  s.topology_path = Resolve(base_dir, Str(j, "topology"));
  if (j.contains("constraints")) s.constraints = j["constraints"];
  if (j.contains("cache_policy")) {
    const json& cp = j["cache_policy"];
    if (!cp.is_object()) Bad("cache_policy must be an object");
    for (const auto& [table, v] : cp.items()) {
      AllowKeys(v, "cache_policy." + table, {"promotion_threshold", "epoch_length"});
      CachePolicy policy;
      policy.promotion_threshold = Uint(v, "promotion_threshold", 1);
      policy.epoch_length = Uint(v, "epoch_length", 1000);
      if (policy.promotion_threshold == 0 || policy.epoch_length == 0) {
        Bad("cache_policy." + table + ": threshold and epoch_length must be >= 1");
      }
      s.policies[table] = policy;
    }
  }
  if (j.contains("entries")) {
    if (!j["entries"].is_array()) Bad("entries must be an array");
    for (const json& e : j["entries"]) {
      AllowKeys(e, "entries[]", {"table", "key", "action", "args"});
      if (!e.contains("key") || !e.contains("action")) Bad("entry needs key and action");
      s.entries.push_back({Str(e, "table"), e["key"], e["action"],
                           e.contains("args") ? e["args"] : json::array()});
    }
  }
  if (j.contains("synthetic_entries")) {
    const json& e = j["synthetic_entries"];
    AllowKeys(e, "synthetic_entries", {"table", "count", "action", "ports"});
    SyntheticEntries se;
    if (e.contains("table")) se.table = Str(e, "table");
    se.count = Uint(e, "count", 0);
    if (e.contains("action")) se.action = Str(e, "action");
    if (e.contains("ports")) {
      if (!e["ports"].is_array()) Bad("synthetic_entries.ports must be an array");
      se.ports.clear();
      for (const json& p : e["ports"]) {
        if (!p.is_number_unsigned()) Bad("ports must be non-negative integers");
        se.ports.push_back(p.get<std::uint64_t>());
      }
    }
    s.synthetic_entries = se;
  }
  if (j.contains("trace")) s.trace_path = Resolve(base_dir, Str(j, "trace"));
  if (j.contains("synthetic_trace")) {
    const json& t = j["synthetic_trace"];
    AllowKeys(t, "synthetic_trace",
              {"table", "packets", "hot_keys", "hot_fraction", "miss_fraction",
               "interarrival_ns", "frame_bytes", "ingress_port"});
    SyntheticTrace st;
    if (t.contains("table")) st.table = Str(t, "table");
    st.packets = Uint(t, "packets", 0);
    st.hot_keys = Uint(t, "hot_keys", 0);
    st.hot_fraction = Fraction(t, "hot_fraction");
    st.miss_fraction = Fraction(t, "miss_fraction");
    if (st.hot_fraction + st.miss_fraction > 1) Bad("hot + miss fraction exceeds 1");
    st.interarrival_ns = Uint(t, "interarrival_ns", 100);
    st.frame_bytes = Uint(t, "frame_bytes", 64);
    const std::uint64_t port = Uint(t, "ingress_port", 0);
    if (port > 0xffff) Bad("ingress_port exceeds 16 bits");
    st.ingress_port = static_cast<std::uint16_t>(port);
    s.synthetic_trace = st;
  }
  if (s.trace_path && s.synthetic_trace) Bad("give either trace or synthetic_trace");
  s.seed = Uint(j, "seed", 0);
  if (j.contains("line_rate")) {
    const json& lr = j["line_rate"];
    AllowKeys(lr, "line_rate", {"pps", "frame_bytes", "overhead_bytes"});
    if (lr.contains("pps")) {
      if (!lr["pps"].is_number() || lr["pps"].get<double>() <= 0) {
        Bad("line_rate.pps must be positive");
      }
      s.line_rate.pps = lr["pps"].get<double>();
    }
    s.line_rate.frame_bytes = Uint(lr, "frame_bytes", 64);
    s.line_rate.overhead_bytes = Uint(lr, "overhead_bytes", 20);
    if (s.line_rate.frame_bytes + s.line_rate.overhead_bytes == 0) {
      Bad("line_rate frame size must be positive");
    }
  }
  return s;
}

Scenario LoadScenario(const std::string& path) {
  const std::string text = ReadFile(path);
  return ParseScenario(text, std::filesystem::path(path).parent_path().string());
}

ScenarioInputs LoadInputs(const Scenario& s) {
  Pipeline program = LoadProgram(ReadFile(s.program_path));
  Topology topology = LoadTopology(ReadFile(s.topology_path));
  return {std::move(program), std::move(topology), ParseConstraints(s.constraints)};
}

Bytes PacketForKey(const Pipeline& p, const MatchTable& table, const Bytes& key,
                   std::size_t frame_bytes) {
  for (const ParserPath& path : EnumerateParserPaths(p)) {
    if (!path.accepted) continue;
    std::vector<std::optional<Bytes>> hdrs(p.headers.size());
    for (const std::string& h : path.headers) {
      const int idx = p.HeaderIndex(h);
      hdrs[static_cast<std::size_t>(idx)] = Bytes(p.headers[idx].ByteSize(), 0);
    }
    const auto set_field = [&](const FieldRef& ref, const Bytes& v) {
      const int idx = p.HeaderIndex(ref.header);
      auto& hdr = hdrs[static_cast<std::size_t>(idx)];
      if (!hdr) return false;
      const HeaderType& h = p.headers[static_cast<std::size_t>(idx)];
      InsertBits(*hdr, static_cast<std::size_t>(h.FieldOffset(ref.field)),
                 h.FindField(ref.field)->width, v);
      return true;
    };
    bool ok = true;
    std::size_t at = 0;
    for (const FieldRef& ref : table.key) {
      const std::size_t n = BytesForWidth(p.FindField(ref)->width);
      if (at + n > key.size()) {
        throw Error(ErrorCode::kInvalidArgument, "key too short for '" + table.name + "'");
      }
      ok = set_field(ref, Bytes(key.begin() + at, key.begin() + at + n)) && ok;
      at += n;
    }
    if (!ok) continue;
    for (std::size_t i = 0; i < path.states.size(); ++i) {
      const ParserState* s = p.parser.FindState(path.states[i]);
      if (!s->select) continue;
      const std::string next = i + 1 < path.states.size() ? path.states[i + 1] : kAccept;
      const std::uint32_t w = p.FindField(*s->select)->width;
      std::optional<Bytes> value;
      for (const Transition& t : s->cases) {
        if (t.next == next) {
          value = t.value;
          break;
        }
      }
      if (!value && s->default_next == next) {
        // Any value no case claims.
        for (std::uint64_t v = 0; v < (1ull << std::min<std::uint32_t>(w, 20)); ++v) {
          const Bytes cand = FromUint(v, w);
          bool taken = false;
          for (const Transition& t : s->cases) taken = taken || t.value == cand;
          if (!taken) {
            value = cand;
            break;
          }
        }
      }
      if (!value) {
        ok = false;
        break;
      }
      set_field(*s->select, *value);
    }
    if (!ok) continue;
    PacketHeaders packet{std::move(hdrs), {}};
    Bytes bytes;
    for (const std::string& h : path.headers) {
      const auto& v = packet.headers[static_cast<std::size_t>(p.HeaderIndex(h))];
      bytes.insert(bytes.end(), v->begin(), v->end());
    }
    if (bytes.size() < frame_bytes) bytes.resize(frame_bytes, 0);
    const ParseOutcome check = ParsePacket(p, bytes);
    if (check.accepted && BuildKey(p, table, check.packet) == key) return bytes;
  }
  throw Error(ErrorCode::kInvalidArgument,
              "no parser path yields key 0x" + ToHex(key) + " for table '" +
                  table.name + "'");
}

ScenarioResult RunScenario(const Scenario& s) {
  const ScenarioInputs in = LoadInputs(s);
  const PartitionPlan plan = Partition(in.program, in.topology, in.constraint);
  for (const auto& [table, policy] : s.policies) {
    if (plan.FindTable(table) == nullptr) {
      throw Error(ErrorCode::kUnresolvedReference, "cache_policy table '" + table + "'");
    }
  }
  ControlPlane cp(in.program, plan, s.policies);
  std::mt19937_64 rng(s.seed);

  for (const EntrySpec& e : s.entries) {
    LogicalTableView& v = cp.view(e.table);
    cp.Insert(e.table, v.ParseKey(e.key), v.ParseAction(e.action, e.args));
  }
  std::vector<Bytes> installed;
  if (s.synthetic_entries) InstallSynthetic(*s.synthetic_entries, in.program, cp, rng, installed);

  TrafficTrace trace;
  if (s.trace_path) trace = ParseTrace(ReadFile(*s.trace_path));
  if (s.synthetic_trace) trace = Synthesize(*s.synthetic_trace, in.program, cp, rng);

  Simulator sim(in.program, in.topology, plan, cp);
  sim.set_seed(s.seed);
  sim.Run(trace);

  const double line_rate =
      s.line_rate.pps ? *s.line_rate.pps
                      : LineRatePps(in.topology.front().network_bandwidth_bps,
                                    s.line_rate.frame_bytes, s.line_rate.overhead_bytes);
  ScenarioResult result;
  result.report = BuildReport(s.name, in.program, plan, sim.Stats(), line_rate);
  result.paths = sim.paths();
  return result;
}

}  // namespace hdp
