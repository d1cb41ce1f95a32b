// Copyright 2026 The HDP Authors
// SPDX-License-Identifier: Apache-2.0

#include "random_program.h"

#include <algorithm>
#include <set>

#include "hdp/validate.h"

namespace hdp::testing {
namespace {

std::uint64_t Below(std::mt19937_64& rng, std::uint64_t n) { return rng() % n; }

bool Chance(std::mt19937_64& rng, int percent) {
  return Below(rng, 100) < static_cast<std::uint64_t>(percent);
}

// Values 0..3 keep key spaces tiny.
Bytes SmallValue(std::mt19937_64& rng, std::uint32_t width) {
  const std::uint64_t max = width >= 2 ? 4 : 2;
  return FromUint(Below(rng, max), width);
}

}  // namespace

Pipeline RandomProgram(std::mt19937_64& rng) {
  Pipeline p;
  p.name = "rand";
  const std::size_t nh = 1 + Below(rng, 3);
  static constexpr std::uint32_t kWidths[] = {4, 8, 8, 12, 16};
  for (std::size_t h = 0; h < nh; ++h) {
    HeaderType ht;
    ht.name = "h" + std::to_string(h);
    const std::size_t nf = 1 + Below(rng, 3);
    std::uint32_t total = 0;
    for (std::size_t f = 0; f < nf; ++f) {
      const std::uint32_t w = kWidths[Below(rng, std::size(kWidths))];
      ht.fields.push_back({"f" + std::to_string(f), w});
      total += w;
    }
    if (total % 8 != 0) ht.fields.push_back({"pad", 8 - total % 8});
    p.headers.push_back(std::move(ht));
  }

  // State i extracts header i and moves forward only, so the graph is a DAG.
  std::set<FieldRef> select_fields;
  p.parser.start = "s0";
  for (std::size_t i = 0; i < nh; ++i) {
    ParserState s;
    s.name = "s" + std::to_string(i);
    s.extract = p.headers[i].name;
    std::vector<std::string> targets{kAccept};
    for (std::size_t j = i + 1; j < nh; ++j) targets.push_back("s" + std::to_string(j));
    if (Chance(rng, 10)) targets.push_back(kReject);
    if (targets.size() > 1 && Chance(rng, 70)) {
      const FieldDef& f = p.headers[i].fields[Below(rng, p.headers[i].fields.size())];
      s.select = FieldRef{p.headers[i].name, f.name};
      select_fields.insert(*s.select);
      std::set<Bytes> used;
      const std::size_t ncases = 1 + Below(rng, 2);
      for (std::size_t c = 0; c < ncases; ++c) {
        Bytes v = SmallValue(rng, f.width);
        if (!used.insert(v).second) continue;
        s.cases.push_back({v, targets[Below(rng, targets.size())]});
      }
      s.default_next = targets[Below(rng, targets.size())];
    } else {
      s.default_next = i + 1 < nh && Chance(rng, 60) ? "s" + std::to_string(i + 1)
                                                     : std::string(kAccept);
    }
    p.parser.states.push_back(std::move(s));
  }

  // Headers present on every accepting path can be keys.
  std::vector<std::string> always;
  bool first = true;
  for (const ParserPath& path : EnumerateParserPaths(p)) {
    if (!path.accepted) continue;
    if (first) {
      always = path.headers;
      first = false;
    } else {
      std::erase_if(always, [&](const std::string& h) {
        return std::find(path.headers.begin(), path.headers.end(), h) ==
               path.headers.end();
      });
    }
  }
  if (first) always = {p.headers[0].name};  // nothing accepts; keys are moot

  std::vector<FieldRef> all_fields;
  std::vector<FieldRef> writable;
  for (const HeaderType& h : p.headers) {
    for (const FieldDef& f : h.fields) {
      all_fields.push_back({h.name, f.name});
      if (!select_fields.contains({h.name, f.name})) writable.push_back({h.name, f.name});
    }
  }

  const std::size_t nexterns = Below(rng, 3);
  for (std::size_t e = 0; e < nexterns; ++e) {
    p.externs.push_back({"ctr" + std::to_string(e), ExternKind::kPacketCounter});
  }

  const std::size_t nactions = 2 + Below(rng, 3);
  for (std::size_t a = 0; a < nactions; ++a) {
    ActionDef ad;
    ad.name = "a" + std::to_string(a);
    const std::size_t nparams = Below(rng, 3);
    for (std::size_t i = 0; i < nparams; ++i) {
      ad.params.push_back({"p" + std::to_string(i), kWidths[Below(rng, std::size(kWidths))]});
    }
    const std::size_t nprims = 1 + Below(rng, 4);
    for (std::size_t i = 0; i < nprims; ++i) {
      Primitive prim;
      const std::uint64_t kind = Below(rng, 6);
      const auto operand = [&](std::uint32_t width) {
        Operand op;
        std::vector<std::size_t> fits;
        for (std::size_t k = 0; k < ad.params.size(); ++k) {
          if (ad.params[k].width <= width) fits.push_back(k);
        }
        if (!fits.empty() && Chance(rng, 60)) {
          op.param = ad.params[fits[Below(rng, fits.size())]].name;
        } else {
          op.constant = SmallValue(rng, width);
        }
        return op;
      };
      if (kind <= 1 && !writable.empty()) {
        prim.op = PrimitiveOp::kSetField;
        prim.field = writable[Below(rng, writable.size())];
        prim.operand = operand(p.FindField(prim.field)->width);
      } else if (kind <= 3) {
        prim.op = PrimitiveOp::kSetEgressPort;
        prim.operand = operand(kMaxPortWidth);
      } else if (kind == 4) {
        prim.op = PrimitiveOp::kMarkDrop;
      } else if (!p.externs.empty()) {
        prim.op = PrimitiveOp::kExternCall;
        prim.extern_name = p.externs[Below(rng, p.externs.size())].name;
      } else {
        prim.op = PrimitiveOp::kNoOp;
      }
      ad.body.push_back(std::move(prim));
    }
    p.actions.push_back(std::move(ad));
  }

  std::vector<FieldRef> key_fields;
  for (const FieldRef& f : all_fields) {
    if (std::find(always.begin(), always.end(), f.header) != always.end()) {
      key_fields.push_back(f);
    }
  }
  const std::size_t ntables = 1 + Below(rng, 3);
  for (std::size_t t = 0; t < ntables; ++t) {
    MatchTable mt;
    mt.name = "t" + std::to_string(t);
    const std::size_t nkeys = 1 + Below(rng, 2);
    for (std::size_t k = 0; k < nkeys; ++k) {
      const FieldRef& f = key_fields[Below(rng, key_fields.size())];
      if (std::find(mt.key.begin(), mt.key.end(), f) == mt.key.end()) mt.key.push_back(f);
    }
    for (const ActionDef& a : p.actions) {
      if (mt.actions.empty() || Chance(rng, 60)) mt.actions.push_back(a.name);
    }
    mt.default_action = RandomCall(rng, p, mt.actions[Below(rng, mt.actions.size())]);
    mt.size_hint = static_cast<std::int64_t>(4 + Below(rng, 13));
    p.tables.push_back(std::move(mt));
  }

  for (const MatchTable& t : p.tables) {
    Stage s;
    s.kind = StageKind::kApply;
    s.name = "apply_" + t.name;
    s.ref = t.name;
    p.stages.push_back(std::move(s));
  }
  for (const ExternDecl& e : p.externs) {
    if (!Chance(rng, 40)) continue;
    Stage s;
    s.kind = StageKind::kCall;
    s.name = "call_" + e.name;
    s.ref = e.name;
    p.stages.insert(p.stages.begin() + static_cast<long>(Below(rng, p.stages.size() + 1)),
                    std::move(s));
  }
  for (const HeaderType& h : p.headers) p.deparser.push_back(h.name);
  return p;
}

Bytes RandomKey(std::mt19937_64& rng, const Pipeline& p, const MatchTable& t) {
  Bytes key;
  for (const FieldRef& ref : t.key) {
    const Bytes v = SmallValue(rng, p.FindField(ref)->width);
    key.insert(key.end(), v.begin(), v.end());
  }
  return key;
}

ActionCall RandomCall(std::mt19937_64& rng, const Pipeline& p, const std::string& action) {
  ActionCall call{action, {}};
  for (const ParamDef& param : p.FindAction(action)->params) {
    call.args.push_back(SmallValue(rng, param.width));
  }
  return call;
}

Topology RandomTopology(std::mt19937_64& rng) {
  const std::size_t n = 2 + Below(rng, 2);
  std::vector<TargetProfile> targets;
  static constexpr TargetKind kRear[] = {TargetKind::kFpga, TargetKind::kCpu,
                                         TargetKind::kNic};
  for (std::size_t i = 0; i < n; ++i) {
    const TargetKind kind = i == 0 ? TargetKind::kAsic : kRear[Below(rng, std::size(kRear))];
    TargetProfile t = DefaultProfile(kind, "t" + std::to_string(i));
    t.table_capacity = 16 + Below(rng, 48);
    t.per_packet_latency_ns = 100 + Below(rng, 1000);
    t.network_facing = i == 0;
    targets.push_back(std::move(t));
  }
  std::vector<Link> links;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    Link l = DefaultLink("t" + std::to_string(i), "t" + std::to_string(i + 1));
    l.latency_ns = Below(rng, 2000);
    links.push_back(std::move(l));
  }
  // Shuffle declaration order; the chain is derived from the links.
  std::shuffle(targets.begin(), targets.end(), rng);
  return Topology(std::move(targets), std::move(links));
}

nlohmann::json RandomConstraints(std::mt19937_64& rng, const Pipeline& p) {
  nlohmann::json tables = nlohmann::json::object();
  for (const MatchTable& t : p.tables) {
    const std::uint64_t mode = Below(rng, 3);
    if (mode == 1) {
      tables[t.name] = {{"mode", "static_split"},
                        {"asic_share", Below(rng, static_cast<std::uint64_t>(t.size_hint) + 1)}};
    } else if (mode == 2) {
      tables[t.name] = {{"mode", "asic_cache"}, {"cache_capacity", Below(rng, 6)}};
    }
  }
  return {{"tables", tables}};
}

TrafficTrace RandomTrace(std::mt19937_64& rng, const Pipeline& p, std::size_t packets) {
  const std::vector<ParserPath> paths = EnumerateParserPaths(p);
  TrafficTrace trace;
  for (std::size_t n = 0; n < packets; ++n) {
    Bytes bytes;
    if (paths.empty() || Chance(rng, 5)) {
      bytes.resize(Below(rng, 12));
      for (auto& b : bytes) b = static_cast<std::uint8_t>(Below(rng, 4));
    } else {
      const ParserPath& path = paths[Below(rng, paths.size())];
      for (std::size_t i = 0; i < path.headers.size(); ++i) {
        const HeaderType& h = *p.FindHeader(path.headers[i]);
        Bytes hdr(h.ByteSize(), 0);
        for (const FieldDef& f : h.fields) {
          InsertBits(hdr, static_cast<std::size_t>(h.FieldOffset(f.name)), f.width,
                     SmallValue(rng, f.width));
        }
        // Steer the select towards the path when a case leads there.
        const ParserState* s = p.parser.FindState(path.states[i]);
        if (s->select && Chance(rng, 80)) {
          const std::string next =
              i + 1 < path.states.size() ? path.states[i + 1] : std::string(kAccept);
          for (const Transition& t : s->cases) {
            if (t.next == next) {
              InsertBits(hdr, static_cast<std::size_t>(h.FieldOffset(s->select->field)),
                         p.FindField(*s->select)->width, t.value);
              break;
            }
          }
        }
        bytes.insert(bytes.end(), hdr.begin(), hdr.end());
      }
      const std::size_t payload = Below(rng, 6);
      for (std::size_t i = 0; i < payload; ++i) bytes.push_back(static_cast<std::uint8_t>(rng()));
      if (Chance(rng, 5) && !bytes.empty()) bytes.resize(Below(rng, bytes.size()));
    }
    trace.push_back({n * 10, static_cast<std::uint16_t>(Below(rng, 4)), std::move(bytes)});
  }
  return trace;
}

}  // namespace hdp::testing
