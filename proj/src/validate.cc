// Copyright 2026 The HDP Authors
// SPDX-License-Identifier: Apache-2.0

#include "hdp/validate.h"

#include <algorithm>
#include <functional>
#include <map>
#include <set>

namespace hdp {
namespace {

constexpr std::size_t kMaxParserPaths = 4096;

class Validator {
 public:
  explicit Validator(const Pipeline& p) : p_(p) {}

  std::vector<Diagnostic> Run() {
    CheckHeaders();
    const bool parser_ok = CheckParser();
    if (parser_ok) paths_ = EnumerateParserPaths(p_);
    CheckParserSelects(parser_ok);
    CheckExterns();
    CheckActions();
    CheckTables(parser_ok);
    CheckStages();
    CheckDeparser(parser_ok);
    return std::move(diags_);
  }

 private:
  void Add(std::string rule, std::string location, std::string message) {
    diags_.push_back({std::move(rule), std::move(location), std::move(message)});
  }

  void Unresolved(const std::string& location, const std::string& what,
                  const std::string& symbol) {
    Add(kRuleUnresolved, location, "unknown " + what + " '" + symbol + "'");
  }

  void CheckHeaders() {
    std::set<std::string> names;
    for (const HeaderType& h : p_.headers) {
      const std::string loc = "headers[" + h.name + "]";
      if (!names.insert(h.name).second) {
        Add("header-name-unique", loc, "duplicate header '" + h.name + "'");
      }
      std::set<std::string> fields;
      for (const FieldDef& f : h.fields) {
        if (f.width == 0) {
          Add("field-width-positive", loc + "." + f.name, "zero-width field");
        }
        if (!fields.insert(f.name).second) {
          Add("field-name-unique", loc, "duplicate field '" + f.name + "'");
        }
      }
      if (h.fields.empty() || h.TotalBits() % 8 != 0) {
        Add("header-byte-aligned", loc,
            "total width " + std::to_string(h.TotalBits()) +
                " is not a positive multiple of 8");
      }
    }
  }

  bool IsTerminal(const std::string& next) const {
    return next == kAccept || next == kReject;
  }

  // Returns true when the graph is resolved and acyclic.
  bool CheckParser() {
    const ParserGraph& g = p_.parser;
    bool ok = true;
    std::set<std::string> names;
    for (const ParserState& s : g.states) {
      if (IsTerminal(s.name) || !names.insert(s.name).second) {
        Add("parser-state-unique", "parser.states[" + s.name + "]",
            "duplicate or reserved state name");
        ok = false;
      }
    }
    if (g.FindState(g.start) == nullptr) {
      Unresolved("parser.start", "parser state", g.start);
      return false;
    }
    for (const ParserState& s : g.states) {
      const std::string loc = "parser.states[" + s.name + "]";
      if (!s.extract.empty() && p_.FindHeader(s.extract) == nullptr) {
        Unresolved(loc, "header", s.extract);
      }
      std::vector<std::string> nexts{s.default_next};
      for (const Transition& t : s.cases) nexts.push_back(t.next);
      for (const std::string& n : nexts) {
        if (!IsTerminal(n) && g.FindState(n) == nullptr) {
          Unresolved(loc, "parser state", n);
          ok = false;
        }
      }
      if (!s.select && !s.cases.empty()) {
        Add("parser-select-missing", loc, "transitions without a select field");
      }
      std::set<Bytes> seen;
      for (const Transition& t : s.cases) {
        if (!seen.insert(t.value).second) {
          Add("parser-duplicate-case", loc,
              "duplicate select value 0x" + ToHex(t.value));
        }
      }
    }
    if (!ok) return false;

    // Colour DFS from every state so unreachable cycles are reported too.
    std::map<std::string, int> colour;
    bool cyclic = false;
    std::function<void(const ParserState&)> visit = [&](const ParserState& s) {
      colour[s.name] = 1;
      std::vector<std::string> nexts;
      for (const Transition& t : s.cases) nexts.push_back(t.next);
      nexts.push_back(s.default_next);
      for (const std::string& n : nexts) {
        if (IsTerminal(n)) continue;
        const int c = colour[n];
        if (c == 1) {
          cyclic = true;
        } else if (c == 0) {
          visit(*g.FindState(n));
        }
      }
      colour[s.name] = 2;
    };
    for (const ParserState& s : g.states) {
      if (colour[s.name] == 0) visit(s);
    }
    if (cyclic) {
      Add("parser-not-acyclic", "parser", "parser graph contains a cycle");
      return false;
    }
    return true;
  }

  void CheckParserSelects(bool parser_ok) {
    for (const ParserState& s : p_.parser.states) {
      if (!s.select) continue;
      const std::string loc = "parser.states[" + s.name + "].select";
      const FieldDef* f = p_.FindField(*s.select);
      if (f == nullptr) {
        Unresolved(loc, "field", s.select->ToString());
        continue;
      }
      for (const Transition& t : s.cases) {
        if (t.value.size() != BytesForWidth(f->width) ||
            !FitsWidth(t.value, f->width)) {
          Add("parser-case-width", loc,
              "case value does not match " + std::to_string(f->width) +
                  "-bit field");
        }
      }
      if (!parser_ok) continue;
      for (const ParserPath& path : paths_) {
        auto it = std::find(path.states.begin(), path.states.end(), s.name);
        if (it == path.states.end()) continue;
        const auto upto = static_cast<std::size_t>(it - path.states.begin());
        bool extracted = false;
        for (std::size_t i = 0; i <= upto; ++i) {
          const ParserState* ps = p_.parser.FindState(path.states[i]);
          if (ps && ps->extract == s.select->header) extracted = true;
        }
        if (!extracted) {
          Add("parser-select-not-extracted", loc,
              "select field " + s.select->ToString() +
                  " is not extracted on every path reaching this state");
          break;
        }
      }
    }
    if (parser_ok) {
      for (const ParserPath& path : paths_) {
        std::set<std::string> seen;
        for (const std::string& h : path.headers) {
          if (!seen.insert(h).second) {
            Add("parser-duplicate-extract", "parser",
                "header '" + h + "' extracted twice on one path");
            return;
          }
        }
      }
      if (paths_.size() >= kMaxParserPaths) {
        Add("parser-too-many-paths", "parser",
            "more than " + std::to_string(kMaxParserPaths) + " parser paths");
      }
    }
  }

  void CheckExterns() {
    std::set<std::string> names;
    for (const ExternDecl& e : p_.externs) {
      if (!names.insert(e.name).second) {
        Add("extern-name-unique", "externs[" + e.name + "]",
            "duplicate extern");
      }
    }
  }

  void CheckOperand(const ActionDef& a, const Operand& op, std::uint32_t width,
                    const std::string& loc) {
    if (op.param) {
      const int idx = a.ParamIndex(*op.param);
      if (idx < 0) {
        Unresolved(loc, "action parameter", *op.param);
      } else if (a.params[static_cast<std::size_t>(idx)].width > width) {
        Add("operand-width", loc,
            "parameter '" + *op.param + "' is wider than " +
                std::to_string(width) + " bits");
      }
    } else if (!FitsWidth(op.constant, width)) {
      Add("operand-width", loc,
          "constant does not fit in " + std::to_string(width) + " bits");
    }
  }

  void CheckActions() {
    std::set<std::string> names;
    for (const ActionDef& a : p_.actions) {
      const std::string loc = "actions[" + a.name + "]";
      if (!names.insert(a.name).second) {
        Add("action-name-unique", loc, "duplicate action");
      }
      std::set<std::string> params;
      for (const ParamDef& prm : a.params) {
        if (prm.width == 0) Add("param-width-positive", loc, prm.name);
        if (!params.insert(prm.name).second) {
          Add("param-name-unique", loc, "duplicate parameter " + prm.name);
        }
      }
      for (std::size_t i = 0; i < a.body.size(); ++i) {
        const Primitive& prim = a.body[i];
        const std::string ploc = loc + ".body[" + std::to_string(i) + "]";
        switch (prim.op) {
          case PrimitiveOp::kSetField: {
            const FieldDef* f = p_.FindField(prim.field);
            if (f == nullptr) {
              Unresolved(ploc, "field", prim.field.ToString());
            } else {
              CheckOperand(a, prim.operand, f->width, ploc);
            }
            break;
          }
          case PrimitiveOp::kSetEgressPort:
            CheckOperand(a, prim.operand, kMaxPortWidth, ploc);
            break;
          case PrimitiveOp::kExternCall:
            if (p_.FindExtern(prim.extern_name) == nullptr) {
              Unresolved(ploc, "extern", prim.extern_name);
            }
            break;
          case PrimitiveOp::kMarkDrop:
          case PrimitiveOp::kNoOp:
            break;
        }
      }
    }
  }

  void CheckCall(const ActionCall& call, const std::string& loc) {
    const ActionDef* a = p_.FindAction(call.action);
    if (a == nullptr) {
      Unresolved(loc, "action", call.action);
      return;
    }
    if (call.args.size() != a->params.size()) {
      Add("action-arity", loc,
          "action '" + call.action + "' takes " +
              std::to_string(a->params.size()) + " arguments");
      return;
    }
    for (std::size_t i = 0; i < call.args.size(); ++i) {
      if (call.args[i].size() != BytesForWidth(a->params[i].width) ||
          !FitsWidth(call.args[i], a->params[i].width)) {
        Add("action-arg-width", loc,
            "argument " + a->params[i].name + " does not fit its width");
      }
    }
  }

  void CheckTables(bool parser_ok) {
    std::set<std::string> names;
    for (const MatchTable& t : p_.tables) {
      const std::string loc = "tables[" + t.name + "]";
      if (!names.insert(t.name).second) {
        Add("table-name-unique", loc, "duplicate table");
      }
      if (t.size_hint < 0) Add("table-size-nonnegative", loc, "negative size");
      if (t.key.empty()) Add("table-key-empty", loc, "table has no key");
      for (const FieldRef& k : t.key) {
        if (p_.FindField(k) == nullptr) {
          Unresolved(loc + ".key", "field", k.ToString());
          continue;
        }
        if (!parser_ok) continue;
        for (const ParserPath& path : paths_) {
          if (!path.accepted) continue;
          if (std::find(path.headers.begin(), path.headers.end(), k.header) ==
              path.headers.end()) {
            Add("table-key-not-extractable", loc + ".key",
                "key field " + k.ToString() +
                    " is not extracted on every accepting parser path");
            break;
          }
        }
      }
      for (const std::string& a : t.actions) {
        if (p_.FindAction(a) == nullptr) Unresolved(loc, "action", a);
      }
      CheckCall(t.default_action, loc + ".default_action");
    }
  }

  void CheckStages() {
    std::set<std::string> names;
    for (std::size_t i = 0; i < p_.stages.size(); ++i) {
      const Stage& s = p_.stages[i];
      const std::string loc = "stages[" + std::to_string(i) + "]";
      if (s.kind == StageKind::kBridge) continue;
      if (!names.insert(s.name).second) {
        Add("stage-name-unique", loc, "duplicate stage name '" + s.name + "'");
      }
      if (s.kind == StageKind::kApply && p_.FindTable(s.ref) == nullptr) {
        Unresolved(loc, "table", s.ref);
      }
      if (s.kind == StageKind::kCall && p_.FindExtern(s.ref) == nullptr) {
        Unresolved(loc, "extern", s.ref);
      }
    }
  }

  void CheckDeparser(bool parser_ok) {
    std::set<std::string> seen;
    for (const std::string& h : p_.deparser) {
      if (p_.FindHeader(h) == nullptr) Unresolved("deparser", "header", h);
      if (!seen.insert(h).second) {
        Add("deparser-duplicate", "deparser", "header '" + h + "' emitted twice");
      }
    }
    if (!parser_ok) return;
    // Every extracted header must be re-emitted in parse order.
    for (const ParserPath& path : paths_) {
      if (!path.accepted) continue;
      std::size_t pos = 0;
      for (const std::string& h : path.headers) {
        auto it = std::find(p_.deparser.begin() + static_cast<long>(pos),
                            p_.deparser.end(), h);
        if (it == p_.deparser.end()) {
          Add("deparser-order", "deparser",
              "header '" + h + "' is extracted but not emitted in parse order");
          return;
        }
        pos = static_cast<std::size_t>(it - p_.deparser.begin()) + 1;
      }
    }
  }

  const Pipeline& p_;
  std::vector<ParserPath> paths_;
  std::vector<Diagnostic> diags_;
};

}  // namespace

std::vector<Diagnostic> ValidateProgram(const Pipeline& program) {
  return Validator(program).Run();
}

std::vector<ParserPath> EnumerateParserPaths(const Pipeline& program) {
  const ParserGraph& g = program.parser;
  std::vector<ParserPath> out;
  if (g.FindState(g.start) == nullptr) return out;
  ParserPath current;
  bool aborted = false;
  std::set<std::string> on_stack;
  std::function<void(const std::string&)> walk = [&](const std::string& name) {
    if (aborted) return;
    if (name == kAccept || name == kReject) {
      current.accepted = name == kAccept;
      out.push_back(current);
      if (out.size() >= kMaxParserPaths) aborted = true;
      return;
    }
    const ParserState* s = g.FindState(name);
    if (s == nullptr || !on_stack.insert(name).second) {
      aborted = true;  // unresolved or cyclic
      return;
    }
    current.states.push_back(name);
    if (!s->extract.empty()) current.headers.push_back(s->extract);
    for (const Transition& t : s->cases) walk(t.next);
    walk(s->default_next);
    if (!s->extract.empty()) current.headers.pop_back();
    current.states.pop_back();
    on_stack.erase(name);
  };
  walk(g.start);
  if (aborted && out.size() < kMaxParserPaths) return {};
  return out;
}

std::vector<FieldRef> ParserSelectFields(const Pipeline& program) {
  std::vector<FieldRef> out;
  for (const ParserState& s : program.parser.states) {
    if (s.select) out.push_back(*s.select);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace hdp
