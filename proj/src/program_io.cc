// Copyright 2026 The HDP Authors
// SPDX-License-Identifier: Apache-2.0

#include "hdp/program_io.h"

#include <fstream>
#include <set>
#include <sstream>

#include "hdp/error.h"
#include "hdp/validate.h"

namespace hdp {
namespace {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

[[noreturn]] void Fail(const std::string& path, const std::string& what) {
  throw Error(ErrorCode::kSyntax, path + ": " + what);
}

void CheckKeys(const json& obj, const std::string& path,
               std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) Fail(path, "expected an object");
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || it.key() == a;
    if (!ok) Fail(path, "unknown key '" + it.key() + "'");
  }
}

const json& Require(const json& obj, const char* key, const std::string& path) {
  auto it = obj.find(key);
  if (it == obj.end()) Fail(path, std::string("missing key '") + key + "'");
  return *it;
}

std::string GetString(const json& obj, const char* key, const std::string& path) {
  const json& v = Require(obj, key, path);
  if (!v.is_string()) Fail(path + "." + key, "expected a string");
  return v.get<std::string>();
}

std::uint32_t GetWidth(const json& obj, const std::string& path) {
  const json& v = Require(obj, "width", path);
  if (!v.is_number_integer() || v.get<std::int64_t>() < 1 ||
      v.get<std::int64_t>() > 4096) {
    Fail(path + ".width", "width must be an integer in [1, 4096]");
  }
  return v.get<std::uint32_t>();
}

const json& GetArray(const json& obj, const char* key, const std::string& path) {
  const json& v = Require(obj, key, path);
  if (!v.is_array()) Fail(path + "." + key, "expected an array");
  return v;
}

Bytes ValueOf(const json& v, std::size_t width, const std::string& path) {
  try {
    if (v.is_number_unsigned() || v.is_number_integer()) {
      if (v.is_number_integer() && v.get<std::int64_t>() < 0) {
        Fail(path, "negative value");
      }
      return FromUint(v.get<std::uint64_t>(), width);
    }
    if (v.is_string()) return ParseValue(v.get<std::string>(), width);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kSyntax) throw;
    Fail(path, e.what());
  }
  Fail(path, "expected an integer or a string value");
}

ojson ValueJson(const Bytes& v, std::size_t width) {
  if (width != 48 && width <= 64) return ToUint(Resize(v, width));
  return FormatValue(v, width);
}

FieldRef GetFieldRef(const json& v, const std::string& path) {
  if (!v.is_string()) Fail(path, "expected \"header.field\"");
  auto ref = FieldRef::Parse(v.get<std::string>());
  if (!ref) Fail(path, "malformed field reference '" + v.get<std::string>() + "'");
  return *ref;
}

const FieldDef& ResolveField(const Pipeline& p, const FieldRef& ref,
                             const std::string& path) {
  const FieldDef* f = p.FindField(ref);
  if (f == nullptr) {
    throw Error(ErrorCode::kUnresolvedReference,
                path + ": unknown field '" + ref.ToString() + "'");
  }
  return *f;
}

void ParseHeaders(const json& doc, Pipeline& p) {
  const json& arr = GetArray(doc, "headers", "$");
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const std::string path = "$.headers[" + std::to_string(i) + "]";
    CheckKeys(arr[i], path, {"name", "fields"});
    HeaderType h;
    h.name = GetString(arr[i], "name", path);
    const json& fields = GetArray(arr[i], "fields", path);
    for (std::size_t j = 0; j < fields.size(); ++j) {
      const std::string fpath = path + ".fields[" + std::to_string(j) + "]";
      CheckKeys(fields[j], fpath, {"name", "width"});
      h.fields.push_back({GetString(fields[j], "name", fpath),
                          GetWidth(fields[j], fpath)});
    }
    p.headers.push_back(std::move(h));
  }
}

void ParseParser(const json& doc, Pipeline& p) {
  const json& parser = Require(doc, "parser", "$");
  CheckKeys(parser, "$.parser", {"start", "states"});
  p.parser.start = GetString(parser, "start", "$.parser");
  const json& states = GetArray(parser, "states", "$.parser");
  for (std::size_t i = 0; i < states.size(); ++i) {
    const std::string path = "$.parser.states[" + std::to_string(i) + "]";
    const json& js = states[i];
    CheckKeys(js, path, {"name", "extract", "select", "transitions", "default"});
    ParserState s;
    s.name = GetString(js, "name", path);
    if (js.contains("extract")) s.extract = GetString(js, "extract", path);
    if (js.contains("default")) s.default_next = GetString(js, "default", path);
    if (js.contains("select")) {
      s.select = GetFieldRef(js["select"], path + ".select");
    }
    if (js.contains("transitions")) {
      if (!s.select) Fail(path, "transitions require a select field");
      const FieldDef& f = ResolveField(p, *s.select, path + ".select");
      const json& ts = GetArray(js, "transitions", path);
      for (std::size_t j = 0; j < ts.size(); ++j) {
        const std::string tpath = path + ".transitions[" + std::to_string(j) + "]";
        CheckKeys(ts[j], tpath, {"value", "next"});
        s.cases.push_back({ValueOf(Require(ts[j], "value", tpath), f.width,
                                   tpath + ".value"),
                           GetString(ts[j], "next", tpath)});
      }
    }
    p.parser.states.push_back(std::move(s));
  }
}

std::optional<ExternKind> KindOf(const json& v, const std::string& path) {
  if (!v.is_string()) Fail(path, "expected a string");
  return ParseExternKind(v.get<std::string>());
}

void ParseExterns(const json& doc, Pipeline& p) {
  const json& arr = GetArray(doc, "externs", "$");
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const std::string path = "$.externs[" + std::to_string(i) + "]";
    CheckKeys(arr[i], path, {"name", "kind"});
    ExternDecl e;
    e.name = GetString(arr[i], "name", path);
    auto kind = KindOf(Require(arr[i], "kind", path), path + ".kind");
    if (!kind) Fail(path + ".kind", "unsupported extern kind");
    e.kind = *kind;
    p.externs.push_back(std::move(e));
  }
}

Operand ParseOperand(const json& js, std::size_t width,
                     const std::string& path) {
  Operand op;
  const bool has_param = js.contains("param");
  const bool has_value = js.contains("value");
  if (has_param == has_value) Fail(path, "exactly one of 'param' or 'value'");
  if (has_param) {
    op.param = GetString(js, "param", path);
  } else {
    op.constant = ValueOf(js["value"], width, path + ".value");
  }
  return op;
}

void ParseActions(const json& doc, Pipeline& p) {
  const json& arr = GetArray(doc, "actions", "$");
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const std::string path = "$.actions[" + std::to_string(i) + "]";
    CheckKeys(arr[i], path, {"name", "params", "body"});
    ActionDef a;
    a.name = GetString(arr[i], "name", path);
    if (arr[i].contains("params")) {
      const json& params = GetArray(arr[i], "params", path);
      for (std::size_t j = 0; j < params.size(); ++j) {
        const std::string ppath = path + ".params[" + std::to_string(j) + "]";
        CheckKeys(params[j], ppath, {"name", "width"});
        a.params.push_back(
            {GetString(params[j], "name", ppath), GetWidth(params[j], ppath)});
      }
    }
    const json& body = GetArray(arr[i], "body", path);
    for (std::size_t j = 0; j < body.size(); ++j) {
      const std::string bpath = path + ".body[" + std::to_string(j) + "]";
      const json& jp = body[j];
      const std::string op = GetString(jp, "op", bpath);
      Primitive prim;
      if (op == "set_field") {
        CheckKeys(jp, bpath, {"op", "field", "param", "value"});
        prim.op = PrimitiveOp::kSetField;
        prim.field = GetFieldRef(Require(jp, "field", bpath), bpath + ".field");
        std::size_t width = 0;
        if (jp.contains("value")) {
          width = ResolveField(p, prim.field, bpath + ".field").width;
        }
        prim.operand = ParseOperand(jp, width, bpath);
      } else if (op == "set_egress_port") {
        CheckKeys(jp, bpath, {"op", "param", "value"});
        prim.op = PrimitiveOp::kSetEgressPort;
        prim.operand = ParseOperand(jp, kMaxPortWidth, bpath);
      } else if (op == "mark_drop") {
        CheckKeys(jp, bpath, {"op"});
        prim.op = PrimitiveOp::kMarkDrop;
      } else if (op == "extern_call") {
        CheckKeys(jp, bpath, {"op", "extern"});
        prim.op = PrimitiveOp::kExternCall;
        prim.extern_name = GetString(jp, "extern", bpath);
      } else if (op == "no_op") {
        CheckKeys(jp, bpath, {"op"});
        prim.op = PrimitiveOp::kNoOp;
      } else {
        Fail(bpath + ".op", "unknown primitive '" + op + "'");
      }
      a.body.push_back(std::move(prim));
    }
    p.actions.push_back(std::move(a));
  }
}

ActionCall ParseActionCall(const json& js, const Pipeline& p,
                           const std::string& path) {
  CheckKeys(js, path, {"action", "args"});
  ActionCall call;
  call.action = GetString(js, "action", path);
  const ActionDef* a = p.FindAction(call.action);
  if (a == nullptr) {
    throw Error(ErrorCode::kUnresolvedReference,
                path + ": unknown action '" + call.action + "'");
  }
  if (js.contains("args")) {
    const json& args = GetArray(js, "args", path);
    if (args.size() != a->params.size()) {
      Fail(path + ".args", "action '" + a->name + "' takes " +
                               std::to_string(a->params.size()) + " arguments");
    }
    for (std::size_t i = 0; i < args.size(); ++i) {
      call.args.push_back(ValueOf(args[i], a->params[i].width,
                                  path + ".args[" + std::to_string(i) + "]"));
    }
  } else if (!a->params.empty()) {
    Fail(path, "missing 'args'");
  }
  return call;
}

void ParseTables(const json& doc, Pipeline& p) {
  const json& arr = GetArray(doc, "tables", "$");
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const std::string path = "$.tables[" + std::to_string(i) + "]";
    CheckKeys(arr[i], path,
              {"name", "key", "actions", "default_action", "size", "role"});
    MatchTable t;
    t.name = GetString(arr[i], "name", path);
    const json& key = GetArray(arr[i], "key", path);
    for (std::size_t j = 0; j < key.size(); ++j) {
      t.key.push_back(GetFieldRef(key[j], path + ".key[" + std::to_string(j) + "]"));
    }
    const json& actions = GetArray(arr[i], "actions", path);
    for (const json& a : actions) {
      if (!a.is_string()) Fail(path + ".actions", "expected action names");
      t.actions.push_back(a.get<std::string>());
    }
    t.default_action = ParseActionCall(Require(arr[i], "default_action", path),
                                       p, path + ".default_action");
    const json& size = Require(arr[i], "size", path);
    if (!size.is_number_integer() || size.get<std::int64_t>() < 0) {
      Fail(path + ".size", "size must be a non-negative integer");
    }
    t.size_hint = size.get<std::int64_t>();
    if (arr[i].contains("role")) {
      const std::string role = GetString(arr[i], "role", path);
      if (role == "authoritative") {
        t.role = PartitionRole::kAuthoritative;
      } else if (role == "cache") {
        t.role = PartitionRole::kCache;
      } else {
        Fail(path + ".role", "expected 'authoritative' or 'cache'");
      }
    }
    p.tables.push_back(std::move(t));
  }
}

void ParseStages(const json& doc, Pipeline& p) {
  const json& arr = GetArray(doc, "stages", "$");
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const std::string path = "$.stages[" + std::to_string(i) + "]";
    const json& js = arr[i];
    Stage s;
    if (js.contains("apply")) {
      CheckKeys(js, path, {"apply", "name"});
      s.kind = StageKind::kApply;
      s.ref = GetString(js, "apply", path);
    } else if (js.contains("call")) {
      CheckKeys(js, path, {"call", "name"});
      s.kind = StageKind::kCall;
      s.ref = GetString(js, "call", path);
    } else if (js.contains("bridge")) {
      CheckKeys(js, path, {"bridge", "stage_id", "peer"});
      s.kind = StageKind::kBridge;
      const std::string dir = GetString(js, "bridge", path);
      if (dir == "encap") {
        s.bridge.direction = BridgeDirection::kEncap;
      } else if (dir == "decap") {
        s.bridge.direction = BridgeDirection::kDecap;
      } else {
        Fail(path + ".bridge", "expected 'encap' or 'decap'");
      }
      const json& id = Require(js, "stage_id", path);
      if (!id.is_number_integer() || id.get<std::int64_t>() < 0 ||
          id.get<std::int64_t>() > 255) {
        Fail(path + ".stage_id", "stage_id must be in [0, 255]");
      }
      s.bridge.stage_id = id.get<std::uint8_t>();
      s.bridge.peer = GetString(js, "peer", path);
    } else {
      Fail(path, "expected one of 'apply', 'call', 'bridge'");
    }
    if (s.kind != StageKind::kBridge) {
      s.name = js.contains("name") ? GetString(js, "name", path) : s.ref;
    }
    p.stages.push_back(std::move(s));
  }
}

}  // namespace

Pipeline ParseProgram(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kSyntax, "byte " + std::to_string(e.byte) + ": " +
                                        e.what());
  }
  CheckKeys(doc, "$", {"name", "headers", "parser", "actions", "tables",
                       "externs", "stages", "deparser"});
  Pipeline p;
  if (doc.contains("name")) p.name = GetString(doc, "name", "$");
  ParseHeaders(doc, p);
  ParseParser(doc, p);
  if (doc.contains("externs")) ParseExterns(doc, p);
  if (doc.contains("actions")) ParseActions(doc, p);
  if (doc.contains("tables")) ParseTables(doc, p);
  ParseStages(doc, p);
  for (const json& h : GetArray(doc, "deparser", "$")) {
    if (!h.is_string()) Fail("$.deparser", "expected header names");
    p.deparser.push_back(h.get<std::string>());
  }
  return p;
}

Pipeline LoadProgram(std::string_view text) {
  Pipeline p = ParseProgram(text);
  const auto diags = ValidateProgram(p);
  for (const Diagnostic& d : diags) {
    if (d.rule == kRuleUnresolved) {
      throw Error(ErrorCode::kUnresolvedReference,
                  d.location + ": " + d.message);
    }
  }
  if (!diags.empty()) {
    throw Error(ErrorCode::kInvariantViolation,
                diags.front().rule + " at " + diags.front().location + ": " +
                    diags.front().message);
  }
  return p;
}

nlohmann::ordered_json ProgramToJson(const Pipeline& p) {
  ojson doc;
  if (!p.name.empty()) doc["name"] = p.name;
  ojson headers = ojson::array();
  for (const HeaderType& h : p.headers) {
    ojson fields = ojson::array();
    for (const FieldDef& f : h.fields) {
      fields.push_back({{"name", f.name}, {"width", f.width}});
    }
    headers.push_back({{"name", h.name}, {"fields", fields}});
  }
  doc["headers"] = headers;

  ojson states = ojson::array();
  for (const ParserState& s : p.parser.states) {
    ojson js;
    js["name"] = s.name;
    if (!s.extract.empty()) js["extract"] = s.extract;
    if (s.select) {
      js["select"] = s.select->ToString();
      const FieldDef* f = p.FindField(*s.select);
      if (!s.cases.empty()) {
        ojson ts = ojson::array();
        for (const Transition& t : s.cases) {
          ts.push_back({{"value", f ? ValueJson(t.value, f->width)
                                    : ojson("0x" + ToHex(t.value))},
                        {"next", t.next}});
        }
        js["transitions"] = ts;
      }
    }
    js["default"] = s.default_next;
    states.push_back(js);
  }
  doc["parser"] = {{"start", p.parser.start}, {"states", states}};

  ojson externs = ojson::array();
  for (const ExternDecl& e : p.externs) {
    externs.push_back({{"name", e.name}, {"kind", ExternKindName(e.kind)}});
  }
  doc["externs"] = externs;

  ojson actions = ojson::array();
  for (const ActionDef& a : p.actions) {
    ojson ja;
    ja["name"] = a.name;
    ojson params = ojson::array();
    for (const ParamDef& prm : a.params) {
      params.push_back({{"name", prm.name}, {"width", prm.width}});
    }
    ja["params"] = params;
    ojson body = ojson::array();
    for (const Primitive& prim : a.body) {
      ojson jp;
      auto operand = [&](std::size_t width) {
        if (prim.operand.param) {
          jp["param"] = *prim.operand.param;
        } else {
          jp["value"] = ValueJson(prim.operand.constant, width);
        }
      };
      switch (prim.op) {
        case PrimitiveOp::kSetField: {
          jp["op"] = "set_field";
          jp["field"] = prim.field.ToString();
          const FieldDef* f = p.FindField(prim.field);
          operand(f ? f->width : prim.operand.constant.size() * 8);
          break;
        }
        case PrimitiveOp::kSetEgressPort:
          jp["op"] = "set_egress_port";
          operand(kMaxPortWidth);
          break;
        case PrimitiveOp::kMarkDrop: jp["op"] = "mark_drop"; break;
        case PrimitiveOp::kExternCall:
          jp["op"] = "extern_call";
          jp["extern"] = prim.extern_name;
          break;
        case PrimitiveOp::kNoOp: jp["op"] = "no_op"; break;
      }
      body.push_back(jp);
    }
    ja["body"] = body;
    actions.push_back(ja);
  }
  doc["actions"] = actions;

  ojson tables = ojson::array();
  for (const MatchTable& t : p.tables) {
    ojson jt;
    jt["name"] = t.name;
    ojson key = ojson::array();
    for (const FieldRef& k : t.key) key.push_back(k.ToString());
    jt["key"] = key;
    jt["actions"] = t.actions;
    ojson def;
    def["action"] = t.default_action.action;
    ojson args = ojson::array();
    const ActionDef* a = p.FindAction(t.default_action.action);
    for (std::size_t i = 0; i < t.default_action.args.size(); ++i) {
      const std::size_t w = a && i < a->params.size()
                                ? a->params[i].width
                                : t.default_action.args[i].size() * 8;
      args.push_back(ValueJson(t.default_action.args[i], w));
    }
    def["args"] = args;
    jt["default_action"] = def;
    jt["size"] = t.size_hint;
    if (t.role) {
      jt["role"] = *t.role == PartitionRole::kCache ? "cache" : "authoritative";
    }
    tables.push_back(jt);
  }
  doc["tables"] = tables;

  ojson stages = ojson::array();
  for (const Stage& s : p.stages) {
    ojson js;
    switch (s.kind) {
      case StageKind::kApply: js["apply"] = s.ref; break;
      case StageKind::kCall: js["call"] = s.ref; break;
      case StageKind::kBridge:
        js["bridge"] =
            s.bridge.direction == BridgeDirection::kEncap ? "encap" : "decap";
        js["stage_id"] = s.bridge.stage_id;
        js["peer"] = s.bridge.peer;
        break;
    }
    if (s.kind != StageKind::kBridge && s.name != s.ref) js["name"] = s.name;
    stages.push_back(js);
  }
  doc["stages"] = stages;
  doc["deparser"] = p.deparser;
  return doc;
}

std::string SerializeProgram(const Pipeline& program) {
  return ProgramToJson(program).dump(2) + "\n";
}

std::string ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace hdp
