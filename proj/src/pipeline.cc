// Copyright 2026 The HDP Authors
// SPDX-License-Identifier: Apache-2.0

#include "hdp/pipeline.h"

#include <algorithm>

namespace hdp {
namespace {

template <typename T>
const T* FindByName(const std::vector<T>& items, const std::string& name) {
  for (const T& item : items) {
    if (item.name == name) return &item;
  }
  return nullptr;
}

}  // namespace

std::uint32_t HeaderType::TotalBits() const {
  std::uint32_t total = 0;
  for (const FieldDef& f : fields) total += f.width;
  return total;
}

const FieldDef* HeaderType::FindField(const std::string& field) const {
  return FindByName(fields, field);
}

int HeaderType::FieldOffset(const std::string& field) const {
  int offset = 0;
  for (const FieldDef& f : fields) {
    if (f.name == field) return offset;
    offset += static_cast<int>(f.width);
  }
  return -1;
}

std::optional<FieldRef> FieldRef::Parse(const std::string& dotted) {
  const auto dot = dotted.find('.');
  if (dot == std::string::npos || dot == 0 || dot + 1 == dotted.size() ||
      dotted.find('.', dot + 1) != std::string::npos) {
    return std::nullopt;
  }
  return FieldRef{dotted.substr(0, dot), dotted.substr(dot + 1)};
}

const ParserState* ParserGraph::FindState(const std::string& name) const {
  return FindByName(states, name);
}

int ActionDef::ParamIndex(const std::string& param) const {
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (params[i].name == param) return static_cast<int>(i);
  }
  return -1;
}

std::vector<std::string> ActionDef::ExternCalls() const {
  std::vector<std::string> out;
  for (const Primitive& p : body) {
    if (p.op == PrimitiveOp::kExternCall) out.push_back(p.extern_name);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

const HeaderType* Pipeline::FindHeader(const std::string& name) const {
  return FindByName(headers, name);
}

int Pipeline::HeaderIndex(const std::string& name) const {
  for (std::size_t i = 0; i < headers.size(); ++i) {
    if (headers[i].name == name) return static_cast<int>(i);
  }
  return -1;
}

const ActionDef* Pipeline::FindAction(const std::string& name) const {
  return FindByName(actions, name);
}

const MatchTable* Pipeline::FindTable(const std::string& name) const {
  return FindByName(tables, name);
}

const ExternDecl* Pipeline::FindExtern(const std::string& name) const {
  return FindByName(externs, name);
}

const FieldDef* Pipeline::FindField(const FieldRef& ref) const {
  const HeaderType* h = FindHeader(ref.header);
  return h ? h->FindField(ref.field) : nullptr;
}

std::size_t Pipeline::KeyBytes(const MatchTable& table) const {
  std::size_t n = 0;
  for (const FieldRef& ref : table.key) {
    if (const FieldDef* f = FindField(ref)) n += BytesForWidth(f->width);
  }
  return n;
}

std::vector<std::string> Pipeline::TableExterns(const MatchTable& table) const {
  std::vector<std::string> out;
  auto collect = [&](const std::string& action_name) {
    if (const ActionDef* a = FindAction(action_name)) {
      for (auto& e : a->ExternCalls()) out.push_back(e);
    }
  };
  for (const std::string& a : table.actions) collect(a);
  collect(table.default_action.action);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::string_view ExternKindName(ExternKind kind) {
  switch (kind) {
    case ExternKind::kPacketCounter: return "packet_counter";
  }
  return "unknown";
}

std::optional<ExternKind> ParseExternKind(std::string_view name) {
  if (name == "packet_counter") return ExternKind::kPacketCounter;
  return std::nullopt;
}

}  // namespace hdp
