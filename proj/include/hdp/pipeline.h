// Copyright 2026 The HDP Authors
// SPDX-License-Identifier: Apache-2.0

// In-memory form of a match-action program: headers, a parser DAG, actions,
// exact-match tables, packet-counter externs and a linear stage list.
// Values are immutable once loaded and may be shared freely across threads.

#ifndef HDP_PIPELINE_H_
#define HDP_PIPELINE_H_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hdp/bits.h"

namespace hdp {

inline constexpr char kAccept[] = "accept";
inline constexpr char kReject[] = "reject";
inline constexpr std::uint32_t kMaxPortWidth = 16;

struct FieldDef {
  std::string name;
  std::uint32_t width = 0;

  bool operator==(const FieldDef&) const = default;
};

struct HeaderType {
  std::string name;
  std::vector<FieldDef> fields;

  std::uint32_t TotalBits() const;
  std::uint32_t ByteSize() const { return TotalBits() / 8; }
  const FieldDef* FindField(const std::string& field) const;
  // Bit offset of `field` inside the header; -1 if absent.
  int FieldOffset(const std::string& field) const;

  bool operator==(const HeaderType&) const = default;
};

// "header.field"
struct FieldRef {
  std::string header;
  std::string field;

  std::string ToString() const { return header + "." + field; }
  static std::optional<FieldRef> Parse(const std::string& dotted);

  bool operator==(const FieldRef&) const = default;
  auto operator<=>(const FieldRef&) const = default;
};

struct Transition {
  Bytes value;
  std::string next;

  bool operator==(const Transition&) const = default;
};

struct ParserState {
  std::string name;
  std::string extract;  // header name; empty extracts nothing
  std::optional<FieldRef> select;
  std::vector<Transition> cases;
  std::string default_next = kAccept;

  bool operator==(const ParserState&) const = default;
};

struct ParserGraph {
  std::string start;
  std::vector<ParserState> states;

  const ParserState* FindState(const std::string& name) const;

  bool operator==(const ParserGraph&) const = default;
};

enum class PrimitiveOp { kSetField, kSetEgressPort, kMarkDrop, kExternCall, kNoOp };

// Either an action parameter or a literal.
struct Operand {
  std::optional<std::string> param;
  Bytes constant;

  bool operator==(const Operand&) const = default;
};

struct Primitive {
  PrimitiveOp op = PrimitiveOp::kNoOp;
  FieldRef field;           // kSetField
  Operand operand;          // kSetField, kSetEgressPort
  std::string extern_name;  // kExternCall

  bool operator==(const Primitive&) const = default;
};

struct ParamDef {
  std::string name;
  std::uint32_t width = 0;

  bool operator==(const ParamDef&) const = default;
};

struct ActionDef {
  std::string name;
  std::vector<ParamDef> params;
  std::vector<Primitive> body;

  int ParamIndex(const std::string& param) const;
  std::vector<std::string> ExternCalls() const;

  bool operator==(const ActionDef&) const = default;
};

// An action bound to its arguments, as stored in a table entry.
struct ActionCall {
  std::string action;
  std::vector<Bytes> args;

  bool operator==(const ActionCall&) const = default;
};

enum class PartitionRole { kAuthoritative, kCache };

struct MatchTable {
  std::string name;
  std::vector<FieldRef> key;
  std::vector<std::string> actions;
  ActionCall default_action;
  std::int64_t size_hint = 0;
  // Only set on partitions emitted for a single target.
  std::optional<PartitionRole> role;

  bool operator==(const MatchTable&) const = default;
};

enum class ExternKind { kPacketCounter };

struct ExternDecl {
  std::string name;
  ExternKind kind = ExternKind::kPacketCounter;

  bool operator==(const ExternDecl&) const = default;
};

enum class StageKind { kApply, kCall, kBridge };
enum class BridgeDirection { kEncap, kDecap };

struct BridgeSpec {
  BridgeDirection direction = BridgeDirection::kEncap;
  std::uint8_t stage_id = 0;
  std::string peer;

  bool operator==(const BridgeSpec&) const = default;
};

struct Stage {
  StageKind kind = StageKind::kApply;
  std::string name;
  std::string ref;  // table (kApply) or extern (kCall)
  BridgeSpec bridge;

  bool operator==(const Stage&) const = default;
};

struct Pipeline {
  std::string name;
  std::vector<HeaderType> headers;
  ParserGraph parser;
  std::vector<ActionDef> actions;
  std::vector<MatchTable> tables;
  std::vector<ExternDecl> externs;
  std::vector<Stage> stages;
  std::vector<std::string> deparser;

  const HeaderType* FindHeader(const std::string& name) const;
  int HeaderIndex(const std::string& name) const;
  const ActionDef* FindAction(const std::string& name) const;
  const MatchTable* FindTable(const std::string& name) const;
  const ExternDecl* FindExtern(const std::string& name) const;
  const FieldDef* FindField(const FieldRef& ref) const;

  // Key width in bytes (each key field padded to whole bytes).
  std::size_t KeyBytes(const MatchTable& table) const;
  // Externs called by any action of `table`, sorted and de-duplicated.
  std::vector<std::string> TableExterns(const MatchTable& table) const;

  bool operator==(const Pipeline&) const = default;
};

// Entries keyed by the concatenated key bytes.
using TableEntries = std::map<Bytes, ActionCall>;
using TableState = std::map<std::string, TableEntries>;
using ExternState = std::map<std::string, std::uint64_t>;

std::string_view ExternKindName(ExternKind kind);
std::optional<ExternKind> ParseExternKind(std::string_view name);

}  // namespace hdp

#endif  // HDP_PIPELINE_H_
