// Copyright 2026 The HDP Authors
// SPDX-License-Identifier: Apache-2.0

#include "hdp/exec.h"

#include <algorithm>

namespace hdp {
namespace {

struct FieldLocation {
  int header = -1;
  int offset = -1;
  std::uint32_t width = 0;
};

FieldLocation Locate(const Pipeline& p, const FieldRef& ref) {
  FieldLocation loc;
  loc.header = p.HeaderIndex(ref.header);
  if (loc.header < 0) return loc;
  const HeaderType& h = p.headers[static_cast<std::size_t>(loc.header)];
  loc.offset = h.FieldOffset(ref.field);
  if (const FieldDef* f = h.FindField(ref.field)) loc.width = f->width;
  return loc;
}

Bytes OperandValue(const ActionDef& a, const ActionCall& call,
                   const Operand& op, std::size_t width) {
  if (op.param) {
    const int idx = a.ParamIndex(*op.param);
    if (idx >= 0 && static_cast<std::size_t>(idx) < call.args.size()) {
      return Resize(call.args[static_cast<std::size_t>(idx)], width);
    }
    return Bytes(BytesForWidth(width), 0);
  }
  return Resize(op.constant, width);
}

}  // namespace

ParseOutcome ParsePacket(const Pipeline& p, std::span<const std::uint8_t> bytes) {
  ParseOutcome out;
  out.packet.headers.assign(p.headers.size(), std::nullopt);
  std::size_t cursor = 0;
  std::string state = p.parser.start;
  // The validator guarantees a DAG; the bound guards unvalidated input.
  for (std::size_t steps = 0; steps <= p.parser.states.size(); ++steps) {
    if (state == kAccept) {
      out.accepted = true;
      out.packet.payload.assign(bytes.begin() + static_cast<long>(cursor),
                                bytes.end());
      return out;
    }
    if (state == kReject) {
      out.reject_reason = "parser reject";
      return out;
    }
    const ParserState* s = p.parser.FindState(state);
    if (s == nullptr) {
      out.reject_reason = "unknown parser state " + state;
      return out;
    }
    if (!s->extract.empty()) {
      const int idx = p.HeaderIndex(s->extract);
      const std::size_t size = p.headers[static_cast<std::size_t>(idx)].ByteSize();
      if (bytes.size() - cursor < size) {
        out.reject_reason = "truncated " + s->extract + " header";
        return out;
      }
      out.packet.headers[static_cast<std::size_t>(idx)] =
          Bytes(bytes.begin() + static_cast<long>(cursor),
                bytes.begin() + static_cast<long>(cursor + size));
      cursor += size;
    }
    std::string next = s->default_next;
    if (s->select) {
      const FieldLocation loc = Locate(p, *s->select);
      const auto& hdr = out.packet.headers[static_cast<std::size_t>(loc.header)];
      if (hdr) {
        const Bytes v = ExtractBits(*hdr, static_cast<std::size_t>(loc.offset),
                                    loc.width);
        for (const Transition& t : s->cases) {
          if (t.value == v) {
            next = t.next;
            break;
          }
        }
      }
    }
    state = next;
  }
  out.reject_reason = "parser did not terminate";
  return out;
}

Bytes DeparsePacket(const Pipeline& p, const PacketHeaders& packet) {
  Bytes out;
  for (const std::string& name : p.deparser) {
    const int idx = p.HeaderIndex(name);
    if (idx < 0) continue;
    const auto& hdr = packet.headers[static_cast<std::size_t>(idx)];
    if (hdr) out.insert(out.end(), hdr->begin(), hdr->end());
  }
  out.insert(out.end(), packet.payload.begin(), packet.payload.end());
  return out;
}

Bytes BuildKey(const Pipeline& p, const MatchTable& table,
               const PacketHeaders& packet) {
  Bytes key;
  for (const FieldRef& ref : table.key) {
    const FieldLocation loc = Locate(p, ref);
    if (loc.header < 0 || loc.offset < 0) continue;
    const auto& hdr = packet.headers[static_cast<std::size_t>(loc.header)];
    const Bytes v = hdr ? ExtractBits(*hdr, static_cast<std::size_t>(loc.offset),
                                      loc.width)
                        : Bytes(BytesForWidth(loc.width), 0);
    key.insert(key.end(), v.begin(), v.end());
  }
  return key;
}

void RunAction(const Pipeline& p, const ActionCall& call, PacketContext& ctx,
               const ExternHook& on_extern) {
  const ActionDef* a = p.FindAction(call.action);
  if (a == nullptr) return;
  for (const Primitive& prim : a->body) {
    switch (prim.op) {
      case PrimitiveOp::kSetField: {
        const FieldLocation loc = Locate(p, prim.field);
        if (loc.header < 0 || loc.offset < 0) break;
        auto& hdr = ctx.packet.headers[static_cast<std::size_t>(loc.header)];
        if (!hdr) break;  // writes to invalid headers are ignored
        InsertBits(*hdr, static_cast<std::size_t>(loc.offset), loc.width,
                   OperandValue(*a, call, prim.operand, loc.width));
        break;
      }
      case PrimitiveOp::kSetEgressPort:
        ctx.md.egress_spec = static_cast<std::uint16_t>(
            ToUint(OperandValue(*a, call, prim.operand, kMaxPortWidth)));
        ctx.md.egress_written = true;
        ctx.md.drop = false;
        break;
      case PrimitiveOp::kMarkDrop:
        ctx.md.drop = true;
        break;
      case PrimitiveOp::kExternCall:
        if (on_extern) on_extern(prim.extern_name);
        break;
      case PrimitiveOp::kNoOp:
        break;
    }
  }
}

std::string Verdict::ToString() const {
  if (!is_forward()) return "Drop";
  return "Forward(" + std::to_string(port) + ", " + ToHex(packet) + ")";
}

Verdict FinalVerdict(const Pipeline& p, const PacketContext& ctx) {
  if (ctx.md.drop) return Verdict::Drop();
  return Verdict::Forward(ctx.md.egress_spec, DeparsePacket(p, ctx.packet));
}

}  // namespace hdp
