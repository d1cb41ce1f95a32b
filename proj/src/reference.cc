// Copyright 2026 The HDP Authors
// SPDX-License-Identifier: Apache-2.0

#include "hdp/reference.h"

namespace hdp {

ReferenceResult ExecuteReference(const Pipeline& p,
                                 std::span<const std::uint8_t> packet,
                                 std::uint16_t ingress_port,
                                 const TableState& tables,
                                 ExternState& externs) {
  ReferenceResult result;
  ParseOutcome parsed = ParsePacket(p, packet);
  if (!parsed.accepted) {
    result.verdict = Verdict::Drop();
    result.reject_reason = parsed.reject_reason;
    result.trace.push_back("reject: " + parsed.reject_reason);
    return result;
  }
  PacketContext ctx{std::move(parsed.packet), {}};
  ctx.md.ingress_port = ingress_port;
  const ExternHook count = [&](const std::string& name) { ++externs[name]; };

  for (const Stage& stage : p.stages) {
    switch (stage.kind) {
      case StageKind::kApply: {
        const MatchTable* t = p.FindTable(stage.ref);
        if (t == nullptr) break;
        const Bytes key = BuildKey(p, *t, ctx.packet);
        const ActionCall* call = &t->default_action;
        bool hit = false;
        if (auto ti = tables.find(t->name); ti != tables.end()) {
          if (auto e = ti->second.find(key); e != ti->second.end()) {
            call = &e->second;
            hit = true;
          }
        }
        result.trace.push_back(t->name + (hit ? ": hit " : ": miss ") +
                               call->action);
        RunAction(p, *call, ctx, count);
        break;
      }
      case StageKind::kCall:
        ++externs[stage.ref];
        result.trace.push_back("call " + stage.ref);
        break;
      case StageKind::kBridge:
        break;
    }
  }
  result.verdict = FinalVerdict(p, ctx);
  return result;
}

}  // namespace hdp
