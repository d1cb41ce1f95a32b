// Copyright 2026 The HDP Authors
// SPDX-License-Identifier: Apache-2.0

#include "hdp/error.h"

namespace hdp {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kSyntax: return "SyntaxError";
    case ErrorCode::kUnresolvedReference: return "UnresolvedReference";
    case ErrorCode::kInvariantViolation: return "InvariantViolation";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kIo: return "IoError";
    case ErrorCode::kDuplicateTarget: return "DuplicateTarget";
    case ErrorCode::kNetworkFacing: return "NetworkFacing";
    case ErrorCode::kDisconnected: return "Disconnected";
    case ErrorCode::kNotAChain: return "NotAChain";
    case ErrorCode::kUnsupportedExtern: return "UnsupportedExtern";
    case ErrorCode::kCapacityExceeded: return "CapacityExceeded";
    case ErrorCode::kUnmappablePin: return "UnmappablePin";
    case ErrorCode::kInfeasible: return "Infeasible";
    case ErrorCode::kBadMagic: return "BadMagic";
    case ErrorCode::kUnsupportedVersion: return "UnsupportedVersion";
    case ErrorCode::kTruncated: return "Truncated";
    case ErrorCode::kMalformedTlv: return "MalformedTlv";
    case ErrorCode::kReservedBitsSet: return "ReservedBitsSet";
    case ErrorCode::kDuplicateKey: return "DuplicateKey";
    case ErrorCode::kNotFound: return "NotFound";
    case ErrorCode::kUnknownExtern: return "UnknownExtern";
  }
  return "Unknown";
}

bool IsInfeasible(ErrorCode code) {
  return code == ErrorCode::kUnsupportedExtern ||
         code == ErrorCode::kCapacityExceeded ||
         code == ErrorCode::kUnmappablePin || code == ErrorCode::kInfeasible;
}

}  // namespace hdp
