// Copyright 2026 The HDP Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef HDP_ERROR_H_
#define HDP_ERROR_H_

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace hdp {

enum class ErrorCode {
  kSyntax,
  kUnresolvedReference,
  kInvariantViolation,
  kInvalidArgument,
  kIo,
  // Topology.
  kDuplicateTarget,
  kNetworkFacing,
  kDisconnected,
  kNotAChain,
  // Partitioner.
  kUnsupportedExtern,
  kCapacityExceeded,
  kUnmappablePin,
  kInfeasible,
  // Interlink.
  kBadMagic,
  kUnsupportedVersion,
  kTruncated,
  kMalformedTlv,
  kReservedBitsSet,
  // Control plane.
  kDuplicateKey,
  kNotFound,
  kUnknownExtern,
};

std::string_view ErrorCodeName(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(ErrorCodeName(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

// Interlink decode failures carry the byte offset of the offending field.
class DecodeError : public Error {
 public:
  DecodeError(ErrorCode code, std::size_t offset, const std::string& message)
      : Error(code, message + " at offset " + std::to_string(offset)),
        offset_(offset) {}

  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

// True for errors that mean "the requested placement cannot be realized"
// as opposed to malformed input.
bool IsInfeasible(ErrorCode code);

}  // namespace hdp

#endif  // HDP_ERROR_H_
