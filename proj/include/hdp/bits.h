// Copyright 2026 The HDP Authors
// SPDX-License-Identifier: Apache-2.0

// Byte-string helpers shared by the IR, the codec and the simulator. Field
// values are stored big-endian and right-aligned in ceil(width / 8) bytes.

#ifndef HDP_BITS_H_
#define HDP_BITS_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace hdp {

using Bytes = std::vector<std::uint8_t>;

inline std::size_t BytesForWidth(std::size_t width_bits) {
  return (width_bits + 7) / 8;
}

// Reads `width` bits starting at `bit_offset` (MSB-first numbering).
Bytes ExtractBits(std::span<const std::uint8_t> data, std::size_t bit_offset,
                  std::size_t width);

// Writes the low `width` bits of `value` at `bit_offset`.
void InsertBits(std::span<std::uint8_t> data, std::size_t bit_offset,
                std::size_t width, std::span<const std::uint8_t> value);

// True if `value` has no set bits above `width`.
bool FitsWidth(std::span<const std::uint8_t> value, std::size_t width);

// Normalizes `value` to exactly BytesForWidth(width) bytes. Throws
// InvalidArgument if significant bits would be lost.
Bytes Resize(std::span<const std::uint8_t> value, std::size_t width);

// Accepts lowercase/uppercase colon-hex ("aa:bb:cc"), "0x" hex, or decimal.
Bytes ParseValue(std::string_view text, std::size_t width);

// 48-bit values print as colon-hex, others as decimal when they fit 64 bits,
// otherwise as 0x-prefixed hex.
std::string FormatValue(std::span<const std::uint8_t> value,
                        std::size_t width);

std::string ToHex(std::span<const std::uint8_t> data);
Bytes FromHex(std::string_view hex);

std::uint64_t ToUint(std::span<const std::uint8_t> value);
Bytes FromUint(std::uint64_t value, std::size_t width);

std::string FormatMac(std::span<const std::uint8_t> value);

}  // namespace hdp

#endif  // HDP_BITS_H_
