// Copyright 2026 The HDP Authors
// SPDX-License-Identifier: Apache-2.0

#include "hdp/bits.h"

#include <algorithm>

#include "hdp/error.h"

namespace hdp {
namespace {

int HexDigit(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

bool GetBit(std::span<const std::uint8_t> data, std::size_t bit) {
  return (data[bit / 8] >> (7 - bit % 8)) & 1;
}

void SetBit(std::span<std::uint8_t> data, std::size_t bit, bool on) {
  const std::uint8_t mask = static_cast<std::uint8_t>(1u << (7 - bit % 8));
  if (on) {
    data[bit / 8] |= mask;
  } else {
    data[bit / 8] &= static_cast<std::uint8_t>(~mask);
  }
}

// Big-endian multiply-accumulate on an arbitrary-length byte string.
bool MulAdd(Bytes& acc, unsigned mul, unsigned add) {
  unsigned carry = add;
  for (auto it = acc.rbegin(); it != acc.rend(); ++it) {
    unsigned v = *it * mul + carry;
    *it = static_cast<std::uint8_t>(v & 0xff);
    carry = v >> 8;
  }
  return carry == 0;
}

}  // namespace

Bytes ExtractBits(std::span<const std::uint8_t> data, std::size_t bit_offset,
                  std::size_t width) {
  Bytes out(BytesForWidth(width), 0);
  const std::size_t pad = out.size() * 8 - width;
  if (bit_offset % 8 == 0 && pad == 0) {
    std::copy_n(data.begin() + bit_offset / 8, out.size(), out.begin());
    return out;
  }
  for (std::size_t i = 0; i < width; ++i) {
    SetBit(out, pad + i, GetBit(data, bit_offset + i));
  }
  return out;
}

void InsertBits(std::span<std::uint8_t> data, std::size_t bit_offset,
                std::size_t width, std::span<const std::uint8_t> value) {
  const Bytes v = Resize(value, width);
  const std::size_t pad = v.size() * 8 - width;
  for (std::size_t i = 0; i < width; ++i) {
    SetBit(data, bit_offset + i, GetBit(v, pad + i));
  }
}

bool FitsWidth(std::span<const std::uint8_t> value, std::size_t width) {
  const std::size_t total = value.size() * 8;
  if (total <= width) return true;
  for (std::size_t i = 0; i < total - width; ++i) {
    if (GetBit(value, i)) return false;
  }
  return true;
}

Bytes Resize(std::span<const std::uint8_t> value, std::size_t width) {
  if (!FitsWidth(value, width)) {
    throw Error(ErrorCode::kInvalidArgument,
                "value 0x" + ToHex(value) + " does not fit in " +
                    std::to_string(width) + " bits");
  }
  const std::size_t n = BytesForWidth(width);
  Bytes out(n, 0);
  if (value.size() >= n) {
    std::copy(value.end() - static_cast<std::ptrdiff_t>(n), value.end(),
              out.begin());
  } else {
    std::copy(value.begin(), value.end(),
              out.begin() + static_cast<std::ptrdiff_t>(n - value.size()));
  }
  return out;
}

Bytes ParseValue(std::string_view text, std::size_t width) {
  const auto bad = [&](std::string_view why) {
    return Error(ErrorCode::kSyntax, "bad value '" + std::string(text) +
                                         "': " + std::string(why));
  };
  if (text.empty()) throw bad("empty");
  Bytes acc(BytesForWidth(std::max<std::size_t>(width, 64)) + 1, 0);
  if (text.find(':') != std::string_view::npos) {
    Bytes raw;
    std::size_t pos = 0;
    while (pos <= text.size()) {
      const std::size_t end = std::min(text.find(':', pos), text.size());
      const std::string_view octet = text.substr(pos, end - pos);
      if (octet.empty() || octet.size() > 2) throw bad("malformed octet");
      unsigned v = 0;
      for (char c : octet) {
        const int d = HexDigit(c);
        if (d < 0) throw bad("non-hex digit");
        v = v * 16 + static_cast<unsigned>(d);
      }
      raw.push_back(static_cast<std::uint8_t>(v));
      pos = end + 1;
    }
    acc = std::move(raw);
  } else if (text.size() > 2 && text[0] == '0' &&
             (text[1] == 'x' || text[1] == 'X')) {
    for (char c : text.substr(2)) {
      const int d = HexDigit(c);
      if (d < 0) throw bad("non-hex digit");
      if (!MulAdd(acc, 16, static_cast<unsigned>(d))) throw bad("overflow");
    }
  } else {
    for (char c : text) {
      if (c < '0' || c > '9') throw bad("non-decimal digit");
      if (!MulAdd(acc, 10, static_cast<unsigned>(c - '0'))) {
        throw bad("overflow");
      }
    }
  }
  if (!FitsWidth(acc, width)) {
    throw bad("does not fit in " + std::to_string(width) + " bits");
  }
  return Resize(acc, width);
}

std::string FormatValue(std::span<const std::uint8_t> value,
                        std::size_t width) {
  const Bytes v = Resize(value, width);
  if (width == 48) return FormatMac(v);
  if (width <= 64) return std::to_string(ToUint(v));
  return "0x" + ToHex(v);
}

std::string ToHex(std::span<const std::uint8_t> data) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  out.reserve(data.size() * 2);
  for (std::uint8_t b : data) {
    out.push_back(kDigits[b >> 4]);
    out.push_back(kDigits[b & 0xf]);
  }
  return out;
}

Bytes FromHex(std::string_view hex) {
  if (hex.size() % 2 != 0) {
    throw Error(ErrorCode::kSyntax, "odd-length hex string");
  }
  Bytes out(hex.size() / 2);
  for (std::size_t i = 0; i < out.size(); ++i) {
    const int hi = HexDigit(hex[2 * i]);
    const int lo = HexDigit(hex[2 * i + 1]);
    if (hi < 0 || lo < 0) {
      throw Error(ErrorCode::kSyntax,
                  "non-hex digit at column " + std::to_string(2 * i));
    }
    out[i] = static_cast<std::uint8_t>(hi * 16 + lo);
  }
  return out;
}

std::uint64_t ToUint(std::span<const std::uint8_t> value) {
  std::uint64_t v = 0;
  for (std::uint8_t b : value) v = (v << 8) | b;
  return v;
}

Bytes FromUint(std::uint64_t value, std::size_t width) {
  Bytes raw(8);
  for (int i = 7; i >= 0; --i) {
    raw[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(value & 0xff);
    value >>= 8;
  }
  return Resize(raw, width);
}

std::string FormatMac(std::span<const std::uint8_t> value) {
  std::string out;
  for (std::size_t i = 0; i < value.size(); ++i) {
    if (i) out.push_back(':');
    out += ToHex(value.subspan(i, 1));
  }
  return out;
}

}  // namespace hdp
