#pragma once

// Bit sequences exchanged with the evaluators.
//
// Text and raw-file forms treat a k-bit sequence as a big-endian integer
// right-aligned in whole nibbles (or bytes): bit 0 is the most significant of
// the k bits, so the first hex digit holds the lowest-indexed bits.

#include <algorithm>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "bpw/error.hpp"
#include "bpw/rng.hpp"

namespace bpw {

/// One element per bit, each 0 or 1.
using Bits = std::vector<std::uint8_t>;

namespace detail {

inline Bits right_align(const Bits& msb_first, std::size_t count, std::string_view what) {
  Bits out(count, 0);
  if (msb_first.size() >= count) {
    const std::size_t excess = msb_first.size() - count;
    for (std::size_t i = 0; i < excess; ++i) {
      if (msb_first[i]) {
        throw Error(ErrorCode::InputLengthMismatch,
                    std::string(what) + " has bits set beyond the " + std::to_string(count) + "-bit width");
      }
    }
    std::copy(msb_first.begin() + static_cast<std::ptrdiff_t>(excess), msb_first.end(), out.begin());
  } else {
    std::copy(msb_first.begin(), msb_first.end(),
              out.begin() + static_cast<std::ptrdiff_t>(count - msb_first.size()));
  }
  return out;
}

}  // namespace detail

inline Bits bits_from_hex(std::string_view hex, std::size_t count) {
  if (hex.starts_with("0x") || hex.starts_with("0X")) hex.remove_prefix(2);
  Bits raw;
  raw.reserve(hex.size() * 4);
  for (char ch : hex) {
    int v;
    if (ch >= '0' && ch <= '9') {
      v = ch - '0';
    } else if (ch >= 'a' && ch <= 'f') {
      v = ch - 'a' + 10;
    } else if (ch >= 'A' && ch <= 'F') {
      v = ch - 'A' + 10;
    } else {
      throw Error(ErrorCode::InputLengthMismatch, std::string("invalid hex digit '") + ch + "'");
    }
    for (int s = 3; s >= 0; --s) raw.push_back(static_cast<std::uint8_t>((v >> s) & 1));
  }
  return detail::right_align(raw, count, "hex input");
}

inline std::string bits_to_hex(const Bits& bits) {
  static constexpr char kDigits[] = "0123456789abcdef";
  const std::size_t nibbles = (bits.size() + 3) / 4;
  const std::size_t pad = nibbles * 4 - bits.size();
  std::string out;
  out.reserve(nibbles);
  for (std::size_t d = 0; d < nibbles; ++d) {
    int v = 0;
    for (std::size_t j = 0; j < 4; ++j) {
      const std::size_t pos = d * 4 + j;
      v = (v << 1) | (pos < pad ? 0 : bits[pos - pad]);
    }
    out.push_back(kDigits[v]);
  }
  return out;
}

inline Bits bits_from_bytes(std::span<const std::uint8_t> bytes, std::size_t count) {
  Bits raw;
  raw.reserve(bytes.size() * 8);
  for (std::uint8_t byte : bytes) {
    for (int s = 7; s >= 0; --s) raw.push_back(static_cast<std::uint8_t>((byte >> s) & 1));
  }
  return detail::right_align(raw, count, "raw input");
}

/// Bit i of the result is bit (k-1-i) of value.
inline Bits bits_from_uint(std::uint64_t value, std::size_t k) {
  Bits out(k, 0);
  for (std::size_t i = 0; i < k; ++i) out[i] = static_cast<std::uint8_t>((value >> (k - 1 - i)) & 1);
  return out;
}

inline std::uint64_t bits_to_uint(const Bits& bits) {
  std::uint64_t v = 0;
  for (std::uint8_t b : bits) v = (v << 1) | (b & 1u);
  return v;
}

inline Bits random_bits(Rng& rng, std::uint64_t count) {
  Bits bits(count);
  for (auto& b : bits) b = static_cast<std::uint8_t>(rng.next() & 1);
  return bits;
}

}  // namespace bpw
