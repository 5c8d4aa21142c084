#pragma once

#include <array>
#include <bit>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "bpw/gate.hpp"

namespace bpw {

/// Largest supported width; operands are stored in 32 bits and must reach 4w - 1.
inline constexpr std::uint64_t kMaxWidth = std::uint64_t{1} << 30;

struct Header {
  std::uint64_t w = 1;  // gates per level
  std::uint64_t n = 1;  // gate-descriptors, COPY included
  std::uint64_t a = 0;  // external inputs
  std::uint64_t b = 0;  // outputs

  friend bool operator==(const Header&, const Header&) = default;
};

struct Instruction {
  GateKind kind = GateKind::NOT;
  std::array<std::uint32_t, 3> operands{};  // unused trailing operands are zero

  static Instruction gate(GateKind kind, std::uint32_t x, std::uint32_t y = 0, std::uint32_t z = 0) {
    return Instruction{kind, {x, y, z}};
  }
  /// COPY(word selector, bit count, start offset).
  static Instruction copy(std::uint32_t selector, std::uint32_t count, std::uint32_t start) {
    return Instruction{GateKind::COPY, {selector, count, start}};
  }

  std::uint32_t selector() const { return operands[0]; }
  std::uint32_t count() const { return operands[1]; }
  std::uint32_t start() const { return operands[2]; }

  friend bool operator==(const Instruction&, const Instruction&) = default;
};

struct Program {
  Header header;
  std::vector<Instruction> instructions;

  std::uint64_t width() const { return header.w; }

  friend bool operator==(const Program&, const Program&) = default;
};

/// Builds a program whose header n matches the instruction count.
inline Program make_program(std::uint64_t w, std::uint64_t a, std::uint64_t b,
                            std::vector<Instruction> instructions) {
  Program p;
  p.header = Header{w, static_cast<std::uint64_t>(instructions.size()), a, b};
  p.instructions = std::move(instructions);
  return p;
}

/// Whole nibbles needed to address the 4w register indices: ceil(ceil(lg 4w) / 4).
constexpr unsigned specifier_nibble_length(std::uint64_t w) {
  const unsigned bits = static_cast<unsigned>(std::bit_width(4 * w - 1));
  return (bits + 3) / 4;
}

constexpr std::uint64_t instruction_nibbles(GateKind kind, std::uint64_t w) {
  return 1 + std::uint64_t{arity(kind)} * specifier_nibble_length(w);
}

/// Describes why an instruction breaks the operand invariants for width w, if it does.
inline std::optional<std::string> operand_error(const Instruction& in, std::uint64_t w) {
  const unsigned k = arity(in.kind);
  if (in.kind == GateKind::COPY) {
    if (in.selector() >= 2 * w) {
      return "COPY selector " + std::to_string(in.selector()) + " not below 2w = " +
             std::to_string(2 * w);
    }
    if (in.count() < 1 || in.count() > w) {
      return "COPY bit count " + std::to_string(in.count()) + " outside 1.." + std::to_string(w);
    }
    if (in.start() >= w || std::uint64_t{in.start()} + in.count() > w) {
      return "COPY bit range " + std::to_string(in.start()) + "+" + std::to_string(in.count()) +
             " exceeds word width " + std::to_string(w);
    }
    return std::nullopt;
  }
  for (unsigned i = 0; i < 3; ++i) {
    if (i < k && in.operands[i] >= 4 * w) {
      return std::string(mnemonic(in.kind)) + " operand " + std::to_string(in.operands[i]) +
             " not below 4w = " + std::to_string(4 * w);
    }
    if (i >= k && in.operands[i] != 0) {
      return std::string(mnemonic(in.kind)) + " has a nonzero unused operand";
    }
  }
  return std::nullopt;
}

constexpr std::uint64_t ceil_div(std::uint64_t x, std::uint64_t y) { return (x + y - 1) / y; }

/// Integer square root (floor).
constexpr std::uint64_t isqrt(std::uint64_t x) {
  std::uint64_t r = 0;
  for (std::uint64_t bit = std::uint64_t{1} << 62; bit != 0; bit >>= 2) {
    if (x >= r + bit) {
      x -= r + bit;
      r = (r >> 1) + bit;
    } else {
      r >>= 1;
    }
  }
  return r;
}

constexpr std::uint64_t ceil_sqrt(std::uint64_t x) {
  const std::uint64_t r = isqrt(x);
  return r * r == x ? r : r + 1;
}

/// COPY latency in levels.
constexpr std::uint64_t copy_latency(std::uint64_t w) { return ceil_sqrt(w); }

/// Words of w bits holding the a external inputs.
constexpr std::uint64_t input_words(const Header& h) { return ceil_div(h.a, h.w); }

/// Level-result words the outputs are drawn from.
constexpr std::uint64_t output_words(const Header& h) { return ceil_div(h.b, h.w); }

}  // namespace bpw
