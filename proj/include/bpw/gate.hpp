#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>

namespace bpw {

/// Gate-type nibble values of the version 0x01 format. 0xF is reserved.
enum class GateKind : std::uint8_t {
  NOT = 0x0,
  AND2 = 0x1,
  OR2 = 0x2,
  NAND2 = 0x3,
  NOR2 = 0x4,
  XOR2 = 0x5,
  XNOR2 = 0x6,
  AND3 = 0x7,
  OR3 = 0x8,
  NAND3 = 0x9,
  NOR3 = 0xA,
  XOR3 = 0xB,
  XNOR3 = 0xC,
  MUX3 = 0xD,
  COPY = 0xE,
};

inline constexpr std::uint8_t kReservedGateNibble = 0xF;
inline constexpr std::size_t kGateKindCount = 15;

inline constexpr std::array<std::string_view, kGateKindCount> kMnemonics = {
    "NOT",  "AND2", "OR2",  "NAND2", "NOR2",  "XOR2", "XNOR2", "AND3",
    "OR3",  "NAND3", "NOR3", "XOR3", "XNOR3", "MUX3", "COPY"};

inline constexpr std::array<std::uint8_t, kGateKindCount> kArity = {
    1, 2, 2, 2, 2, 2, 2, 3, 3, 3, 3, 3, 3, 3, 3};

// Truth tables indexed by (a | b << 1 | c << 2); unused inputs are 0.
inline constexpr std::array<std::uint8_t, kGateKindCount> kTruthTable = {
    0x55, 0x88, 0xEE, 0x77, 0x11, 0x66, 0x99, 0x80,
    0xFE, 0x7F, 0x01, 0x96, 0x69, 0xCA, 0x00};

constexpr std::size_t index_of(GateKind kind) { return static_cast<std::size_t>(kind); }

constexpr unsigned arity(GateKind kind) { return kArity[index_of(kind)]; }

constexpr std::string_view mnemonic(GateKind kind) { return kMnemonics[index_of(kind)]; }

constexpr bool is_copy(GateKind kind) { return kind == GateKind::COPY; }

inline std::optional<GateKind> gate_kind_from_nibble(std::uint8_t nibble) {
  if (nibble >= kGateKindCount) return std::nullopt;
  return static_cast<GateKind>(nibble);
}

inline std::optional<GateKind> gate_kind_from_mnemonic(std::string_view name) {
  for (std::size_t i = 0; i < kGateKindCount; ++i) {
    if (kMnemonics[i] == name) return static_cast<GateKind>(i);
  }
  return std::nullopt;
}

/// Evaluates a logic gate. MUX3(a, b, c) selects a when c = 0.
constexpr std::uint8_t eval_gate(GateKind kind, unsigned a, unsigned b = 0, unsigned c = 0) {
  return (kTruthTable[index_of(kind)] >> ((a & 1u) | (b & 1u) << 1 | (c & 1u) << 2)) & 1u;
}

}  // namespace bpw
