#pragma once

// Straightforward evaluator used as an oracle for the layouts in vm.hpp.
// Every level's outputs are kept in one flat trace; result-register reads are
// resolved against the trace instead of a circular result queue, and gates
// are evaluated from their Boolean definitions rather than truth tables.

#include <cstdint>
#include <string>
#include <vector>

#include "bpw/bits.hpp"
#include "bpw/error.hpp"
#include "bpw/program.hpp"

namespace bpw {

namespace detail {

inline std::uint8_t reference_gate(GateKind kind, bool x, bool y, bool z) {
  switch (kind) {
    case GateKind::NOT: return !x;
    case GateKind::AND2: return x && y;
    case GateKind::OR2: return x || y;
    case GateKind::NAND2: return !(x && y);
    case GateKind::NOR2: return !(x || y);
    case GateKind::XOR2: return x != y;
    case GateKind::XNOR2: return x == y;
    case GateKind::AND3: return x && y && z;
    case GateKind::OR3: return x || y || z;
    case GateKind::NAND3: return !(x && y && z);
    case GateKind::NOR3: return !(x || y || z);
    case GateKind::XOR3: return (x != y) != z;
    case GateKind::XNOR3: return (x != y) == z;
    case GateKind::MUX3: return z ? y : x;
    case GateKind::COPY: break;
  }
  return 0;
}

}  // namespace detail

inline Bits reference_eval(const Program& p, const Bits& inputs) {
  const std::uint64_t w = p.header.w;
  const std::uint64_t a = p.header.a;
  const std::uint64_t b = p.header.b;
  if (inputs.size() != a) {
    throw Error(ErrorCode::InputLengthMismatch,
                "expected " + std::to_string(a) + " input bits, got " + std::to_string(inputs.size()));
  }

  std::uint64_t latency = 0;
  while (latency * latency < w) ++latency;

  auto input_bit = [&](std::uint64_t word, std::uint64_t i) -> std::uint8_t {
    const std::uint64_t idx = word * w + i;
    return idx < a ? inputs[idx] : 0;
  };

  struct Cell {
    std::uint8_t value = 0;
    std::uint64_t ready = 0;
    bool written = false;
  };
  std::vector<Cell> input_cells(w), copy_cells(w);
  for (std::uint64_t i = 0; i < w; ++i) input_cells[i] = {input_bit(0, i), 0, true};
  std::uint64_t input_written = w;  // the implicit COPY(0, w, 0)
  std::uint64_t copy_written = 0;

  std::vector<std::uint8_t> trace;  // level L occupies [L*w, (L+1)*w)
  trace.reserve(p.instructions.size());

  for (std::uint64_t idx = 0; idx < p.instructions.size(); ++idx) {
    const Instruction& in = p.instructions[idx];
    const std::uint64_t level = trace.size() / w;

    if (in.kind == GateKind::COPY) {
      const std::uint64_t sel = in.operands[0], cnt = in.operands[1], start = in.operands[2];
      std::vector<std::uint8_t> fetched(cnt);
      if (sel < w) {
        for (std::uint64_t t = 0; t < cnt; ++t) fetched[t] = input_bit(sel, start + t);
      } else {
        const std::uint64_t back = sel - w + 1;
        if (back > level) {
          throw VmError(ErrorCode::PriorLevelUnderflow, idx, "level -" + std::to_string(back) + " requested");
        }
        const std::uint64_t src = (level - back) * w;
        for (std::uint64_t t = 0; t < cnt; ++t) fetched[t] = trace[src + start + t];
      }
      auto& cells = sel < w ? input_cells : copy_cells;
      auto& written = sel < w ? input_written : copy_written;
      for (std::uint64_t t = 0; t < cnt; ++t) cells[(written + t) % w] = {fetched[t], level + latency, true};
      written += cnt;
      continue;
    }

    auto fetch = [&](std::uint64_t reg) -> bool {
      if (reg < 2 * w) {
        const Cell& c = reg < w ? input_cells[reg] : copy_cells[reg - w];
        if (!c.written) throw VmError(ErrorCode::UninitializedRead, idx, "register " + std::to_string(reg));
        if (c.ready > level) throw VmError(ErrorCode::NotReadyRead, idx, "register " + std::to_string(reg));
        return c.value;
      }
      const std::uint64_t offset = reg - 2 * w;
      if (offset / w == level % 2) {
        throw VmError(ErrorCode::LockedRegisterRead, idx, "register " + std::to_string(reg));
      }
      if (level == 0) throw VmError(ErrorCode::UninitializedRead, idx, "register " + std::to_string(reg));
      return trace[(level - 1) * w + offset % w];
    };

    const unsigned k = arity(in.kind);
    const bool x = fetch(in.operands[0]);
    const bool y = k > 1 && fetch(in.operands[1]);
    const bool z = k > 2 && fetch(in.operands[2]);
    trace.push_back(detail::reference_gate(in.kind, x, y, z));
  }

  const std::uint64_t levels = trace.size() / w;
  const std::uint64_t words = (b + w - 1) / w;
  if (words > levels) {
    throw VmError(ErrorCode::InsufficientOutputLevels, p.instructions.size(),
                  std::to_string(levels) + " completed levels");
  }
  Bits out(b);
  const std::uint64_t first = (levels - words) * w;
  for (std::uint64_t i = 0; i < b; ++i) out[i] = trace[first + i];
  return out;
}

}  // namespace bpw
