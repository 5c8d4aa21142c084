#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <sstream>
#include <string>

#include "bpw/program.hpp"

namespace bpw {

inline std::string describe_copy(const Instruction& in, std::uint64_t w) {
  std::ostringstream os;
  const std::uint32_t c = in.count();
  const char* unit = c == 1 ? " bit" : " bits";
  if (in.selector() < w) {
    os << "extended-input word " << in.selector() << ", " << c << unit << " from offset " << in.start();
  } else {
    os << "prior-result level -" << (in.selector() - w + 1) << ", " << c << unit << " from offset "
       << in.start();
  }
  return os.str();
}

/// One line per instruction: index, level, mnemonic, operands.
inline std::string disassemble(const Program& p, std::optional<std::uint64_t> limit = std::nullopt) {
  const std::uint64_t w = p.header.w;
  const std::uint64_t count =
      limit ? std::min<std::uint64_t>(*limit, p.instructions.size()) : p.instructions.size();
  std::ostringstream os;
  std::uint64_t gates = 0;
  for (std::uint64_t i = 0; i < count; ++i) {
    const Instruction& in = p.instructions[i];
    os << i << " L" << gates / w << ' ' << mnemonic(in.kind);
    for (unsigned k = 0; k < arity(in.kind); ++k) os << ' ' << in.operands[k];
    if (is_copy(in.kind)) {
      os << "  ; " << describe_copy(in, w);
    } else {
      ++gates;
    }
    os << '\n';
  }
  return os.str();
}

}  // namespace bpw
