#pragma once

// Random valid programs using every gate kind and both COPY forms, for
// property tests. Complete levels only, so strict validation passes.

#include <algorithm>
#include <cstdint>
#include <vector>

#include "bpw/bits.hpp"
#include "bpw/program.hpp"
#include "bpw/rng.hpp"
#include "bpw/schedule.hpp"

namespace bpw::testing {

struct RandomProgramOptions {
  std::uint64_t min_w = 1;
  std::uint64_t max_w = 64;
  std::uint64_t max_n = 2000;
  double copy_rate = 0.3;  // chance of a COPY whenever one is allowed
  bool two_input_only = false;
};

inline Program random_program(Rng& rng, const RandomProgramOptions& o = {}) {
  const std::uint64_t w = o.min_w + rng.below(o.max_w - o.min_w + 1);
  const std::uint64_t max_levels = std::max<std::uint64_t>(2, o.max_n / (w + 1));
  const std::uint64_t levels = 2 + rng.below(std::max<std::uint64_t>(1, std::min<std::uint64_t>(max_levels, 40) - 1));
  const std::uint64_t a = rng.below(std::min<std::uint64_t>(w * w, 3 * w) + 1);
  const std::uint64_t b = 1 + rng.below(std::min<std::uint64_t>(w * w, levels * w));

  Schedule sched(w);
  std::vector<Instruction> body;
  std::uint64_t since_copy = w;  // instructions since the last COPY

  auto draw = [&](std::uint64_t bound) { return static_cast<std::uint32_t>(rng.below(bound)); };
  auto draw_reg = [&] {
    for (int attempt = 0; attempt < 64; ++attempt) {
      const std::uint32_t r = draw(4 * w);
      if (sched.check_read(r) == ReadFault::None) return r;
    }
    std::vector<std::uint32_t> ok;
    for (std::uint32_t r = 0; r < 4 * w; ++r) {
      if (sched.check_read(r) == ReadFault::None) ok.push_back(r);
    }
    return ok[rng.below(ok.size())];
  };

  while (sched.level() < levels) {
    const bool may_copy = since_copy >= w && sched.level() >= 1;
    if (may_copy && static_cast<double>(rng.below(1000)) < o.copy_rate * 1000) {
      const std::uint32_t count = 1 + draw(w);
      const std::uint32_t start = draw(static_cast<std::uint32_t>(w - count + 1));
      std::uint32_t selector;
      if (rng.coin()) {
        selector = draw(static_cast<std::uint32_t>(w));
      } else {
        selector = static_cast<std::uint32_t>(w + rng.below(std::min<std::uint64_t>(sched.level(), w)));
      }
      const Instruction c = Instruction::copy(selector, count, start);
      body.push_back(c);
      sched.apply_copy(c);
      since_copy = 0;
      continue;
    }
    GateKind kind;
    if (o.two_input_only) {
      kind = static_cast<GateKind>(1 + rng.below(6));
    } else {
      kind = static_cast<GateKind>(rng.below(kGateKindCount - 1));
    }
    Instruction g{kind, {}};
    for (unsigned i = 0; i < arity(kind); ++i) g.operands[i] = draw_reg();
    body.push_back(g);
    sched.apply_gate();
    ++since_copy;
  }
  return make_program(w, a, b, std::move(body));
}

using bpw::random_bits;

}  // namespace bpw::testing
