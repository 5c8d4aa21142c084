#pragma once

// Seeded generators for the two benchmark program families and the
// benchmark parameter grid.

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "bpw/bits.hpp"
#include "bpw/error.hpp"
#include "bpw/program.hpp"
#include "bpw/rng.hpp"
#include "bpw/schedule.hpp"

namespace bpw {

enum class Family { RandomNand, Password };

inline std::string_view to_string(Family f) { return f == Family::RandomNand ? "random_nand" : "password"; }

inline std::optional<Family> family_from_string(std::string_view s) {
  if (s == "random_nand" || s == "random-nand" || s == "nand") return Family::RandomNand;
  if (s == "password") return Family::Password;
  return std::nullopt;
}

struct WorkloadSpec {
  Family family = Family::RandomNand;
  std::uint64_t n = 0;                    // requested instruction count
  std::uint64_t w = 0;
  std::uint64_t density_denominator = 0;  // COPY density d = 1/denominator; 0 for PASSWORD
  std::uint64_t seed = 0;

  /// Inputs (and RANDOM_NAND outputs): min(w, 50).
  std::uint64_t k() const { return std::min<std::uint64_t>(w, 50); }

  friend bool operator==(const WorkloadSpec&, const WorkloadSpec&) = default;
};

/// ceil(lg x) for x >= 1.
constexpr std::uint64_t ceil_lg(std::uint64_t x) {
  std::uint64_t bits = 0;
  while ((std::uint64_t{1} << bits) < x) ++bits;
  return bits;
}

/// Density denominators w, 2w, 4w, ..., 2^floor(lg(n/w)) w, i.e. every w*2^m <= n.
inline std::vector<std::uint64_t> density_denominators(std::uint64_t n, std::uint64_t w) {
  std::vector<std::uint64_t> out;
  if (w == 0) return out;
  for (std::uint64_t den = w; den <= n; den *= 2) {
    out.push_back(den);
    if (den > (std::uint64_t(-1) >> 1)) break;
  }
  return out;
}

inline bool density_valid(std::uint64_t n, std::uint64_t w, std::uint64_t denominator) {
  const auto all = density_denominators(n, w);
  return std::find(all.begin(), all.end(), denominator) != all.end();
}

/// Repetitions of (denominator NAND2 + 1 COPY): round(n d / (1 + d)), ties up.
constexpr std::uint64_t random_nand_repetitions(std::uint64_t n, std::uint64_t denominator) {
  return (2 * n + denominator + 1) / (2 * (denominator + 1));
}

/// Bits written by each generated COPY: floor(sqrt(w) / 2).
constexpr std::uint64_t random_nand_copy_bits(std::uint64_t w) { return isqrt(w) / 2; }

inline Program gen_random_nand(const WorkloadSpec& spec) {
  if (spec.family != Family::RandomNand) throw Error(ErrorCode::InvalidSpec, "family is not random_nand");
  const std::uint64_t w = spec.w;
  if (w < 4 || random_nand_copy_bits(w) == 0) {
    throw Error(ErrorCode::WidthTooSmall, "random_nand needs w >= 4, got " + std::to_string(w));
  }
  if (w > kMaxWidth) throw Error(ErrorCode::InvalidSpec, "width exceeds 2^30");
  const std::uint64_t den = spec.density_denominator;
  if (!density_valid(spec.n, w, den)) {
    throw Error(ErrorCode::InfeasibleDensity, "d = 1/" + std::to_string(den) + " is not w*2^m <= n for n = " +
                                                  std::to_string(spec.n) + ", w = " + std::to_string(w));
  }

  const std::uint64_t reps = random_nand_repetitions(spec.n, den);
  const std::uint64_t copy_bits = random_nand_copy_bits(w);
  Rng rng(spec.seed);
  Schedule sched(w);
  std::vector<Instruction> body;
  body.reserve(reps * (den + 1));

  auto draw_operand = [&] {
    for (;;) {
      const auto reg = static_cast<std::uint32_t>(rng.below(4 * w));
      if (sched.check_read(reg) == ReadFault::None) return reg;
    }
  };

  for (std::uint64_t r = 0; r < reps; ++r) {
    for (std::uint64_t g = 0; g < den; ++g) {
      const std::uint32_t x = draw_operand();
      const std::uint32_t y = draw_operand();
      body.push_back(Instruction::gate(GateKind::NAND2, x, y));
      sched.apply_gate();
    }
    // den is a multiple of w, so the COPY sits on a level boundary with level >= 1.
    const std::uint64_t reach = std::min(sched.level(), w);
    const std::uint64_t back = 1 + rng.below(reach);
    const std::uint64_t start = rng.below(w - copy_bits + 1);
    const Instruction copy = Instruction::copy(static_cast<std::uint32_t>(w + back - 1),
                                               static_cast<std::uint32_t>(copy_bits),
                                               static_cast<std::uint32_t>(start));
    body.push_back(copy);
    sched.apply_copy(copy);
  }
  return make_program(w, spec.k(), spec.k(), std::move(body));
}

/// The k-bit password: low k bits of 0x5555...5 (0x1555...555 truncated).
constexpr std::uint64_t password_value(std::uint64_t k) {
  const std::uint64_t pattern = 0x5555555555555555ULL;
  return k >= 64 ? pattern : pattern & ((std::uint64_t{1} << k) - 1);
}

inline std::uint8_t password_oracle(std::uint64_t k, std::uint64_t input) {
  return input == password_value(k) ? 1 : 0;
}

inline std::uint8_t password_oracle(std::uint64_t k, const Bits& input) {
  if (input.size() != k) throw Error(ErrorCode::InputLengthMismatch, "password input must have k bits");
  return password_oracle(k, bits_to_uint(input));
}

/// Levels needed: first NOT level, one permutation level, comparison, ceil(lg k) AND levels.
constexpr std::uint64_t password_min_levels(std::uint64_t k) { return 3 + ceil_lg(k); }

/// Bijection on {0..w-1}; image(i) is the source position feeding slot i.
class Permutation {
 public:
  static Permutation identity(std::uint64_t w) {
    Permutation p;
    p.map_.resize(w);
    std::iota(p.map_.begin(), p.map_.end(), 0u);
    return p;
  }

  static Permutation random(std::uint64_t w, Rng& rng) {
    Permutation p = identity(w);
    for (std::uint64_t i = w; i > 1; --i) std::swap(p.map_[i - 1], p.map_[rng.below(i)]);
    return p;
  }

  std::uint64_t size() const { return map_.size(); }
  std::uint32_t operator[](std::uint64_t i) const { return map_[i]; }

  /// (this then next): slot i of the result reads slot next[i] of this.
  Permutation then(const Permutation& next) const {
    Permutation out;
    out.map_.resize(map_.size());
    for (std::size_t i = 0; i < map_.size(); ++i) out.map_[i] = map_[next.map_[i]];
    return out;
  }

  bool is_bijection() const {
    std::vector<bool> seen(map_.size(), false);
    for (auto v : map_) {
      if (v >= map_.size() || seen[v]) return false;
      seen[v] = true;
    }
    return true;
  }

 private:
  std::vector<std::uint32_t> map_;
};

inline Program gen_password_recognizer(const WorkloadSpec& spec) {
  if (spec.family != Family::Password) throw Error(ErrorCode::InvalidSpec, "family is not password");
  const std::uint64_t w = spec.w;
  if (w < 1 || w > kMaxWidth) throw Error(ErrorCode::InvalidSpec, "width out of range");
  const std::uint64_t k = spec.k();
  const std::uint64_t and_levels = ceil_lg(k);
  const std::uint64_t levels = spec.n / w;
  if (levels < password_min_levels(k)) {
    throw Error(ErrorCode::TooSmallN, "password recognizer with w = " + std::to_string(w) + " needs n >= " +
                                          std::to_string(password_min_levels(k) * w));
  }
  const std::uint64_t shuffles = levels - 2 - and_levels;

  auto prev = [w](std::uint64_t level, std::uint64_t pos) {
    return static_cast<std::uint32_t>(2 * w + ((level - 1) & 1) * w + pos);
  };

  Rng rng(spec.seed);
  std::vector<Instruction> body;
  body.reserve(levels * w);

  for (std::uint64_t i = 0; i < w; ++i) body.push_back(Instruction::gate(GateKind::NOT, static_cast<std::uint32_t>(i % k)));

  // routing[i]: slot of the level-0 output now carried by slot i.
  Permutation routing = Permutation::identity(w);
  std::uint64_t level = 1;
  for (; level <= shuffles; ++level) {
    const Permutation perm = Permutation::random(w, rng);
    for (std::uint64_t i = 0; i < w; ++i) body.push_back(Instruction::gate(GateKind::NOT, prev(level, perm[i])));
    routing = routing.then(perm);
  }

  // Comparison: slot i checks input bit i mod k using two copies of its wire.
  // Wires have passed through 1 + shuffles NOT levels.
  std::vector<std::uint64_t> carrier(k, w);
  for (std::uint64_t slot = 0; slot < w; ++slot) {
    const std::uint64_t bit = routing[slot] % k;
    if (carrier[bit] == w) carrier[bit] = slot;
  }
  const bool inverted = (1 + shuffles) % 2 == 1;
  const std::uint64_t secret = password_value(k);
  for (std::uint64_t i = 0; i < w; ++i) {
    const std::uint64_t bit = i % k;
    const bool want_one = ((secret >> (k - 1 - bit)) & 1) != 0;
    const GateKind kind = (want_one != inverted) ? GateKind::AND2 : GateKind::NAND2;
    const std::uint32_t wire = prev(level, carrier[bit]);
    body.push_back(Instruction::gate(kind, wire, wire));
  }
  ++level;

  // AND reduction over cyclic windows of doubling span; slot i mirrors slot i mod k.
  for (std::uint64_t t = 0; t < and_levels; ++t, ++level) {
    const std::uint64_t span = std::uint64_t{1} << t;
    for (std::uint64_t i = 0; i < w; ++i) {
      const std::uint64_t c = i % k;
      body.push_back(Instruction::gate(GateKind::AND2, prev(level, c), prev(level, (c + span) % k)));
    }
  }
  return make_program(w, k, 1, std::move(body));
}

inline Program generate(const WorkloadSpec& spec) {
  return spec.family == Family::RandomNand ? gen_random_nand(spec) : gen_password_recognizer(spec);
}

/// `{family}_w{w}_n{n}[_d{denominator}]_s{seed}.bpw`, n being the generated count.
inline std::string workload_filename(const WorkloadSpec& spec, std::uint64_t actual_n) {
  std::string name = std::string(to_string(spec.family)) + "_w" + std::to_string(spec.w) + "_n" +
                     std::to_string(actual_n);
  if (spec.family == Family::RandomNand) name += "_d" + std::to_string(spec.density_denominator);
  return name + "_s" + std::to_string(spec.seed) + ".bpw";
}

enum class DensityRule { All, WidthOnly };

inline std::string_view to_string(DensityRule r) { return r == DensityRule::All ? "eq3" : "max"; }

inline std::optional<DensityRule> density_rule_from_string(std::string_view s) {
  if (s == "eq3" || s == "all") return DensityRule::All;
  if (s == "max" || s == "1/w") return DensityRule::WidthOnly;
  return std::nullopt;
}

struct GridSpec {
  std::vector<std::uint64_t> widths;
  std::vector<std::uint64_t> sizes;
  DensityRule density_rule = DensityRule::All;
  std::optional<std::uint64_t> scale_cap;
  std::vector<Family> families{Family::RandomNand, Family::Password};

  static GridSpec full_default() {
    GridSpec g;
    g.widths = {5, 10, 50, 100, 500, 1000, 5000, 10000, 50000, 100000, 500000};
    g.sizes = {1'000'000, 10'000'000, 100'000'000, 1'000'000'000};
    return g;
  }
};

/// Ordered w-major, then n, then family (in grid order), then d descending.
/// Cells a family cannot generate (w < 4 for random_nand, n too small) are skipped.
inline std::vector<WorkloadSpec> parameter_grid(const GridSpec& grid, std::uint64_t seed = 0) {
  std::vector<WorkloadSpec> out;
  for (std::uint64_t w : grid.widths) {
    for (std::uint64_t n : grid.sizes) {
      if (grid.scale_cap && n > *grid.scale_cap) continue;
      for (Family f : grid.families) {
        if (f == Family::RandomNand) {
          if (w < 4) continue;
          auto dens = density_denominators(n, w);
          if (grid.density_rule == DensityRule::WidthOnly && !dens.empty()) dens.resize(1);
          for (std::uint64_t den : dens) out.push_back({f, n, w, den, seed});
        } else if (n / w >= password_min_levels(std::min<std::uint64_t>(w, 50))) {
          out.push_back({f, n, w, 0, seed});
        }
      }
    }
  }
  return out;
}

}  // namespace bpw
