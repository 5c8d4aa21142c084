#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace bpw {

/// Deterministic seeded generator: std::mt19937_64 with an unbiased bounded
/// draw, so output depends only on the seed and the draw sequence.
class Rng {
 public:
  static constexpr std::string_view kName = "mt64-split-v1";

  explicit Rng(std::uint64_t seed) : seed_(seed), engine_(seed) {}

  std::uint64_t seed() const { return seed_; }

  std::uint64_t next() { return engine_(); }

  /// Uniform on [0, bound). bound must be positive.
  std::uint64_t below(std::uint64_t bound) {
    const std::uint64_t limit = std::uint64_t(-1) - (std::uint64_t(-1) % bound + 1) % bound;
    std::uint64_t x;
    do {
      x = engine_();
    } while (x > limit);
    return x % bound;
  }

  bool coin() { return (engine_() >> 63) != 0; }

  /// Independent child stream.
  Rng split(std::uint64_t stream) const {
    std::seed_seq seq{static_cast<std::uint32_t>(seed_), static_cast<std::uint32_t>(seed_ >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32),
                      0x6270775fu};
    std::uint32_t words[2];
    seq.generate(words, words + 2);
    return Rng((std::uint64_t{words[1]} << 32) | words[0]);
  }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

}  // namespace bpw
