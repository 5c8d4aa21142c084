#pragma once

// Level bookkeeping and register availability for the 4w-bit register file.
//
// Register map:
//   0   .. w-1    input queue   (extended-input COPY destination, cursor PI)
//   w   .. 2w-1   copy queue    (prior-result COPY destination, cursor PC)
//   2w  .. 3w-1   result half 0 (written on even levels)
//   3w  .. 4w-1   result half 1 (written on odd levels)
//
// A level is w consecutive non-COPY instructions. The half being written on
// the current level is locked; the other half holds the previous level.
// Queue registers written by COPY become readable ceil(sqrt(w)) levels later.

#include <cstdint>
#include <limits>
#include <string_view>
#include <vector>

#include "bpw/program.hpp"

namespace bpw {

enum class ReadFault { None, Locked, NotReady, Uninitialized };

inline std::string_view to_string(ReadFault f) {
  switch (f) {
    case ReadFault::None: return "none";
    case ReadFault::Locked: return "locked";
    case ReadFault::NotReady: return "not ready";
    case ReadFault::Uninitialized: return "uninitialized";
  }
  return "?";
}

class Schedule {
 public:
  static constexpr std::uint64_t kNever = std::numeric_limits<std::uint64_t>::max();

  explicit Schedule(std::uint64_t w)
      : w_(w), latency_(copy_latency(w)), ready_at_(2 * w, 0) {
    // The implicit COPY(0, w, 0) fills the input queue with no latency;
    // the copy queue starts empty.
    for (std::uint64_t r = w; r < 2 * w; ++r) ready_at_[r] = kNever;
  }

  std::uint64_t width() const { return w_; }
  std::uint64_t latency() const { return latency_; }
  std::uint64_t level() const { return level_; }
  std::uint64_t gates_in_level() const { return gates_in_level_; }
  std::uint64_t gates_executed() const { return level_ * w_ + gates_in_level_; }
  std::uint64_t pi() const { return pi_; }
  std::uint64_t pc() const { return pc_; }
  /// Result-queue cursor, 0 .. 2w-1.
  std::uint64_t pr() const { return (level_ & 1) * w_ + gates_in_level_; }
  std::uint64_t ready_at(std::uint64_t reg) const { return ready_at_[reg]; }

  ReadFault check_read(std::uint64_t reg) const {
    if (reg < 2 * w_) {
      const std::uint64_t t = ready_at_[reg];
      if (t == kNever) return ReadFault::Uninitialized;
      return t > level_ ? ReadFault::NotReady : ReadFault::None;
    }
    const std::uint64_t half = (reg - 2 * w_) >= w_ ? 1 : 0;
    if (half == (level_ & 1)) return ReadFault::Locked;
    if (level_ == 0) return ReadFault::Uninitialized;
    return ReadFault::None;
  }

  /// Prior-result selector w + j - 1 names the j-th preceding completed level.
  bool prior_level_available(std::uint64_t selector) const { return selector - w_ < level_; }

  bool is_extended_input(const Instruction& in) const { return in.selector() < w_; }

  /// Records a COPY: marks its destination registers and advances PI or PC.
  /// Returns the first destination queue position.
  std::uint64_t apply_copy(const Instruction& in) {
    const bool ext = is_extended_input(in);
    std::uint64_t& cursor = ext ? pi_ : pc_;
    const std::uint64_t base = ext ? 0 : w_;
    const std::uint64_t first = cursor;
    const std::uint64_t ready = level_ + latency_;
    std::uint64_t pos = cursor;
    for (std::uint32_t i = 0; i < in.count(); ++i) {
      ready_at_[base + pos] = ready;
      if (++pos == w_) pos = 0;
    }
    cursor = pos;
    return first;
  }

  /// Records one gate evaluation. Returns true when it completed a level.
  bool apply_gate() {
    if (++gates_in_level_ == w_) {
      gates_in_level_ = 0;
      ++level_;
      return true;
    }
    return false;
  }

 private:
  std::uint64_t w_;
  std::uint64_t latency_;
  std::vector<std::uint64_t> ready_at_;  // input and copy queue registers
  std::uint64_t level_ = 0;
  std::uint64_t gates_in_level_ = 0;
  std::uint64_t pi_ = 0;
  std::uint64_t pc_ = 0;
};

}  // namespace bpw
