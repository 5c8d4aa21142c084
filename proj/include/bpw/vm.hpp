#pragma once

// Virtual machine for BPW programs.
//
// Machine<Registers, Checked> holds the 4w-bit register file in one of two
// layouts, the cursors and level counter, and main memory. In checked mode
// each register also carries the first level at which it may be read, so a
// read costs one comparison: COPY destinations get level + ceil(sqrt(w)), the
// result half being written gets level + 1 when its level starts.
//
// Main memory is a packed stream of w-bit words: the ceil(a/w) input words
// followed by one word per completed level. Gate outputs are written to both
// the result queue and the in-progress memory word.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "bpw/bits.hpp"
#include "bpw/error.hpp"
#include "bpw/program.hpp"

namespace bpw {

enum class EvaluatorKind { Bytewise, Bitpacked };

inline std::string_view to_string(EvaluatorKind k) {
  return k == EvaluatorKind::Bytewise ? "bytewise" : "bitpacked";
}

inline std::optional<EvaluatorKind> evaluator_from_string(std::string_view s) {
  if (s == "bytewise") return EvaluatorKind::Bytewise;
  if (s == "bitpacked") return EvaluatorKind::Bitpacked;
  return std::nullopt;
}

/// One addressable byte per register bit.
class ByteRegisters {
 public:
  explicit ByteRegisters(std::uint64_t bits) : r_(bits, 0) {}

  std::uint8_t get(std::uint64_t i) const { return r_[i]; }
  void set(std::uint64_t i, std::uint8_t v) { r_[i] = v; }
  std::size_t storage_bytes() const { return r_.size(); }

 private:
  std::vector<std::uint8_t> r_;
};

/// Register bits packed into 64-bit words.
class PackedRegisters {
 public:
  explicit PackedRegisters(std::uint64_t bits) : r_(ceil_div(bits, 64), 0) {}

  std::uint8_t get(std::uint64_t i) const { return static_cast<std::uint8_t>((r_[i >> 6] >> (i & 63)) & 1); }
  void set(std::uint64_t i, std::uint8_t v) {
    const std::uint64_t mask = std::uint64_t{1} << (i & 63);
    std::uint64_t& word = r_[i >> 6];
    word = (word & ~mask) | (std::uint64_t{v} << (i & 63));
  }
  std::size_t storage_bytes() const { return r_.size() * sizeof(std::uint64_t); }

 private:
  std::vector<std::uint64_t> r_;
};

/// Word-addressed store of w-bit words, packed contiguously.
class MainMemory {
 public:
  MainMemory(std::uint64_t w, std::uint64_t capacity_words)
      : w_(w), bits_(ceil_div(capacity_words * w, 64), 0) {}

  std::uint8_t bit(std::uint64_t word, std::uint64_t i) const { return bit_at(word * w_ + i); }
  std::uint8_t bit_at(std::uint64_t idx) const {
    return static_cast<std::uint8_t>((bits_[idx >> 6] >> (idx & 63)) & 1);
  }

  /// Positions are written once, so setting only needs an OR.
  void put(std::uint64_t word, std::uint64_t i, std::uint8_t v) { put_bit(word * w_ + i, v); }
  void put_bit(std::uint64_t idx, std::uint8_t v) { bits_[idx >> 6] |= std::uint64_t{v} << (idx & 63); }

 private:
  std::uint64_t w_;
  std::vector<std::uint64_t> bits_;
};

template <class Registers, bool Checked = true>
class Machine {
 public:
  static constexpr std::uint64_t kNever = std::numeric_limits<std::uint64_t>::max();

  /// Loads the inputs into main memory and performs the implicit COPY(0, w, 0).
  Machine(const Header& h, const Bits& inputs)
      : header_(h),
        w_(h.w),
        latency_(copy_latency(h.w)),
        input_words_(input_words(h)),
        regs_(4 * h.w),
        memory_(h.w, input_words_ + h.n / h.w + 1),
        result_base_(2 * h.w),
        mem_bit_(input_words_ * h.w) {
    if (inputs.size() != h.a) {
      throw Error(ErrorCode::InputLengthMismatch,
                  "expected " + std::to_string(h.a) + " input bits, got " + std::to_string(inputs.size()));
    }
    for (std::uint64_t i = 0; i < h.a; ++i) memory_.put(i / w_, i % w_, inputs[i] & 1);
    if (input_words_ > 0) {
      for (std::uint64_t i = 0; i < w_; ++i) regs_.set(i, memory_.bit(0, i));
    }
    if constexpr (Checked) {
      // readable_from[r]: first level at which register r may be read.
      readable_from_.assign(4 * w_, kNever);
      std::fill_n(readable_from_.begin(), w_, 0);
      std::fill_n(readable_from_.begin() + static_cast<std::ptrdiff_t>(2 * w_), w_, 1);
    }
  }

  void step(const Instruction& in) {
    if (in.kind == GateKind::COPY) {
      copy(in);
    } else {
      const unsigned k = arity(in.kind);
      unsigned idx = read(in.operands[0]);
      if (k > 1) idx |= static_cast<unsigned>(read(in.operands[1])) << 1;
      if (k > 2) idx |= static_cast<unsigned>(read(in.operands[2])) << 2;
      const auto out = static_cast<std::uint8_t>((kTruthTable[index_of(in.kind)] >> idx) & 1u);
      regs_.set(result_base_ + slot_, out);
      memory_.put_bit(mem_bit_++, out);
      if (++slot_ == w_) next_level();
    }
    ++index_;
  }

  /// First b bits of the last ceil(b/w) completed level words, oldest first.
  Bits outputs() const {
    const std::uint64_t words = output_words(header_);
    if (words > level_) {
      throw VmError(ErrorCode::InsufficientOutputLevels, index_,
                    std::to_string(level_) + " completed levels, " + std::to_string(words) +
                        " output words needed");
    }
    Bits out(header_.b);
    const std::uint64_t first = input_words_ + level_ - words;
    for (std::uint64_t i = 0; i < header_.b; ++i) out[i] = memory_.bit(first + i / w_, i % w_);
    return out;
  }

  const Header& header() const { return header_; }
  std::uint64_t level() const { return level_; }
  std::uint64_t pi() const { return pi_; }
  std::uint64_t pc() const { return pc_; }
  std::uint64_t pr() const { return result_base_ - 2 * w_ + slot_; }
  std::uint64_t instruction_index() const { return index_; }
  std::uint8_t reg(std::uint64_t i) const { return regs_.get(i); }
  std::uint64_t readable_from(std::uint64_t i) const { return Checked ? readable_from_[i] : 0; }
  std::uint64_t main_memory_words() const { return input_words_ + level_; }
  std::uint8_t memory_bit(std::uint64_t word, std::uint64_t i) const { return memory_.bit(word, i); }

  std::uint64_t register_file_bits() const { return 4 * w_; }
  std::size_t register_storage_bytes() const { return regs_.storage_bytes(); }

 private:
  void next_level() {
    slot_ = 0;
    ++level_;
    result_base_ = 2 * w_ + (level_ & 1) * w_;
    if constexpr (Checked) {
      // The half written on this level is locked until the next one.
      std::fill_n(readable_from_.begin() + static_cast<std::ptrdiff_t>(result_base_), w_, level_ + 1);
    }
  }

  std::uint8_t read(std::uint32_t reg) const {
    if constexpr (Checked) {
      if (readable_from_[reg] > level_) [[unlikely]] {
        read_fault(reg);
      }
    }
    return regs_.get(reg);
  }

  [[noreturn]] void read_fault(std::uint32_t reg) const {
    const std::uint64_t t = readable_from_[reg];
    const std::string name = "register " + std::to_string(reg);
    if (t == kNever) throw VmError(ErrorCode::UninitializedRead, index_, name + " never written");
    if (reg >= 2 * w_) {
      throw VmError(ErrorCode::LockedRegisterRead, index_,
                    name + " is being written on level " + std::to_string(level_));
    }
    throw VmError(ErrorCode::NotReadyRead, index_,
                  name + " ready at level " + std::to_string(t) + ", now " + std::to_string(level_));
  }

  void copy(const Instruction& in) {
    if constexpr (Checked) {
      if (auto err = operand_error(in, w_)) throw VmError(ErrorCode::OperandOutOfRange, index_, *err);
    }
    const bool ext = in.selector() < w_;
    std::uint64_t word = 0;
    bool zeros = false;
    if (ext) {
      word = in.selector();
      zeros = word >= input_words_;
    } else {
      const std::uint64_t back = in.selector() - w_ + 1;
      if (back > level_) {
        throw VmError(ErrorCode::PriorLevelUnderflow, index_,
                      "level -" + std::to_string(back) + " requested after " + std::to_string(level_) +
                          " completed levels");
      }
      word = input_words_ + level_ - back;
    }
    std::uint64_t& cursor = ext ? pi_ : pc_;
    const std::uint64_t base = ext ? 0 : w_;
    std::uint64_t src = word * w_ + in.start();
    std::uint64_t pos = cursor;
    for (std::uint32_t t = 0; t < in.count(); ++t, ++src) {
      regs_.set(base + pos, zeros ? 0 : memory_.bit_at(src));
      if constexpr (Checked) readable_from_[base + pos] = level_ + latency_;
      if (++pos == w_) pos = 0;
    }
    cursor = pos;
  }

  Header header_;
  std::uint64_t w_;
  std::uint64_t latency_;
  std::uint64_t input_words_;
  Registers regs_;
  MainMemory memory_;
  std::vector<std::uint64_t> readable_from_;  // per register; empty when unchecked
  std::uint64_t level_ = 0;
  std::uint64_t slot_ = 0;         // gates done on the current level
  std::uint64_t result_base_;      // 2w + (level mod 2) w
  std::uint64_t mem_bit_;          // main-memory bit for the next gate output
  std::uint64_t pi_ = 0;
  std::uint64_t pc_ = 0;
  std::uint64_t index_ = 0;
};

using BytewiseMachine = Machine<ByteRegisters>;
using BitpackedMachine = Machine<PackedRegisters>;

struct EvaluationResult {
  Bits outputs;
  std::uint64_t gates_executed = 0;  // instructions executed, COPY included
  std::uint64_t levels_completed = 0;
  std::size_t register_storage_bytes = 0;
};

struct RunOptions {
  /// Per-read register checks. May be turned off for programs that validated clean.
  bool checked = true;
};

namespace detail {

template <class Registers, bool Checked>
EvaluationResult run_with(const Program& p, const Bits& inputs) {
  Machine<Registers, Checked> m(p.header, inputs);
  for (const Instruction& in : p.instructions) m.step(in);
  EvaluationResult r;
  r.outputs = m.outputs();
  r.gates_executed = m.instruction_index();
  r.levels_completed = m.level();
  r.register_storage_bytes = m.register_storage_bytes();
  return r;
}

}  // namespace detail

inline EvaluationResult run(const Program& p, const Bits& inputs, EvaluatorKind kind,
                            const RunOptions& opts = {}) {
  if (kind == EvaluatorKind::Bytewise) {
    return opts.checked ? detail::run_with<ByteRegisters, true>(p, inputs)
                        : detail::run_with<ByteRegisters, false>(p, inputs);
  }
  return opts.checked ? detail::run_with<PackedRegisters, true>(p, inputs)
                      : detail::run_with<PackedRegisters, false>(p, inputs);
}

}  // namespace bpw
