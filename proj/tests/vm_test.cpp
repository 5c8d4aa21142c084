#include <gtest/gtest.h>

#include <cstdint>
#include <vector>

#include "bpw/reference.hpp"
#include "bpw/validate.hpp"
#include "bpw/vm.hpp"
#include "support/random_program.hpp"

namespace bpw {
namespace {

Program four_nands() {
  return make_program(4, 4, 4,
                      {Instruction::gate(GateKind::NAND2, 0, 1), Instruction::gate(GateKind::NAND2, 2, 3),
                       Instruction::gate(GateKind::NAND2, 0, 3), Instruction::gate(GateKind::NAND2, 1, 2)});
}

template <class M>
ErrorCode step_error(M& m, const Instruction& in) {
  try {
    m.step(in);
  } catch (const VmError& e) {
    return e.code();
  }
  ADD_FAILURE() << "step succeeded";
  return ErrorCode::BadRecord;
}

TEST(Gates, Examples) {
  EXPECT_EQ(eval_gate(GateKind::MUX3, 0, 1, 0), 0);
  EXPECT_EQ(eval_gate(GateKind::MUX3, 0, 1, 1), 1);
  EXPECT_EQ(eval_gate(GateKind::XNOR2, 1, 1), 1);
  EXPECT_EQ(eval_gate(GateKind::NAND3, 1, 1, 1), 0);
  EXPECT_EQ(eval_gate(GateKind::XOR3, 1, 1, 1), 1);
  EXPECT_EQ(eval_gate(GateKind::XNOR3, 1, 0, 0), 0);
}

TEST(Gates, TruthTablesMatchBooleanDefinitions) {
  for (std::size_t k = 0; k + 1 < kGateKindCount; ++k) {
    const auto kind = static_cast<GateKind>(k);
    for (unsigned v = 0; v < (1u << arity(kind)); ++v) {
      const bool x = v & 1, y = (v >> 1) & 1, z = (v >> 2) & 1;
      EXPECT_EQ(eval_gate(kind, x, y, z), detail::reference_gate(kind, x, y, z)) << mnemonic(kind) << " " << v;
    }
  }
}

TEST(Init, LoadsInputQueue) {
  const Header h{4, 4, 4, 1};
  BytewiseMachine m(h, {1, 0, 1, 0});
  EXPECT_EQ((std::vector<int>{m.reg(0), m.reg(1), m.reg(2), m.reg(3)}), (std::vector<int>{1, 0, 1, 0}));
  EXPECT_EQ(m.pi(), 0u);
  EXPECT_EQ(m.pc(), 0u);
  EXPECT_EQ(m.pr(), 0u);
  EXPECT_EQ(m.level(), 0u);

  BitpackedMachine padded(Header{4, 4, 3, 1}, {1, 1, 0});
  EXPECT_EQ((std::vector<int>{padded.reg(0), padded.reg(1), padded.reg(2), padded.reg(3)}),
            (std::vector<int>{1, 1, 0, 0}));

  BytewiseMachine two_words(Header{4, 4, 6, 1}, {1, 0, 0, 0, 1, 1});
  EXPECT_EQ(two_words.main_memory_words(), 2u);
  EXPECT_EQ(two_words.memory_bit(1, 0), 1);
  EXPECT_EQ(two_words.memory_bit(1, 1), 1);
  EXPECT_EQ(two_words.memory_bit(1, 2), 0);

  EXPECT_THROW(BytewiseMachine(h, {1, 0}), Error);
}

TEST(Step, FirstNandWritesResultQueue) {
  BytewiseMachine m(Header{4, 4, 4, 4}, {1, 0, 1, 0});
  m.step(Instruction::gate(GateKind::NAND2, 0, 1));
  EXPECT_EQ(m.reg(8), 1);  // result register 2w + PR with PR = 0
  EXPECT_EQ(m.pr(), 1u);
}

TEST(Step, ExtendedInputCopy) {
  const std::uint64_t w = 50;
  Bits inputs(100, 0);
  inputs[50] = 1;
  BytewiseMachine m(Header{w, 1, 100, 1}, inputs);
  m.step(Instruction::copy(1, 1, 0));  // input bit w
  EXPECT_EQ(m.reg(0), 1);
  EXPECT_EQ(m.pi(), 1u);
  EXPECT_EQ(m.readable_from(0), copy_latency(w));
  // Not readable until the latency has elapsed.
  EXPECT_EQ(step_error(m, Instruction::gate(GateKind::NOT, 0)), ErrorCode::NotReadyRead);
}

TEST(Step, CopyAdvancesCursorByBitCount) {
  const std::uint64_t w = 8;
  BitpackedMachine m(Header{w, 100, 64, 1}, Bits(64, 1));
  m.step(Instruction::copy(3, 5, 1));
  EXPECT_EQ(m.pi(), 5u);
  m.step(Instruction::copy(2, 6, 0));
  EXPECT_EQ(m.pi(), 3u);  // wrapped mod w
  EXPECT_EQ(m.pc(), 0u);
}

TEST(Step, PriorResultCopyReadsMainMemory) {
  const std::uint64_t w = 4;
  BytewiseMachine m(Header{w, 100, 4, 1}, {1, 0, 1, 1});
  // Level 0: outputs NOT(x) = 0 1 0 0; level 1: copies of x0 = 1 1 1 1.
  for (std::uint32_t i = 0; i < 4; ++i) m.step(Instruction::gate(GateKind::NOT, i));
  for (std::uint32_t i = 0; i < 4; ++i) m.step(Instruction::gate(GateKind::AND2, 0, 0));
  EXPECT_EQ(m.main_memory_words(), 3u);
  m.step(Instruction::copy(static_cast<std::uint32_t>(w + 1), 3, 1));  // level -2, bits 1..3
  EXPECT_EQ(m.pc(), 3u);
  EXPECT_EQ(m.reg(w + 0), 1);
  EXPECT_EQ(m.reg(w + 1), 0);
  EXPECT_EQ(m.reg(w + 2), 0);
  EXPECT_EQ(step_error(m, Instruction::copy(static_cast<std::uint32_t>(w + 2), 1, 0)),
            ErrorCode::PriorLevelUnderflow);
}

TEST(Step, RuntimeReadChecks) {
  BytewiseMachine m(Header{4, 100, 4, 1}, {1, 0, 1, 0});
  m.step(Instruction::gate(GateKind::NAND2, 0, 1));
  EXPECT_EQ(step_error(m, Instruction::gate(GateKind::NOT, 8)), ErrorCode::LockedRegisterRead);
  EXPECT_EQ(step_error(m, Instruction::gate(GateKind::NOT, 12)), ErrorCode::UninitializedRead);
  EXPECT_EQ(step_error(m, Instruction::gate(GateKind::NOT, 4)), ErrorCode::UninitializedRead);
}

TEST(Run, FourNandExample) {
  const Program p = four_nands();
  const Bits in = {1, 0, 1, 0};
  for (auto kind : {EvaluatorKind::Bytewise, EvaluatorKind::Bitpacked}) {
    const auto r = run(p, in, kind);
    EXPECT_EQ(r.outputs, (Bits{1, 1, 1, 1}));
    EXPECT_EQ(r.gates_executed, 4u);
    EXPECT_EQ(r.levels_completed, 1u);
  }
  EXPECT_EQ(reference_eval(p, in), (Bits{1, 1, 1, 1}));
  EXPECT_EQ(reference_eval(p, {1, 1, 1, 1}), (Bits{0, 0, 0, 0}));
}

TEST(Run, OutputsComeFromTrailingLevelWords) {
  // w = 2, b = 3: outputs are level 1 (both bits) then level 2 bit 0.
  const Program p = make_program(2, 2, 3,
                                 {Instruction::gate(GateKind::NOT, 0), Instruction::gate(GateKind::NOT, 1),
                                  Instruction::gate(GateKind::OR2, 4, 4), Instruction::gate(GateKind::AND2, 4, 5),
                                  Instruction::gate(GateKind::NOT, 6), Instruction::gate(GateKind::NOT, 7)});
  const Bits in = {0, 1};  // level0 = 1 0, level1 = 1 0, level2 = 0 1
  EXPECT_EQ(run(p, in, EvaluatorKind::Bytewise).outputs, (Bits{1, 0, 0}));
  EXPECT_EQ(reference_eval(p, in), (Bits{1, 0, 0}));
}

TEST(Run, InsufficientOutputLevels) {
  const Program p = make_program(4, 0, 5, std::vector<Instruction>(4, Instruction::gate(GateKind::NOT, 0)));
  EXPECT_THROW(run(p, {}, EvaluatorKind::Bitpacked), VmError);
  EXPECT_THROW(reference_eval(p, {}), VmError);
}

TEST(Run, EvaluatorsAgreeOnRandomPrograms) {
  Rng rng(7);
  for (int trial = 0; trial < 400; ++trial) {
    const Program p = testing::random_program(rng, {.min_w = 1, .max_w = 96, .max_n = 4000});
    ASSERT_TRUE(validate(p, {.strict = true}).ok);
    const Bits in = testing::random_bits(rng, p.header.a);
    const Bits expected = reference_eval(p, in);
    ASSERT_EQ(run(p, in, EvaluatorKind::Bytewise).outputs, expected) << trial;
    ASSERT_EQ(run(p, in, EvaluatorKind::Bitpacked).outputs, expected) << trial;
    ASSERT_EQ(run(p, in, EvaluatorKind::Bitpacked, {.checked = false}).outputs, expected) << trial;
  }
}

TEST(Run, StateSizeAndMemoryLaws) {
  Rng rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const Program p = testing::random_program(rng, {.min_w = 1, .max_w = 200, .max_n = 3000});
    const std::uint64_t w = p.header.w;
    const Bits in = testing::random_bits(rng, p.header.a);
    BytewiseMachine bytes(p.header, in);
    BitpackedMachine packed(p.header, in);
    std::uint64_t gates = 0;
    for (const auto& instr : p.instructions) {
      bytes.step(instr);
      packed.step(instr);
      gates += is_copy(instr.kind) ? 0 : 1;
      ASSERT_EQ(bytes.main_memory_words(), input_words(p.header) + gates / w);
      ASSERT_LT(bytes.pi(), w);
      ASSERT_LT(bytes.pc(), w);
      ASSERT_LT(bytes.pr(), 2 * w);
    }
    EXPECT_EQ(bytes.register_file_bits(), 4 * w);
    EXPECT_EQ(bytes.register_storage_bytes(), 4 * w);
    EXPECT_EQ(packed.register_storage_bytes(), 8 * ceil_div(4 * w, 64));
    EXPECT_EQ(bytes.instruction_index(), p.header.n);
    EXPECT_EQ(bytes.outputs(), packed.outputs());
  }
}

TEST(Bits, HexConvention) {
  EXPECT_EQ(bits_to_hex({1, 0, 1, 0}), "a");
  EXPECT_EQ(bits_to_hex({1, 0, 1, 0, 1}), "15");
  EXPECT_EQ(bits_to_hex({1}), "1");
  EXPECT_EQ(bits_from_hex("15", 5), (Bits{1, 0, 1, 0, 1}));
  EXPECT_EQ(bits_from_hex("0x15", 5), (Bits{1, 0, 1, 0, 1}));
  EXPECT_EQ(bits_from_hex("1", 3), (Bits{0, 0, 1}));
  EXPECT_EQ(bits_from_uint(0x15, 5), (Bits{1, 0, 1, 0, 1}));
  EXPECT_EQ(bits_to_uint({1, 0, 1, 0, 1}), 0x15u);
  EXPECT_EQ(bits_from_bytes(std::vector<std::uint8_t>{0x01, 0x55}, 9), bits_from_hex("155", 9));
  EXPECT_THROW(bits_from_hex("35", 5), Error);  // bit beyond width
  EXPECT_THROW(bits_from_hex("xz", 5), Error);
  Rng rng(3);
  for (int i = 0; i < 100; ++i) {
    const Bits b = testing::random_bits(rng, rng.below(70));
    EXPECT_EQ(bits_from_hex(bits_to_hex(b), b.size()), b);
  }
}

}  // namespace
}  // namespace bpw
