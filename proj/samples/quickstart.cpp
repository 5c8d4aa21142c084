// Builds a two-level XOR program by hand, checks it, runs it on both
// evaluators, then generates a password recognizer and tries two guesses.

#include <iostream>

#include "bpw/disassemble.hpp"
#include "bpw/format.hpp"
#include "bpw/validate.hpp"
#include "bpw/vm.hpp"
#include "bpw/workloads.hpp"

int main() {
  using namespace bpw;

  // w = 2: level 0 computes x0^x1 and x0&x1, level 1 copies them forward.
  const Program p = make_program(2, 2, 2,
                                 {
                                     Instruction::gate(GateKind::XOR2, 0, 1),
                                     Instruction::gate(GateKind::AND2, 0, 1),
                                     Instruction::gate(GateKind::OR2, 4, 4),
                                     Instruction::gate(GateKind::OR2, 5, 5),
                                 });
  std::cout << disassemble(p);

  const auto report = validate(p, {.strict = true});
  std::cout << (report.ok ? "valid" : "invalid") << ", " << serialize(p).size() << " bytes\n";

  for (std::uint64_t x = 0; x < 4; ++x) {
    const Bits in = bits_from_uint(x, 2);
    std::cout << "inputs " << bits_to_hex(in) << " -> sum,carry " << bits_to_hex(run(p, in, EvaluatorKind::Bytewise).outputs)
              << " / " << bits_to_hex(run(p, in, EvaluatorKind::Bitpacked).outputs) << '\n';
  }

  const WorkloadSpec spec{Family::Password, 1000, 16, 0, 42};
  const Program rec = generate(spec);
  for (std::uint64_t guess : {std::uint64_t{0x1234}, password_value(16)}) {
    const auto out = run(rec, bits_from_uint(guess, 16), EvaluatorKind::Bitpacked).outputs;
    std::cout << "password guess " << std::hex << guess << std::dec << ": " << (out[0] ? "accepted" : "rejected")
              << '\n';
  }
  return 0;
}
