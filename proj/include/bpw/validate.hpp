#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "bpw/program.hpp"
#include "bpw/schedule.hpp"

namespace bpw {

enum class Rule {
  R0,  // operand outside its range
  R1,  // more than one COPY within w consecutive instructions
  R2,  // COPY result read before its latency elapsed
  R3,  // read of an uninitialized or locked register
  R4,  // prior-result COPY reaching before level 0
  R5,  // non-COPY instruction count is not a positive multiple of w
  R6,  // fewer completed levels than output words
};

inline std::string_view to_string(Rule r) {
  static constexpr std::string_view names[] = {"R0", "R1", "R2", "R3", "R4", "R5", "R6"};
  return names[static_cast<int>(r)];
}

struct Violation {
  std::uint64_t index;  // instruction index; n for whole-program rules
  Rule rule;
  std::string message;
};

struct ValidationReport {
  bool ok = true;
  std::vector<Violation> violations;
  std::vector<Violation> warnings;
  std::uint64_t total_violations = 0;  // may exceed violations.size() when capped

  bool has(Rule r) const {
    for (const auto& v : violations) {
      if (v.rule == r) return true;
    }
    return false;
  }
};

struct ValidateOptions {
  bool strict = false;                  // level completeness (R5) is an error
  std::size_t max_violations = 1000;    // stored; all are counted
};

namespace detail {

class ReportBuilder {
 public:
  ReportBuilder(ValidationReport& r, std::size_t cap) : report_(r), cap_(cap) {}

  void add(std::uint64_t index, Rule rule, std::string msg) {
    ++report_.total_violations;
    report_.ok = false;
    if (report_.violations.size() < cap_) report_.violations.push_back({index, rule, std::move(msg)});
  }

 private:
  ValidationReport& report_;
  std::size_t cap_;
};

}  // namespace detail

inline ValidationReport validate(const Program& p, const ValidateOptions& opts = {}) {
  ValidationReport report;
  detail::ReportBuilder out(report, opts.max_violations == 0 ? 1 : opts.max_violations);
  const std::uint64_t w = p.header.w;
  Schedule sched(w);

  bool seen_copy = false;
  std::uint64_t last_copy = 0;

  for (std::uint64_t i = 0; i < p.instructions.size(); ++i) {
    const Instruction& in = p.instructions[i];
    auto at = [&sched] { return "level " + std::to_string(sched.level()); };
    if (auto err = operand_error(in, w)) {
      out.add(i, Rule::R0, *err);
      if (!is_copy(in.kind)) sched.apply_gate();
      continue;
    }

    if (is_copy(in.kind)) {
      if (seen_copy && i - last_copy < w) {
        out.add(i, Rule::R1,
                "COPY " + std::to_string(i - last_copy) + " instructions after the COPY at " +
                    std::to_string(last_copy) + " (window w = " + std::to_string(w) + ")");
      }
      seen_copy = true;
      last_copy = i;
      if (!sched.is_extended_input(in) && !sched.prior_level_available(in.selector())) {
        out.add(i, Rule::R4,
                "prior-result COPY of level -" + std::to_string(in.selector() - w + 1) + " at " + at() +
                    " with only " + std::to_string(sched.level()) + " completed levels");
      }
      sched.apply_copy(in);
      continue;
    }

    for (unsigned k = 0; k < arity(in.kind); ++k) {
      const std::uint32_t reg = in.operands[k];
      switch (sched.check_read(reg)) {
        case ReadFault::None: break;
        case ReadFault::NotReady:
          out.add(i, Rule::R2,
                  "register " + std::to_string(reg) + " read at " + at() + " but COPY result ready at level " +
                      std::to_string(sched.ready_at(reg)));
          break;
        case ReadFault::Locked:
          out.add(i, Rule::R3, "register " + std::to_string(reg) + " is locked at " + at());
          break;
        case ReadFault::Uninitialized:
          out.add(i, Rule::R3, "register " + std::to_string(reg) + " is uninitialized at " + at());
          break;
      }
    }
    sched.apply_gate();
  }

  const std::uint64_t n = p.instructions.size();
  if (sched.gates_in_level() != 0 || sched.level() == 0) {
    Violation v{n, Rule::R5,
                std::to_string(sched.gates_executed()) + " non-COPY instructions is not a positive multiple of w = " +
                    std::to_string(w)};
    if (opts.strict) {
      out.add(v.index, v.rule, std::move(v.message));
    } else {
      report.warnings.push_back(std::move(v));
    }
  }
  if (sched.level() < output_words(p.header)) {
    out.add(n, Rule::R6,
            std::to_string(sched.level()) + " completed levels cannot supply " + std::to_string(p.header.b) +
                " outputs (" + std::to_string(output_words(p.header)) + " words)");
  }
  return report;
}

}  // namespace bpw
