#pragma once

// The bpw command line. run_cli() does all the work against caller-supplied
// streams; tools/bpw.cpp only forwards argv.
//
// Exit status: 0 success, 1 runtime or validation failure, 2 usage or parse error.

#include <charconv>
#include <cstdarg>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bpw/bench.hpp"
#include "bpw/disassemble.hpp"
#include "bpw/format.hpp"
#include "bpw/reference.hpp"
#include "bpw/report.hpp"
#include "bpw/validate.hpp"
#include "bpw/vm.hpp"
#include "bpw/workloads.hpp"

namespace bpw::cli {

inline constexpr int kOk = 0;
inline constexpr int kFailure = 1;
inline constexpr int kUsage = 2;

struct Context {
  /// Replaces the VM in `run`; lets tests check the oracle path.
  std::function<Bits(const Program&, const Bits&, EvaluatorKind)> evaluator;
};

namespace detail {

inline std::string format(const char* fmt, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, fmt);
  std::vsnprintf(buf, sizeof buf, fmt, ap);
  va_end(ap);
  return buf;
}

inline bool is_parse_error(ErrorCode c) {
  switch (c) {
    case ErrorCode::BadMagic:
    case ErrorCode::UnsupportedVersion:
    case ErrorCode::HeaderBoundViolation:
    case ErrorCode::Truncated:
    case ErrorCode::TrailingData:
    case ErrorCode::ReservedGateKind:
    case ErrorCode::OperandOutOfRange:
    case ErrorCode::BadRecord:
      return true;
    default:
      return false;
  }
}

inline bool is_spec_error(ErrorCode c) {
  switch (c) {
    case ErrorCode::InvalidSpec:
    case ErrorCode::WidthTooSmall:
    case ErrorCode::InfeasibleDensity:
    case ErrorCode::TooSmallN:
      return true;
    default:
      return false;
  }
}

/// Accepts "1/D" or "D".
inline std::uint64_t parse_denominator(const std::string& s) {
  const std::string digits = s.rfind("1/", 0) == 0 ? s.substr(2) : s;
  std::uint64_t v = 0;
  const auto r = std::from_chars(digits.data(), digits.data() + digits.size(), v);
  if (r.ec != std::errc{} || r.ptr != digits.data() + digits.size() || v == 0) {
    throw Error(ErrorCode::InvalidSpec, "bad density '" + s + "', expected 1/D");
  }
  return v;
}

inline std::uint64_t default_seed() {
  const char* env = std::getenv("BPW_SEED");
  if (!env || !*env) return 0;
  std::uint64_t v = 0;
  const std::string s(env);
  const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (r.ec != std::errc{} || r.ptr != s.data() + s.size()) {
    throw Error(ErrorCode::InvalidSpec, "BPW_SEED is not an unsigned integer: " + s);
  }
  return v;
}

struct Options {
  // gen
  std::string family;
  std::uint64_t n = 0, w = 0;
  std::string d;
  std::optional<std::uint64_t> seed;
  std::string out;
  // validate, run, dump
  std::string path;
  bool strict = false;
  std::uint64_t max_violations = 1000;
  std::string input, input_file;
  std::string evaluator = "bytewise";
  bool oracle = false;
  std::optional<std::uint64_t> limit;
  // bench, grid
  std::string grid;
  std::vector<std::string> families, evaluators;
  unsigned repeats = 5;
  std::string programs;
  bool append = false;
  std::optional<std::uint64_t> scale_cap;
  std::string density_rule = "eq3";
  // fit
  std::string in;
  double min_r2 = 0.98, tolerance = 0.10, max_cv = 0.5;
  std::optional<double> lo, hi;
};

inline int cmd_gen(const Options& o, std::ostream& out) {
  WorkloadSpec spec;
  spec.family = *family_from_string(o.family);
  spec.n = o.n;
  spec.w = o.w;
  spec.seed = o.seed ? *o.seed : default_seed();
  if (spec.family == Family::RandomNand) {
    spec.density_denominator = o.d.empty() ? o.w : parse_denominator(o.d);
  } else if (!o.d.empty()) {
    throw Error(ErrorCode::InvalidSpec, "--d applies to random_nand only");
  }
  const Program p = generate(spec);
  const std::string path = o.out.empty() ? workload_filename(spec, p.header.n) : o.out;
  save_program(path, p);
  out << "wrote " << path << ": n=" << p.header.n << " w=" << p.header.w << " a=" << p.header.a
      << " b=" << p.header.b << "\n";
  return kOk;
}

inline void print_report(const ValidationReport& r, std::ostream& out) {
  for (const auto& v : r.violations) {
    out << "instruction " << v.index << ": " << to_string(v.rule) << " " << v.message << "\n";
  }
  if (r.total_violations > r.violations.size()) {
    out << "... " << (r.total_violations - r.violations.size()) << " more violations\n";
  }
  for (const auto& v : r.warnings) {
    out << "warning: instruction " << v.index << ": " << to_string(v.rule) << " " << v.message << "\n";
  }
  out << (r.ok ? "ok" : "invalid") << ": " << r.total_violations << " violation(s), " << r.warnings.size()
      << " warning(s)\n";
}

inline int cmd_validate(const Options& o, std::ostream& out) {
  const Program p = load_program(o.path);
  const auto r = validate(p, {.strict = o.strict, .max_violations = o.max_violations});
  print_report(r, out);
  return r.ok ? kOk : kFailure;
}

inline int cmd_run(const Options& o, const Context& ctx, std::ostream& out, std::ostream& err) {
  const Program p = load_program(o.path);
  const EvaluatorKind kind = *evaluator_from_string(o.evaluator);
  Bits inputs;
  if (!o.input.empty() && !o.input_file.empty()) {
    err << "use one of --input and --input-file\n";
    return kUsage;
  }
  try {
    if (!o.input_file.empty()) {
      inputs = bits_from_bytes(read_file(o.input_file), p.header.a);
    } else if (!o.input.empty() || p.header.a == 0) {
      inputs = p.header.a == 0 && o.input.empty() ? Bits{} : bits_from_hex(o.input, p.header.a);
    } else {
      err << "program takes " << p.header.a << " input bits; pass --input HEX or --input-file\n";
      return kUsage;
    }
  } catch (const Error& e) {
    if (e.code() == ErrorCode::IoFailure) throw;
    err << e.what() << "\n";
    return kUsage;
  }
  const Bits outputs = ctx.evaluator ? ctx.evaluator(p, inputs, kind) : run(p, inputs, kind).outputs;
  out << bits_to_hex(outputs) << "\n";
  if (!o.oracle) return kOk;
  const Bits expected = reference_eval(p, inputs);
  if (expected == outputs) {
    out << "oracle: agree\n";
    return kOk;
  }
  std::vector<std::size_t> diff;
  for (std::size_t i = 0; i < std::max(expected.size(), outputs.size()); ++i) {
    if (i >= expected.size() || i >= outputs.size() || expected[i] != outputs[i]) diff.push_back(i);
  }
  out << "oracle: MISMATCH in " << diff.size() << " of " << expected.size() << " output bits\n";
  out << "  " << o.evaluator << ": " << bits_to_hex(outputs) << "\n";
  out << "  reference: " << bits_to_hex(expected) << "\n";
  for (std::size_t k = 0; k < diff.size() && k < 16; ++k) {
    const std::size_t i = diff[k];
    out << "  bit " << i << ": " << (i < outputs.size() ? char('0' + outputs[i]) : '-') << " vs "
        << (i < expected.size() ? char('0' + expected[i]) : '-') << "\n";
  }
  return kFailure;
}

inline int cmd_dump(const Options& o, std::ostream& out) {
  out << disassemble(load_program(o.path), o.limit);
  return kOk;
}

inline GridSpec default_grid(const Options& o) {
  GridSpec g = GridSpec::full_default();
  g.scale_cap = o.scale_cap;
  g.density_rule = *density_rule_from_string(o.density_rule);
  return g;
}

inline int cmd_grid(const Options& o, std::ostream& out) {
  const std::string text = to_json(default_grid(o)).dump(2) + "\n";
  if (o.out.empty()) {
    out << text;
  } else {
    write_text(o.out, text);
    out << "wrote " << o.out << "\n";
  }
  return kOk;
}

inline int cmd_bench(const Options& o, std::ostream& out, std::ostream& err) {
  GridSpec g = grid_from_json(read_text(o.grid));
  if (o.scale_cap) g.scale_cap = o.scale_cap;
  if (!o.families.empty()) {
    g.families.clear();
    for (const auto& f : o.families) g.families.push_back(*family_from_string(f));
  }
  BenchOptions bo;
  bo.repeats = o.repeats;
  if (!o.evaluators.empty()) {
    bo.evaluators.clear();
    for (const auto& e : o.evaluators) bo.evaluators.push_back(*evaluator_from_string(e));
  }
  if (!o.programs.empty()) {
    std::filesystem::create_directories(o.programs);
    bo.program_dir = o.programs;
  }
  const auto cells = parameter_grid(g, o.seed ? *o.seed : default_seed());
  if (cells.empty()) {
    err << "grid has no feasible cells\n";
    return kUsage;
  }

  std::ofstream file;
  std::ostream* sink = &out;
  if (!o.out.empty()) {
    const bool resume = o.append && std::filesystem::exists(o.out) && std::filesystem::file_size(o.out) > 0;
    file.open(o.out, resume ? std::ios::app : std::ios::trunc);
    if (!file) throw Error(ErrorCode::IoFailure, "cannot open " + o.out);
    sink = &file;
    if (!resume) write_csv_header(file);
  } else {
    write_csv_header(out);
  }
  std::uint64_t rows = 0;
  run_grid(
      cells, bo,
      [&](const Measurement& m) {
        write_csv_row(*sink, m);
        sink->flush();
        ++rows;
      },
      &err);
  if (!o.out.empty()) out << "wrote " << rows << " measurements to " << o.out << "\n";
  return kOk;
}

inline int cmd_fit(const Options& o, std::ostream& out) {
  std::vector<Measurement> ms;
  {
    std::ifstream in(o.in);
    if (!in) throw Error(ErrorCode::IoFailure, "cannot open " + o.in);
    ms = std::filesystem::path(o.in).extension() == ".json" ? read_json(in) : read_csv(in);
  }
  if (ms.empty()) {
    out << "no measurements in " << o.in << "\n";
    return kFailure;
  }
  std::map<GroupKey, std::vector<Measurement>> groups;
  for (const auto& m : ms) groups[{m.family, m.evaluator}].push_back(m);

  nlohmann::ordered_json doc = {{"fits", nlohmann::ordered_json::array()},
                                {"hypotheses", nlohmann::ordered_json::array()}};
  int status = kOk;
  for (const auto& [key, gm] : groups) {
    const std::string label = std::string(to_string(key.family)) + " " + std::string(to_string(key.evaluator));
    try {
      const CostFit f = fit_alpha(gm);
      out << format("%s: alpha=%.3f c=%.4g r_squared=%.4f R=%.4g widths=%zu\n", label.c_str(), f.alpha, f.c,
                    f.r_squared, f.R, f.widths.size());
      auto j = to_json(f);
      j["family"] = to_string(key.family);
      j["evaluator"] = to_string(key.evaluator);
      doc["fits"].push_back(j);
    } catch (const Error& e) {
      out << label << ": no fit (" << e.what() << ")\n";
      status = kFailure;
    }
  }

  H1Thresholds h1;
  h1.min_linearity_r2 = o.min_r2;
  h1.monotone_tolerance = o.tolerance;
  h1.lo = o.lo;
  h1.hi = o.hi;
  try {
    const auto h = hypothesis1(ms, h1);
    out << format("H1 %s: min separation S=%.4g, bounds [%.4g, %.4g], linearity R^2 >= %.2f, monotone within %.0f%%\n",
                  h.accepted ? "accepted" : "rejected", h.statistic, h.thresholds[2].second, h.thresholds[3].second,
                  o.min_r2, o.tolerance * 100);
    for (const auto& g : h.groups) {
      double worst_r2 = 1.0;
      for (const auto& s : g.widths) worst_r2 = std::min(worst_r2, s.linearity_r2);
      out << format("  %s %s: S=%.4g linear=%s (min R^2 %.4f) monotone=%s -> %s\n",
                    std::string(to_string(g.family)).c_str(), std::string(to_string(g.evaluator)).c_str(),
                    g.statistic, g.linear ? "yes" : "no", worst_r2, g.monotone ? "yes" : "no",
                    g.accepted ? "accepted" : "rejected");
    }
    doc["hypotheses"].push_back(to_json(h));
  } catch (const Error& e) {
    out << "H1 skipped: " << e.what() << "\n";
  }
  try {
    const auto h = hypothesis2(ms, {.max_cv = o.max_cv});
    out << format("H2 %s: CV of R = %.4g (max %.2f; %s)\n", h.accepted ? "accepted" : "rejected", h.statistic,
                  o.max_cv, h.note.c_str());
    doc["hypotheses"].push_back(to_json(h));
  } catch (const Error& e) {
    out << "H2 skipped: " << e.what() << "\n";
  }
  if (!o.out.empty()) write_text(o.out, doc.dump(2) + "\n");
  return status;
}

}  // namespace detail

inline int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err, const Context& ctx = {}) {
  detail::Options o;
  CLI::App app{"Tools for BPW width-bounded Boolean programs", "bpw"};
  app.require_subcommand(1);

  const auto families = CLI::IsMember({"random_nand", "password"});
  const auto evaluators = CLI::IsMember({"bytewise", "bitpacked"});

  auto* gen = app.add_subcommand("gen", "Generate a workload program");
  gen->add_option("--family", o.family, "random_nand or password")->required()->check(families);
  gen->add_option("--n", o.n, "Requested instruction count")->required();
  gen->add_option("--w", o.w, "Width")->required();
  gen->add_option("--d", o.d, "COPY density 1/D (random_nand; default 1/w)");
  gen->add_option("--seed", o.seed, "Seed (default $BPW_SEED or 0)");
  gen->add_option("--out", o.out, "Output file (default: generated name)");

  auto* val = app.add_subcommand("validate", "Check a program against the validity rules");
  val->add_option("path", o.path, "Program file")->required();
  val->add_flag("--strict", o.strict, "Treat incomplete levels as errors");
  val->add_option("--max", o.max_violations, "Violations to list");

  auto* run_cmd = app.add_subcommand("run", "Evaluate a program and print its outputs as hex");
  run_cmd->add_option("path", o.path, "Program file")->required();
  run_cmd->add_option("--input", o.input, "Input bits as hex");
  run_cmd->add_option("--input-file", o.input_file, "Raw input file");
  run_cmd->add_option("--evaluator", o.evaluator, "bytewise or bitpacked")->check(evaluators);
  run_cmd->add_flag("--oracle", o.oracle, "Also run the reference evaluator and compare");

  auto* dump = app.add_subcommand("dump", "Disassemble a program");
  dump->add_option("path", o.path, "Program file")->required();
  dump->add_option("--limit", o.limit, "Instructions to print");

  auto* grid = app.add_subcommand("grid", "Print the default parameter grid as JSON");
  grid->add_option("--scale-cap", o.scale_cap, "Drop sizes above this n");
  grid->add_option("--density-rule", o.density_rule, "eq3 (all densities) or max (1/w only)")
      ->check(CLI::IsMember({"eq3", "max"}));
  grid->add_option("--out", o.out, "Output file");

  auto* bench = app.add_subcommand("bench", "Time a parameter grid and write CSV measurements");
  bench->add_option("--grid", o.grid, "Grid JSON file")->required();
  bench->add_option("--families", o.families, "Families to run")->delimiter(',')->check(families);
  bench->add_option("--evaluators", o.evaluators, "Evaluators to time")->delimiter(',')->check(evaluators);
  bench->add_option("--repeats", o.repeats, "Repeats per cell")->check(CLI::PositiveNumber);
  bench->add_option("--out", o.out, "CSV output file (default stdout)");
  bench->add_flag("--append", o.append, "Append to an existing --out file");
  bench->add_option("--seed", o.seed, "Seed (default $BPW_SEED or 0)");
  bench->add_option("--programs", o.programs, "Write programs here and time them from disk");
  bench->add_option("--scale-cap", o.scale_cap, "Drop sizes above this n");

  auto* fit = app.add_subcommand("fit", "Fit the cost model and test the hypotheses");
  fit->add_option("--in", o.in, "Measurements (.csv or .json)")->required();
  fit->add_option("--out", o.out, "Write fits and outcomes as JSON");
  fit->add_option("--min-r2", o.min_r2, "Linearity threshold");
  fit->add_option("--tolerance", o.tolerance, "Monotonicity tolerance");
  fit->add_option("--lo", o.lo, "Lower separation bound");
  fit->add_option("--hi", o.hi, "Upper separation bound");
  fit->add_option("--max-cv", o.max_cv, "Largest accepted CV of R");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    if (code == 0) return kOk;
    const auto selected = app.get_subcommands();
    err << (selected.empty() ? app.help() : selected.front()->help());
    return kUsage;
  }

  try {
    if (gen->parsed()) return detail::cmd_gen(o, out);
    if (val->parsed()) return detail::cmd_validate(o, out);
    if (run_cmd->parsed()) return detail::cmd_run(o, ctx, out, err);
    if (dump->parsed()) return detail::cmd_dump(o, out);
    if (grid->parsed()) return detail::cmd_grid(o, out);
    if (bench->parsed()) return detail::cmd_bench(o, out, err);
    if (fit->parsed()) return detail::cmd_fit(o, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    const bool usage = detail::is_parse_error(e.code()) || detail::is_spec_error(e.code());
    return usage ? kUsage : kFailure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kFailure;
  }
  return kUsage;
}

inline int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
                   const Context& ctx = {}) {
  std::vector<const char*> argv{"bpw"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return run_cli(static_cast<int>(argv.size()), argv.data(), out, err, ctx);
}

}  // namespace bpw::cli
