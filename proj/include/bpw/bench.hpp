#pragma once

// Timing harness, cost-model fit and the two runtime hypotheses.
//
// Analysis works on cell medians: measurements sharing (family, evaluator,
// n, w, d, seed) are reduced to the median runtime over repeats. Sizes are
// compared by class round(log10 n), since generated programs round n.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "bpw/bits.hpp"
#include "bpw/error.hpp"
#include "bpw/format.hpp"
#include "bpw/rng.hpp"
#include "bpw/stats.hpp"
#include "bpw/validate.hpp"
#include "bpw/vm.hpp"
#include "bpw/workloads.hpp"

namespace bpw {

struct Measurement {
  Family family = Family::RandomNand;
  std::uint64_t n = 0;  // instructions in the program, COPY included
  std::uint64_t w = 0;
  std::uint64_t d = 0;  // density denominator; 0 when the family has none
  std::uint64_t seed = 0;
  EvaluatorKind evaluator = EvaluatorKind::Bytewise;
  std::uint32_t repeat = 0;
  double runtime_s = 0.0;
  double gate_rate = 0.0;  // n / runtime_s

  friend bool operator==(const Measurement&, const Measurement&) = default;
};

/// n * w^alpha. alpha = 1 is the power-limited n*w model.
inline double cost_metric(double n, double w, double alpha = 0.5) { return n * std::pow(w, alpha); }

/// What a program file does not record about its own origin.
struct WorkloadTag {
  Family family = Family::RandomNand;
  std::uint64_t d = 0;
  std::uint64_t seed = 0;
};

using Loader = std::function<Program()>;

struct TimedRuns {
  std::vector<Measurement> measurements;
  std::vector<Bits> outputs;  // parallel to measurements
};

/// Loads and validates the program once, then times each evaluation alone.
/// Repeat r draws fresh inputs from Rng(seed).split(r); every evaluator sees
/// the same inputs for a given repeat. BYTEWISE runs with per-read checks,
/// BITPACKED without them (the program has just validated clean).
inline TimedRuns time_run(const Loader& load, const WorkloadTag& tag, std::span<const EvaluatorKind> evaluators,
                          unsigned repeats) {
  using Clock = std::chrono::steady_clock;
  if constexpr (!Clock::is_steady) throw Error(ErrorCode::ClockUnavailable, "no monotonic clock");
  if (repeats == 0) throw Error(ErrorCode::InvalidSpec, "repeats must be at least 1");

  const Program p = load();
  const ValidationReport report = validate(p);
  if (!report.ok) {
    throw Error(ErrorCode::ValidationFailed, report.violations.front().message);
  }

  TimedRuns out;
  for (unsigned r = 0; r < repeats; ++r) {
    Rng rng = Rng(tag.seed).split(r);
    const Bits inputs = random_bits(rng, p.header.a);
    for (EvaluatorKind e : evaluators) {
      const RunOptions opts{.checked = e == EvaluatorKind::Bytewise};
      const auto t0 = Clock::now();
      EvaluationResult res = run(p, inputs, e, opts);
      const auto t1 = Clock::now();
      const double s = std::chrono::duration<double>(t1 - t0).count();
      if (!(s > 0.0)) throw Error(ErrorCode::ClockUnavailable, "clock did not advance");
      Measurement m;
      m.family = tag.family;
      m.n = p.header.n;
      m.w = p.header.w;
      m.d = tag.d;
      m.seed = tag.seed;
      m.evaluator = e;
      m.repeat = r;
      m.runtime_s = s;
      m.gate_rate = static_cast<double>(p.header.n) / s;
      out.measurements.push_back(m);
      out.outputs.push_back(std::move(res.outputs));
    }
  }
  return out;
}

inline TimedRuns time_run(const std::filesystem::path& file, const WorkloadTag& tag,
                          std::span<const EvaluatorKind> evaluators, unsigned repeats) {
  return time_run([&] { return load_program(file); }, tag, evaluators, repeats);
}

struct BenchOptions {
  std::vector<EvaluatorKind> evaluators{EvaluatorKind::Bytewise, EvaluatorKind::Bitpacked};
  unsigned repeats = 5;
  /// When set, programs are written here as .bpw files and timed from disk.
  std::optional<std::filesystem::path> program_dir;
};

/// Runs the cells one at a time and hands each measurement to `sink` as soon
/// as its cell finishes.
inline void run_grid(const std::vector<WorkloadSpec>& cells, const BenchOptions& opts,
                     const std::function<void(const Measurement&)>& sink, std::ostream* progress = nullptr) {
  std::size_t done = 0;
  for (const WorkloadSpec& spec : cells) {
    const WorkloadTag tag{spec.family, spec.density_denominator, spec.seed};
    TimedRuns runs;
    if (opts.program_dir) {
      Program p = generate(spec);
      const auto path = *opts.program_dir / workload_filename(spec, p.header.n);
      save_program(path, p);
      p = Program{};
      runs = time_run(path, tag, opts.evaluators, opts.repeats);
    } else {
      runs = time_run([&] { return generate(spec); }, tag, opts.evaluators, opts.repeats);
    }
    for (const Measurement& m : runs.measurements) sink(m);
    ++done;
    if (progress) {
      *progress << "[" << done << "/" << cells.size() << "] " << to_string(spec.family) << " w=" << spec.w
                << " n=" << runs.measurements.front().n;
      if (spec.density_denominator) *progress << " d=1/" << spec.density_denominator;
      *progress << "\n" << std::flush;
    }
  }
}

// ---------------------------------------------------------------------------
// Analysis

struct Cell {
  Family family;
  EvaluatorKind evaluator;
  std::uint64_t n, w, d, seed;
  double runtime_s;  // median over repeats

  double per_gate() const { return runtime_s / static_cast<double>(n); }
};

inline int size_class(std::uint64_t n) { return static_cast<int>(std::lround(std::log10(static_cast<double>(n)))); }

inline std::vector<Cell> cell_medians(std::span<const Measurement> ms) {
  using Key = std::tuple<Family, EvaluatorKind, std::uint64_t, std::uint64_t, std::uint64_t, std::uint64_t>;
  std::map<Key, std::vector<double>> groups;
  for (const Measurement& m : ms) groups[{m.family, m.evaluator, m.w, m.n, m.d, m.seed}].push_back(m.runtime_s);
  std::vector<Cell> cells;
  for (auto& [k, times] : groups) {
    const auto& [family, evaluator, w, n, d, seed] = k;
    cells.push_back({family, evaluator, n, w, d, seed, stats::median(times)});
  }
  return cells;
}

struct GroupKey {
  Family family;
  EvaluatorKind evaluator;
  auto operator<=>(const GroupKey&) const = default;
};

inline std::map<GroupKey, std::vector<Cell>> group_cells(std::span<const Measurement> ms) {
  std::map<GroupKey, std::vector<Cell>> out;
  for (const Cell& c : cell_medians(ms)) out[{c.family, c.evaluator}].push_back(c);
  return out;
}

struct WidthSummary {
  std::uint64_t w = 0;
  double per_gate_s = 0.0;    // mean over cells of median runtime / n
  double linearity_r2 = 0.0;  // runtime against n over this width's cells
  std::size_t sizes = 0;      // distinct size classes
};

namespace detail {

inline std::map<std::uint64_t, std::vector<Cell>> by_width(std::span<const Cell> cells) {
  std::map<std::uint64_t, std::vector<Cell>> out;
  for (const Cell& c : cells) out[c.w].push_back(c);
  return out;
}

inline WidthSummary summarize_width(std::uint64_t w, const std::vector<Cell>& cells) {
  WidthSummary s;
  s.w = w;
  std::vector<double> n, t, pg;
  std::set<int> sizes;
  for (const Cell& c : cells) {
    n.push_back(static_cast<double>(c.n));
    t.push_back(c.runtime_s);
    pg.push_back(c.per_gate());
    sizes.insert(size_class(c.n));
  }
  s.per_gate_s = stats::mean(pg);
  s.sizes = sizes.size();
  s.linearity_r2 = sizes.size() >= 2 ? stats::ols(n, t).r_squared : 0.0;
  return s;
}

/// Mean over size classes shared by the two widths of the ratio of mean
/// per-gate times, wide over narrow.
inline std::optional<double> width_ratio(const std::vector<Cell>& narrow, const std::vector<Cell>& wide) {
  std::map<int, std::vector<double>> a, b;
  for (const Cell& c : narrow) a[size_class(c.n)].push_back(c.per_gate());
  for (const Cell& c : wide) b[size_class(c.n)].push_back(c.per_gate());
  std::vector<double> ratios;
  for (const auto& [cls, pg] : a) {
    auto it = b.find(cls);
    if (it != b.end()) ratios.push_back(stats::mean(it->second) / stats::mean(pg));
  }
  if (ratios.empty()) return std::nullopt;
  return stats::mean(ratios);
}

}  // namespace detail

struct CostFit {
  double alpha = 0.0;
  double c = 0.0;
  double r_squared = 0.0;
  double R = 0.0;  // per-gate time at the widest width over that at the narrowest
  std::vector<WidthSummary> widths;
};

/// Fits t = c n w^alpha by least squares of per-width mean log(t/n) on log w.
inline CostFit fit_alpha(std::span<const Measurement> ms) {
  const std::vector<Cell> cells = cell_medians(ms);
  const auto widths = detail::by_width(cells);
  if (widths.size() < 3) {
    throw Error(ErrorCode::InsufficientSpan, std::to_string(widths.size()) + " distinct widths, need 3");
  }
  CostFit fit;
  std::vector<double> x, y;
  for (const auto& [w, wc] : widths) {
    std::vector<double> logs;
    for (const Cell& c : wc) logs.push_back(std::log(c.per_gate()));
    x.push_back(std::log(static_cast<double>(w)));
    y.push_back(stats::mean(logs));
    fit.widths.push_back(detail::summarize_width(w, wc));
  }
  const stats::LinearFit lf = stats::ols(x, y);
  fit.alpha = lf.slope;
  fit.c = std::exp(lf.intercept);
  fit.r_squared = lf.r_squared;
  const auto ratio = detail::width_ratio(widths.begin()->second, widths.rbegin()->second);
  if (!ratio) throw Error(ErrorCode::InsufficientSpan, "narrowest and widest widths share no size");
  fit.R = *ratio;
  return fit;
}

struct H1Thresholds {
  double min_linearity_r2 = 0.98;
  double monotone_tolerance = 0.10;
  /// Grid extremes the separation bounds scale with; defaults to the measured ones.
  std::optional<std::uint64_t> grid_w_min, grid_w_max;
  /// Explicit separation bounds; default sqrt(w_max / w_min) / 10 and * 10.
  std::optional<double> lo, hi;
};

struct H2Thresholds {
  double max_cv = 0.5;
};

struct GroupOutcome {
  Family family = Family::RandomNand;
  EvaluatorKind evaluator = EvaluatorKind::Bytewise;
  double statistic = 0.0;  // H1: separation S; H2: R
  bool linear = true;
  bool monotone = true;
  bool accepted = true;
  std::vector<WidthSummary> widths;
};

struct HypothesisOutcome {
  std::string id;
  bool accepted = false;
  double statistic = 0.0;  // H1: smallest S over groups; H2: CV of R
  std::vector<std::pair<std::string, double>> thresholds;
  std::vector<GroupOutcome> groups;
  std::string note;
};

/// Per (family, evaluator): runtime linear in n at every width, mean per-gate
/// time nondecreasing in w within tolerance, and separation S between the
/// extreme widths inside the bounds. Accepted iff every group passes.
inline HypothesisOutcome hypothesis1(std::span<const Measurement> ms, const H1Thresholds& th = {}) {
  const auto groups = group_cells(ms);
  if (groups.empty()) throw Error(ErrorCode::InsufficientSpan, "no measurements");
  HypothesisOutcome out;
  out.id = "H1";
  out.accepted = true;
  out.statistic = std::numeric_limits<double>::infinity();
  double lo = 0.0, hi = 0.0;
  for (const auto& [key, cells] : groups) {
    const auto widths = detail::by_width(cells);
    const std::uint64_t w_min = widths.begin()->first, w_max = widths.rbegin()->first;
    if (widths.size() < 2) throw Error(ErrorCode::InsufficientSpan, "one width only");
    if ((th.grid_w_min && *th.grid_w_min != w_min) || (th.grid_w_max && *th.grid_w_max != w_max)) {
      throw Error(ErrorCode::InsufficientSpan, "measurements do not reach the grid's extreme widths");
    }
    const double span = std::sqrt(static_cast<double>(w_max) / static_cast<double>(w_min));
    lo = th.lo.value_or(span / 10.0);
    hi = th.hi.value_or(span * 10.0);

    GroupOutcome g;
    g.family = key.family;
    g.evaluator = key.evaluator;
    for (const auto& [w, wc] : widths) {
      WidthSummary s = detail::summarize_width(w, wc);
      if (s.sizes < 2) {
        throw Error(ErrorCode::InsufficientSpan, "width " + std::to_string(w) + " has one size only");
      }
      if (s.linearity_r2 < th.min_linearity_r2) g.linear = false;
      if (!g.widths.empty() && s.per_gate_s < (1.0 - th.monotone_tolerance) * g.widths.back().per_gate_s) {
        g.monotone = false;
      }
      g.widths.push_back(s);
    }
    const auto ratio = detail::width_ratio(widths.begin()->second, widths.rbegin()->second);
    if (!ratio) throw Error(ErrorCode::InsufficientSpan, "extreme widths share no size");
    g.statistic = *ratio;
    g.accepted = g.linear && g.monotone && lo <= g.statistic && g.statistic <= hi;
    out.accepted = out.accepted && g.accepted;
    out.statistic = std::min(out.statistic, g.statistic);
    out.groups.push_back(std::move(g));
  }
  out.thresholds = {{"min_linearity_r2", th.min_linearity_r2},
                    {"monotone_tolerance", th.monotone_tolerance},
                    {"separation_lo", lo},
                    {"separation_hi", hi}};
  return out;
}

/// R per (family, evaluator) group; accepted iff the coefficient of variation
/// of R across groups is at most the threshold.
inline HypothesisOutcome hypothesis2(std::span<const Measurement> ms, const H2Thresholds& th = {}) {
  const auto groups = group_cells(ms);
  if (groups.size() < 2) {
    throw Error(ErrorCode::InsufficientSpan, std::to_string(groups.size()) + " group(s), need 2");
  }
  HypothesisOutcome out;
  out.id = "H2";
  std::vector<double> rs;
  for (const auto& [key, cells] : groups) {
    const auto widths = detail::by_width(cells);
    if (widths.size() < 2) throw Error(ErrorCode::InsufficientSpan, "one width only");
    const auto ratio = detail::width_ratio(widths.begin()->second, widths.rbegin()->second);
    if (!ratio) throw Error(ErrorCode::InsufficientSpan, "extreme widths share no size");
    GroupOutcome g;
    g.family = key.family;
    g.evaluator = key.evaluator;
    g.statistic = *ratio;
    for (const auto& [w, wc] : widths) g.widths.push_back(detail::summarize_width(w, wc));
    rs.push_back(*ratio);
    out.groups.push_back(std::move(g));
  }
  out.statistic = stats::cv(rs);
  out.accepted = out.statistic <= th.max_cv;
  out.thresholds = {{"max_cv", th.max_cv}};
  out.note = "CV threshold stands in for an unspecified significance test";
  return out;
}

}  // namespace bpw
