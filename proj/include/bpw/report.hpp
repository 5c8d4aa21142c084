#pragma once

// CSV and JSON forms of measurements, fits, hypothesis outcomes and grids.
// Measurement files hold one record per line so they can be appended to.

#include <charconv>
#include <cstdint>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "bpw/bench.hpp"
#include "bpw/error.hpp"
#include "bpw/workloads.hpp"

namespace bpw {

inline constexpr std::string_view kCsvHeader = "family,n,w,d,seed,evaluator,repeat,runtime_s,gate_rate";

namespace detail {

/// Shortest text that reads back to the same double.
inline std::string format_double(double v) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

template <class T>
T parse_number(std::string_view s, std::string_view field) {
  T v{};
  const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (r.ec != std::errc{} || r.ptr != s.data() + s.size()) {
    throw Error(ErrorCode::BadRecord, "bad " + std::string(field) + ": '" + std::string(s) + "'");
  }
  return v;
}

inline std::string density_text(std::uint64_t d) { return d == 0 ? "0" : "1/" + std::to_string(d); }

inline std::uint64_t parse_density(std::string_view s) {
  if (s == "0") return 0;
  if (s.substr(0, 2) != "1/") throw Error(ErrorCode::BadRecord, "bad d: '" + std::string(s) + "'");
  return parse_number<std::uint64_t>(s.substr(2), "d");
}

inline Family parse_family(std::string_view s) {
  auto f = family_from_string(s);
  if (!f) throw Error(ErrorCode::BadRecord, "bad family: '" + std::string(s) + "'");
  return *f;
}

inline EvaluatorKind parse_evaluator(std::string_view s) {
  auto e = evaluator_from_string(s);
  if (!e) throw Error(ErrorCode::BadRecord, "bad evaluator: '" + std::string(s) + "'");
  return *e;
}

}  // namespace detail

inline void write_csv_header(std::ostream& os) { os << kCsvHeader << '\n'; }

inline void write_csv_row(std::ostream& os, const Measurement& m) {
  os << to_string(m.family) << ',' << m.n << ',' << m.w << ',' << detail::density_text(m.d) << ',' << m.seed << ','
     << to_string(m.evaluator) << ',' << m.repeat << ',' << detail::format_double(m.runtime_s) << ','
     << detail::format_double(m.gate_rate) << '\n';
}

inline void write_csv(std::ostream& os, std::span<const Measurement> ms) {
  write_csv_header(os);
  for (const Measurement& m : ms) write_csv_row(os, m);
}

inline Measurement parse_csv_row(std::string_view line) {
  std::vector<std::string_view> f;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    f.push_back(line.substr(start, comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  if (f.size() != 9) throw Error(ErrorCode::BadRecord, "expected 9 fields, got " + std::to_string(f.size()));
  Measurement m;
  m.family = detail::parse_family(f[0]);
  m.n = detail::parse_number<std::uint64_t>(f[1], "n");
  m.w = detail::parse_number<std::uint64_t>(f[2], "w");
  m.d = detail::parse_density(f[3]);
  m.seed = detail::parse_number<std::uint64_t>(f[4], "seed");
  m.evaluator = detail::parse_evaluator(f[5]);
  m.repeat = detail::parse_number<std::uint32_t>(f[6], "repeat");
  m.runtime_s = detail::parse_number<double>(f[7], "runtime_s");
  m.gate_rate = detail::parse_number<double>(f[8], "gate_rate");
  return m;
}

/// Reads a results file. Repeated header lines (from appended runs) and
/// blank lines are skipped.
inline std::vector<Measurement> read_csv(std::istream& is) {
  std::vector<Measurement> out;
  std::string line;
  std::uint64_t lineno = 0;
  bool seen_header = false;
  while (std::getline(is, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line == kCsvHeader) {
      seen_header = true;
      continue;
    }
    if (!seen_header) throw Error(ErrorCode::BadRecord, "missing header line");
    try {
      out.push_back(parse_csv_row(line));
    } catch (const Error& e) {
      throw Error(ErrorCode::BadRecord, "line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

inline nlohmann::ordered_json to_json(const Measurement& m) {
  return {{"family", to_string(m.family)},
          {"n", m.n},
          {"w", m.w},
          {"d", detail::density_text(m.d)},
          {"seed", m.seed},
          {"evaluator", to_string(m.evaluator)},
          {"repeat", m.repeat},
          {"runtime_s", m.runtime_s},
          {"gate_rate", m.gate_rate}};
}

/// A JSON array with one record per line.
inline void write_json(std::ostream& os, std::span<const Measurement> ms) {
  os << "[";
  for (std::size_t i = 0; i < ms.size(); ++i) os << (i ? ",\n" : "\n") << to_json(ms[i]).dump();
  os << "\n]\n";
}

inline std::vector<Measurement> read_json(std::istream& is) {
  std::vector<Measurement> out;
  try {
    const auto doc = nlohmann::json::parse(is);
    if (!doc.is_array()) throw Error(ErrorCode::BadRecord, "expected a JSON array");
    for (const auto& r : doc) {
      Measurement m;
      m.family = detail::parse_family(r.at("family").get<std::string>());
      m.n = r.at("n").get<std::uint64_t>();
      m.w = r.at("w").get<std::uint64_t>();
      m.d = detail::parse_density(r.at("d").get<std::string>());
      m.seed = r.at("seed").get<std::uint64_t>();
      m.evaluator = detail::parse_evaluator(r.at("evaluator").get<std::string>());
      m.repeat = r.at("repeat").get<std::uint32_t>();
      m.runtime_s = r.at("runtime_s").get<double>();
      m.gate_rate = r.at("gate_rate").get<double>();
      out.push_back(m);
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::BadRecord, e.what());
  }
  return out;
}

inline nlohmann::ordered_json to_json(const WidthSummary& s) {
  return {{"w", s.w}, {"per_gate_s", s.per_gate_s}, {"linearity_r2", s.linearity_r2}, {"sizes", s.sizes}};
}

inline nlohmann::ordered_json to_json(const CostFit& f) {
  nlohmann::ordered_json widths = nlohmann::ordered_json::array();
  for (const auto& s : f.widths) widths.push_back(to_json(s));
  return {{"alpha", f.alpha}, {"c", f.c}, {"r_squared", f.r_squared}, {"R", f.R}, {"widths", widths}};
}

inline nlohmann::ordered_json to_json(const HypothesisOutcome& h) {
  nlohmann::ordered_json th = nlohmann::ordered_json::object();
  for (const auto& [k, v] : h.thresholds) th[k] = v;
  nlohmann::ordered_json groups = nlohmann::ordered_json::array();
  for (const auto& g : h.groups) {
    nlohmann::ordered_json widths = nlohmann::ordered_json::array();
    for (const auto& s : g.widths) widths.push_back(to_json(s));
    nlohmann::ordered_json j = {{"family", to_string(g.family)},
                                {"evaluator", to_string(g.evaluator)},
                                {h.id == "H1" ? "separation" : "R", g.statistic}};
    if (h.id == "H1") {
      j["linear"] = g.linear;
      j["monotone"] = g.monotone;
      j["accepted"] = g.accepted;
    }
    j["widths"] = widths;
    groups.push_back(std::move(j));
  }
  nlohmann::ordered_json j = {{"id", h.id},
                              {"accepted", h.accepted},
                              {h.id == "H1" ? "min_separation" : "cv", h.statistic},
                              {"thresholds", th},
                              {"groups", groups}};
  if (!h.note.empty()) j["note"] = h.note;
  return j;
}

inline nlohmann::ordered_json to_json(const GridSpec& g) {
  nlohmann::ordered_json j = {{"widths", g.widths}, {"sizes", g.sizes}, {"density_rule", to_string(g.density_rule)}};
  j["scale_cap"] = g.scale_cap ? nlohmann::ordered_json(*g.scale_cap) : nlohmann::ordered_json(nullptr);
  nlohmann::ordered_json fam = nlohmann::ordered_json::array();
  for (Family f : g.families) fam.push_back(to_string(f));
  j["families"] = fam;
  return j;
}

inline GridSpec grid_from_json(std::string_view text) {
  try {
    const auto j = nlohmann::json::parse(text);
    GridSpec g;
    g.widths = j.at("widths").get<std::vector<std::uint64_t>>();
    g.sizes = j.at("sizes").get<std::vector<std::uint64_t>>();
    if (g.widths.empty() || g.sizes.empty()) throw Error(ErrorCode::InvalidSpec, "empty widths or sizes");
    for (auto w : g.widths) {
      if (w == 0) throw Error(ErrorCode::InvalidSpec, "width 0");
    }
    if (j.contains("density_rule")) {
      auto r = density_rule_from_string(j["density_rule"].get<std::string>());
      if (!r) throw Error(ErrorCode::InvalidSpec, "unknown density_rule");
      g.density_rule = *r;
    }
    if (j.contains("scale_cap") && !j["scale_cap"].is_null()) g.scale_cap = j["scale_cap"].get<std::uint64_t>();
    if (j.contains("families")) {
      g.families.clear();
      for (const auto& f : j["families"]) {
        auto fam = family_from_string(f.get<std::string>());
        if (!fam) throw Error(ErrorCode::InvalidSpec, "unknown family " + f.get<std::string>());
        g.families.push_back(*fam);
      }
    }
    return g;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidSpec, std::string("grid: ") + e.what());
  }
}

inline std::string read_text(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoFailure, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_text(const std::string& path, std::string_view text) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoFailure, "cannot create " + path);
  out << text;
  if (!out) throw Error(ErrorCode::IoFailure, "write failed: " + path);
}

}  // namespace bpw
