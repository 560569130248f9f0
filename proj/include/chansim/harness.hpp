#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "chansim/channel.hpp"
#include "chansim/errors.hpp"
#include "chansim/exponents.hpp"
#include "chansim/parallel.hpp"
#include "chansim/protocol.hpp"

namespace chansim {

struct ExperimentConfig {
  std::string channel_spec = "bsc:0.1";  // preset, or "file:<path>"
  double alpha = 2.0;                    // measured divergence order
  double rate = 0.5;                     // communication rate target r
  int n_min = 4;
  int n_max = 8;
  std::string scheme = "rf";  // rf | sc | uniform
  double s = 1.0;             // rf proposal order parameter
  double delta = 0.05;        // sc budget slack (bits)
  std::uint64_t seed = 1234;
  double tol = 1e-6;
  std::string output_path;
  std::string format = "csv";  // csv | jsonl

  Channel channel() const {
    if (channel_spec.rfind("file:", 0) == 0)
      return Channel::from_file(channel_spec.substr(5));
    return Channel::parse(channel_spec);
  }

  static ExperimentConfig from_json(const nlohmann::json& j) {
    ExperimentConfig c;
    if (j.contains("channel")) c.channel_spec = j["channel"];
    if (j.contains("alpha")) {
      if (j["alpha"].is_string())
        c.alpha = std::numeric_limits<double>::infinity();
      else
        c.alpha = j["alpha"].get<double>();
    }
    if (j.contains("rate")) c.rate = j["rate"];
    if (j.contains("n_min")) c.n_min = j["n_min"];
    if (j.contains("n_max")) c.n_max = j["n_max"];
    if (j.contains("scheme")) c.scheme = j["scheme"];
    if (j.contains("s")) c.s = j["s"];
    if (j.contains("delta")) c.delta = j["delta"];
    if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("tol")) c.tol = j["tol"];
    if (j.contains("out")) c.output_path = j["out"];
    if (j.contains("format")) c.format = j["format"];
    return c;
  }
};

struct ExperimentRecord {
  int n = 0;
  double c_bits = 0.0;
  double rate = 0.0;
  double alpha = 0.0;
  double d_value_bits = 0.0;
  double bound_lower = 0.0;
  double bound_upper = 0.0;
  double theory_exponent = 0.0;
};

struct ExperimentReport {
  std::vector<ExperimentRecord> records;  // sorted by n
  double slope = 0.0;
  double slope_residual = 0.0;
  double theory_exponent = 0.0;
  std::string verdict;
  std::vector<std::string> warnings;
};

namespace detail {

// Least-squares slope of y against n over the last ceil(half) records,
// which trims the O(log n / n) head of the range.
inline std::pair<double, double> fit_tail_slope(
    const std::vector<std::pair<int, double>>& points) {
  const std::size_t keep = (points.size() + 1) / 2;
  const std::size_t from = points.size() - keep;
  double sn = 0, sy = 0, snn = 0, sny = 0;
  for (std::size_t i = from; i < points.size(); ++i) {
    sn += points[i].first;
    sy += points[i].second;
    snn += static_cast<double>(points[i].first) * points[i].first;
    sny += points[i].first * points[i].second;
  }
  const double m = static_cast<double>(keep);
  const double denom = m * snn - sn * sn;
  if (denom <= 0.0) return {0.0, 0.0};
  const double slope = (m * sny - sn * sy) / denom;
  const double icept = (sy - slope * sn) / m;
  double rss = 0.0;
  for (std::size_t i = from; i < points.size(); ++i) {
    const double e = points[i].second - (slope * points[i].first + icept);
    rss += e * e;
  }
  return {slope, std::sqrt(rss / m)};
}

inline SimulationScheme build_config_scheme(const ExperimentConfig& cfg,
                                            const Channel& w, int n) {
  if (cfg.scheme == "rf") return build_rf_scheme(w, n, cfg.rate, cfg.s);
  if (cfg.scheme == "sc")
    return build_sc_scheme(w, n, cfg.rate, cfg.alpha, cfg.delta);
  if (cfg.scheme == "uniform") return build_uniform_fallback(w, n);
  throw Error("unknown scheme kind '" + cfg.scheme + "'");
}

// Achievable upper bound on the block divergence of an rf scheme, using
// the certified minimax radius of the scheme's own proposal so the bound
// stays valid even when the proposal is 1e-8 off the exact minimizer.
inline double rf_upper_bound(const Channel& w, const RateAboveParams& ra,
                             int n) {
  double radius = 0.0;  // max_x D_{1+s}(W_x || q)
  const RenyiOrder order = std::isinf(ra.s)
                               ? RenyiOrder::infinity()
                               : RenyiOrder::from_alpha(1.0 + ra.s);
  for (int x = 0; x < w.input_size(); ++x) {
    const auto terms = detail::make_terms(w.row(x), ra.proposal.probs());
    const double d = renyi_divergence_terms(terms, order).as_double();
    radius = std::max(radius, d);
  }
  const double log2_n_budget = std::log2(double(ra.n_budget));
  const double slack = log2_n_budget - n * radius;  // log N - D(W^n||Q^n)
  double log2_excl;                                 // exp{-s(logN - D)}
  if (std::isinf(ra.s)) {
    log2_excl = slack >= 0.0 ? kNegInf : 0.0;
  } else {
    log2_excl = -ra.s * slack;
  }
  if (log2_excl >= 0.0) return std::numeric_limits<double>::infinity();
  // p <= (1 - (1 - excl)/N)^{N~}
  const double one_minus_over_n =
      log2_one_minus_exp2(log2_excl) - log2_n_budget;
  const double log2_p = log2_pow_one_minus_exp2(
      std::min(one_minus_over_n, 0.0), double(ra.iteration_cap));
  const double p = std::exp2(log2_p);
  const double tail = p >= 1.0 ? std::numeric_limits<double>::infinity()
                               : p / ((1.0 - p) * kLn2);
  if (std::isinf(ra.s)) return tail;
  return std::exp2(log2_excl) / (ra.s * kLn2) + tail;
}

}  // namespace detail

// Builds the configured scheme at every n, evaluates the exact block
// divergence, audits the one-shot converse bound, and fits the decay slope
// of -log2 D against n.
inline ExperimentReport run_rf_experiment(const ExperimentConfig& cfg) {
  const Channel w = cfg.channel();
  const RenyiOrder order = RenyiOrder::from_alpha(cfg.alpha);
  ExperimentReport rep;
  const int count = cfg.n_max - cfg.n_min + 1;
  if (count <= 0) throw Error("run_rf_experiment: empty n range");

  rep.theory_exponent =
      reliability_function(w, cfg.rate, order).value.as_double();

  struct PerN {
    bool ok = false;
    std::string warning;
    ExperimentRecord rec;
  };
  const auto rows = parallel_map<PerN>(
      count, std::function<PerN(int)>([&](int idx) {
        const int n = cfg.n_min + idx;
        PerN out;
        try {
          const SimulationScheme scheme =
              detail::build_config_scheme(cfg, w, n);
          ExperimentRecord r;
          r.n = n;
          r.c_bits = scheme.communication_bits();
          r.rate = cfg.rate;
          r.alpha = cfg.alpha;
          r.d_value_bits =
              simulation_performance(w, scheme, order).as_double();
          r.bound_lower = one_shot_converse_bound(w, r.c_bits, order, n);
          r.bound_upper = std::numeric_limits<double>::infinity();
          if (const auto* ra =
                  std::get_if<RateAboveParams>(&scheme.kind()))
            r.bound_upper = detail::rf_upper_bound(w, *ra, n);
          r.theory_exponent = rep.theory_exponent;
          out.rec = r;
          out.ok = true;
        } catch (const InfeasibleError& e) {
          out.warning = "n=" + std::to_string(n) + ": skipped (" +
                        e.what() + ")";
        }
        return out;
      }));

  bool gate_violated = false;
  for (const auto& row : rows) {
    if (!row.ok) {
      rep.warnings.push_back(row.warning);
      continue;
    }
    rep.records.push_back(row.rec);
    if (row.rec.d_value_bits < row.rec.bound_lower - 1e-9)
      gate_violated = true;
  }
  if (rep.records.empty())
    throw InfeasibleError("run_rf_experiment: no feasible blocklength");

  bool exact = true;
  std::vector<std::pair<int, double>> pts;
  for (const auto& r : rep.records) {
    if (r.d_value_bits > 1e-9) exact = false;
    if (r.d_value_bits > 0.0)
      pts.emplace_back(r.n, -std::log2(r.d_value_bits));
  }
  if (pts.size() >= 2) {
    const auto [slope, resid] = detail::fit_tail_slope(pts);
    rep.slope = slope;
    rep.slope_residual = resid;
  }
  if (gate_violated)
    rep.verdict = "gate-violation";
  else if (exact)
    rep.verdict = "exact-regime";
  else if (rep.slope <= 0.0)
    rep.verdict = "no-decay";
  else
    rep.verdict = "decay";
  return rep;
}

// Per-n converse audit: exact block divergence against the one-shot
// converse bound (hard gate), and the linear-growth trend (1/n) D against
// the strong-converse exponent.
inline ExperimentReport run_sc_audit(const ExperimentConfig& cfg) {
  const Channel w = cfg.channel();
  const RenyiOrder order = RenyiOrder::from_alpha(cfg.alpha);
  ExperimentReport rep;
  const int count = cfg.n_max - cfg.n_min + 1;
  if (count <= 0) throw Error("run_sc_audit: empty n range");

  rep.theory_exponent =
      strong_converse_exponent(w, cfg.rate, order).value.as_double();

  struct PerN {
    bool ok = false;
    std::string warning;
    ExperimentRecord rec;
  };
  const auto rows = parallel_map<PerN>(
      count, std::function<PerN(int)>([&](int idx) {
        const int n = cfg.n_min + idx;
        PerN out;
        try {
          const SimulationScheme scheme =
              detail::build_config_scheme(cfg, w, n);
          ExperimentRecord r;
          r.n = n;
          r.c_bits = scheme.communication_bits();
          r.rate = cfg.rate;
          r.alpha = cfg.alpha;
          r.d_value_bits =
              simulation_performance(w, scheme, order).as_double();
          r.bound_lower = one_shot_converse_bound(w, r.c_bits, order, n);
          r.bound_upper = std::numeric_limits<double>::infinity();
          r.theory_exponent = rep.theory_exponent;
          out.rec = r;
          out.ok = true;
        } catch (const InfeasibleError& e) {
          out.warning = "n=" + std::to_string(n) + ": skipped (" +
                        e.what() + ")";
        }
        return out;
      }));

  bool gate_violated = false;
  for (const auto& row : rows) {
    if (!row.ok) {
      rep.warnings.push_back(row.warning);
      continue;
    }
    rep.records.push_back(row.rec);
    if (row.rec.d_value_bits < row.rec.bound_lower - 1e-9)
      gate_violated = true;
  }
  if (rep.records.empty())
    throw InfeasibleError("run_sc_audit: no feasible blocklength");

  // Linear-growth slope: D_n against n.
  std::vector<std::pair<int, double>> pts;
  for (const auto& r : rep.records) pts.emplace_back(r.n, r.d_value_bits);
  if (pts.size() >= 2) {
    const auto [slope, resid] = detail::fit_tail_slope(pts);
    rep.slope = slope;
    rep.slope_residual = resid;
  }
  rep.verdict = gate_violated ? "gate-violation" : "audited";
  return rep;
}

// ---------------------------------------------------------------------------
// Report emission: CSV and JSON-lines carry identical content, 12
// significant digits, '.' decimal, LF newlines.

enum class ReportFormat { kCsv, kJsonLines };

inline ReportFormat parse_format(const std::string& name) {
  if (name == "csv") return ReportFormat::kCsv;
  if (name == "jsonl" || name == "json-lines") return ReportFormat::kJsonLines;
  throw Error("unknown report format '" + name + "'");
}

namespace detail {

inline std::string format_sig12(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v,
                                 std::chars_format::general, 12);
  return std::string(buf, res.ptr);
}

inline double parse_double(const std::string& s) {
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  return std::stod(s);
}

}  // namespace detail

inline constexpr const char* kReportCsvHeader =
    "n,c_bits,rate,alpha,D_value_bits,bound_lower,bound_upper,"
    "theory_exponent,slope,verdict";

inline std::string render_report(const ExperimentReport& rep,
                                 ReportFormat format) {
  std::ostringstream out;
  if (format == ReportFormat::kCsv) {
    out << kReportCsvHeader << "\n";
    for (const auto& r : rep.records) {
      out << r.n << ',' << detail::format_sig12(r.c_bits) << ','
          << detail::format_sig12(r.rate) << ','
          << detail::format_sig12(r.alpha) << ','
          << detail::format_sig12(r.d_value_bits) << ','
          << detail::format_sig12(r.bound_lower) << ','
          << detail::format_sig12(r.bound_upper) << ','
          << detail::format_sig12(r.theory_exponent) << ','
          << detail::format_sig12(rep.slope) << ',' << rep.verdict << "\n";
    }
    return out.str();
  }
  for (const auto& r : rep.records) {
    nlohmann::json j;
    j["n"] = r.n;
    j["c_bits"] = detail::format_sig12(r.c_bits);
    j["rate"] = detail::format_sig12(r.rate);
    j["alpha"] = detail::format_sig12(r.alpha);
    j["D_value_bits"] = detail::format_sig12(r.d_value_bits);
    j["bound_lower"] = detail::format_sig12(r.bound_lower);
    j["bound_upper"] = detail::format_sig12(r.bound_upper);
    j["theory_exponent"] = detail::format_sig12(r.theory_exponent);
    j["slope"] = detail::format_sig12(rep.slope);
    j["verdict"] = rep.verdict;
    out << j.dump() << "\n";
  }
  return out.str();
}

inline void export_report(const ExperimentReport& rep, const std::string& path,
                          ReportFormat format) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("export_report: cannot open " + path);
  out << render_report(rep, format);
  if (!out) throw Error("export_report: write failed for " + path);
}

// Parses a rendered report back; inverse of render_report for the record
// table, slope and verdict.
inline ExperimentReport parse_report(const std::string& text,
                                     ReportFormat format) {
  ExperimentReport rep;
  std::istringstream in(text);
  std::string line;
  if (format == ReportFormat::kCsv) {
    if (!std::getline(in, line) || line != kReportCsvHeader)
      throw Error("parse_report: bad CSV header");
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      std::istringstream ls(line);
      std::string cell;
      std::vector<std::string> cells;
      while (std::getline(ls, cell, ',')) cells.push_back(cell);
      if (cells.size() != 10) throw Error("parse_report: bad CSV row");
      ExperimentRecord r;
      r.n = std::stoi(cells[0]);
      r.c_bits = detail::parse_double(cells[1]);
      r.rate = detail::parse_double(cells[2]);
      r.alpha = detail::parse_double(cells[3]);
      r.d_value_bits = detail::parse_double(cells[4]);
      r.bound_lower = detail::parse_double(cells[5]);
      r.bound_upper = detail::parse_double(cells[6]);
      r.theory_exponent = detail::parse_double(cells[7]);
      rep.slope = detail::parse_double(cells[8]);
      rep.verdict = cells[9];
      rep.records.push_back(r);
    }
    return rep;
  }
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const nlohmann::json j = nlohmann::json::parse(line);
    ExperimentRecord r;
    r.n = j.at("n").get<int>();
    r.c_bits = detail::parse_double(j.at("c_bits"));
    r.rate = detail::parse_double(j.at("rate"));
    r.alpha = detail::parse_double(j.at("alpha"));
    r.d_value_bits = detail::parse_double(j.at("D_value_bits"));
    r.bound_lower = detail::parse_double(j.at("bound_lower"));
    r.bound_upper = detail::parse_double(j.at("bound_upper"));
    r.theory_exponent = detail::parse_double(j.at("theory_exponent"));
    rep.slope = detail::parse_double(j.at("slope"));
    rep.verdict = j.at("verdict").get<std::string>();
    rep.records.push_back(r);
  }
  return rep;
}

}  // namespace chansim
