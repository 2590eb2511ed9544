#pragma once

// File formats: signal CSV, experiment config JSON, decomposition / report /
// benchmark serialization.

#include <charconv>
#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include <nlohmann/json.hpp>
#include "pendantss/bench.hpp"
#include "pendantss/errors.hpp"
#include "pendantss/metrics.hpp"
#include "pendantss/solver.hpp"

namespace pendantss {

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using json = nlohmann::json;

// ---------------------------------------------------------------------------
// CSV
// ---------------------------------------------------------------------------

/// Shortest round-trip scientific representation, locale-independent.
inline std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::scientific);
  return std::string(buf, res.ptr);
}

inline std::string signal_to_csv(std::span<const double> s) {
  std::string out = "index,value\n";
  for (std::size_t i = 0; i < s.size(); ++i) {
    out += std::to_string(i);
    out += ',';
    out += format_double(s[i]);
    out += '\n';
  }
  return out;
}

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

inline double parse_double(std::string_view s, std::size_t line) {
  s = trim(s);
  double v = 0.0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw IoError("CSV line " + std::to_string(line) + ": cannot parse number '" + std::string(s) + "'");
  return v;
}

}  // namespace detail

/// Accepts an optional `index,value` header, then rows `index,value` (or a
/// bare `value`). Indices must run 0, 1, 2, ...
inline Signal signal_from_csv(std::string_view text) {
  Signal out;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto eol = text.find('\n');
    std::string_view line = detail::trim(text.substr(0, eol));
    text.remove_prefix(eol == std::string_view::npos ? text.size() : eol + 1);
    ++line_no;
    if (line.empty()) continue;
    if (line_no == 1 && line == "index,value") continue;
    const auto comma = line.find(',');
    if (comma == std::string_view::npos) {
      out.push_back(detail::parse_double(line, line_no));
      continue;
    }
    if (line.find(',', comma + 1) != std::string_view::npos)
      throw IoError("CSV line " + std::to_string(line_no) + ": expected two columns");
    const double idx = detail::parse_double(line.substr(0, comma), line_no);
    if (idx != static_cast<double>(out.size()))
      throw IoError("CSV line " + std::to_string(line_no) + ": expected index " + std::to_string(out.size()));
    out.push_back(detail::parse_double(line.substr(comma + 1), line_no));
  }
  if (out.empty()) throw IoError("CSV: no samples");
  return out;
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_text_file(const std::string& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << content;
  if (!out) throw IoError("write failed for '" + path + "'");
}

inline Signal read_signal_csv(const std::string& path) {
  try {
    return signal_from_csv(read_text_file(path));
  } catch (const IoError& e) {
    throw IoError(path + ": " + e.what());
  }
}

inline void write_signal_csv(const std::string& path, std::span<const double> s) {
  write_text_file(path, signal_to_csv(s));
}

// ---------------------------------------------------------------------------
// JSON: configuration
// ---------------------------------------------------------------------------

namespace detail {

template <class T>
void read_key(const json& j, const char* key, T& dst, const std::string& path, bool required = false) {
  const std::string full = path.empty() ? key : path + "." + key;
  if (!j.contains(key) || j.at(key).is_null()) {
    if (required) throw ConfigError("missing required key '" + full + "'");
    return;
  }
  try {
    dst = j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError("key '" + full + "' has the wrong type");
  }
}

template <class T>
void read_key(const json& j, const char* key, std::optional<T>& dst, const std::string& path) {
  T v{};
  if (!j.contains(key) || j.at(key).is_null()) return;
  read_key(j, key, v, path);
  dst = v;
}

inline const json& object_at(const json& j, const char* key, const std::string& path) {
  const json& sub = j.at(key);
  if (!sub.is_object()) throw ConfigError("key '" + (path.empty() ? std::string(key) : path + "." + key) + "' must be an object");
  return sub;
}

}  // namespace detail

inline SpoqParams spoq_from_json(const json& j, SpoqParams out = {}, const std::string& path = "spoq") {
  detail::read_key(j, "p", out.p, path);
  detail::read_key(j, "q", out.q, path);
  detail::read_key(j, "alpha", out.alpha, path);
  detail::read_key(j, "beta", out.beta, path);
  detail::read_key(j, "eta", out.eta, path);
  detail::read_key(j, "lambda", out.lambda, path);
  return out;
}

inline json to_json(const SpoqParams& p) {
  return {{"p", p.p}, {"q", p.q}, {"alpha", p.alpha}, {"beta", p.beta}, {"eta", p.eta}, {"lambda", p.lambda}};
}

inline SolverConfig solver_from_json(const json& j, SolverConfig out = {}, const std::string& path = "solver") {
  detail::read_key(j, "gamma_s", out.gamma_s, path);
  detail::read_key(j, "gamma_pi", out.gamma_pi, path);
  detail::read_key(j, "theta", out.theta, path);
  detail::read_key(j, "max_tr_tests", out.max_tr_tests, path);
  detail::read_key(j, "epsilon", out.epsilon, path);
  detail::read_key(j, "k_max", out.k_max, path);
  return out;
}

inline json to_json(const SolverConfig& c) {
  json j = {{"gamma_s", c.gamma_s}, {"gamma_pi", c.gamma_pi}, {"theta", c.theta},
            {"max_tr_tests", c.max_tr_tests}, {"k_max", c.k_max}};
  j["epsilon"] = c.epsilon ? json(*c.epsilon) : json(nullptr);
  return j;
}

/// Parses an experiment document. Required keys: dataset_style,
/// noise_percent, base_seed. Everything else falls back to defaults.
inline ExperimentConfig experiment_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  ExperimentConfig c;
  std::string style;
  detail::read_key(j, "dataset_style", style, "", true);
  if (style == "C")
    c.dataset_style = DatasetStyle::C;
  else if (style == "D")
    c.dataset_style = DatasetStyle::D;
  else
    throw ConfigError("key 'dataset_style' must be \"C\" or \"D\"");
  detail::read_key(j, "noise_percent", c.noise_percent, "", true);
  detail::read_key(j, "base_seed", c.base_seed, "", true);
  detail::read_key(j, "realizations", c.realizations, "");
  if (j.contains("spoq")) c.spoq = spoq_from_json(detail::object_at(j, "spoq", ""), c.spoq);
  if (j.contains("solver")) c.solver = solver_from_json(detail::object_at(j, "solver", ""), c.solver);
  detail::read_key(j, "cutoff_bin", c.cutoff_bin, "");
  detail::read_key(j, "cutoff_candidates", c.cutoff_candidates, "");
  std::string rule;
  detail::read_key(j, "cutoff_rule", rule, "");
  if (rule == "largest_magnitude")
    c.cutoff_rule = CutoffRule::largest_magnitude;
  else if (!rule.empty() && rule != "first_bins")
    throw ConfigError("key 'cutoff_rule' must be \"first_bins\" or \"largest_magnitude\"");
  detail::read_key(j, "kernel_max_shift", c.kernel_max_shift, "");
  if (j.contains("generator")) {
    const json& g = detail::object_at(j, "generator", "");
    auto& o = c.generator;
    detail::read_key(g, "n", o.n, "generator");
    detail::read_key(g, "kernel_length", o.kernel_length, "generator");
    detail::read_key(g, "kernel_sigma", o.kernel_sigma, "generator");
    detail::read_key(g, "n_spikes", o.n_spikes, "generator");
    detail::read_key(g, "min_gap", o.min_gap, "generator");
    detail::read_key(g, "amp_low", o.amp_low, "generator");
    detail::read_key(g, "amp_high", o.amp_high, "generator");
    detail::read_key(g, "trend_amplitude", o.trend_amplitude, "generator");
    detail::read_key(g, "trend_max_bin", o.trend_max_bin, "generator");
  }
  if (j.contains("tuning")) {
    const json& t = detail::object_at(j, "tuning", "");
    detail::read_key(t, "lambda", c.tuning.lambda, "tuning");
    detail::read_key(t, "beta", c.tuning.beta, "tuning");
    detail::read_key(t, "eta", c.tuning.eta, "tuning");
    detail::read_key(t, "k_max", c.tuning.k_max, "tuning");
  }
  return c;
}


inline json to_json(const ExperimentConfig& c) {
  const auto& g = c.generator;
  json gen = {{"n", g.n},
              {"kernel_length", g.kernel_length},
              {"kernel_sigma", g.kernel_sigma},
              {"min_gap", g.min_gap},
              {"amp_low", g.amp_low},
              {"amp_high", g.amp_high},
              {"trend_amplitude", g.trend_amplitude},
              {"trend_max_bin", g.trend_max_bin}};
  gen["n_spikes"] = g.n_spikes ? json(*g.n_spikes) : json(nullptr);
  json j = {{"dataset_style", c.dataset_style == DatasetStyle::C ? "C" : "D"},
            {"noise_percent", c.noise_percent},
            {"realizations", c.realizations},
            {"base_seed", c.base_seed},
            {"spoq", to_json(c.spoq)},
            {"solver", to_json(c.solver)},
            {"cutoff_candidates", c.cutoff_candidates},
            {"cutoff_rule", c.cutoff_rule == CutoffRule::first_bins ? "first_bins" : "largest_magnitude"},
            {"kernel_max_shift", c.kernel_max_shift},
            {"generator", gen},
            {"tuning",
             {{"lambda", c.tuning.lambda}, {"beta", c.tuning.beta}, {"eta", c.tuning.eta}, {"k_max", c.tuning.k_max}}}};
  j["cutoff_bin"] = c.cutoff_bin ? json(*c.cutoff_bin) : json(nullptr);
  return j;
}

/// Inputs of a standalone solve. Read either from top-level keys
/// (n, kernel_length, cutoff_bin, spoq, solver) or from an experiment
/// document, where n and kernel_length live under "generator" and default
/// to the generator's values.
struct SolveParams {
  std::size_t n = 0;
  std::size_t kernel_length = 21;
  std::optional<std::size_t> cutoff_bin;
  SpoqParams spoq;
  SolverConfig solver;
};

inline SolveParams solve_params_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("params must be a JSON object");
  SolveParams p;
  if (j.contains("dataset_style") || j.contains("generator")) {
    // Experiment document: sizes default to the generator's.
    const GeneratorConfig defaults;
    p.n = defaults.n;
    p.kernel_length = defaults.kernel_length;
    if (j.contains("generator")) {
      const json& g = detail::object_at(j, "generator", "");
      detail::read_key(g, "n", p.n, "generator");
      detail::read_key(g, "kernel_length", p.kernel_length, "generator");
    }
  } else {
    detail::read_key(j, "n", p.n, "", true);
    detail::read_key(j, "kernel_length", p.kernel_length, "");
  }
  detail::read_key(j, "cutoff_bin", p.cutoff_bin, "");
  if (j.contains("spoq")) p.spoq = spoq_from_json(detail::object_at(j, "spoq", ""), p.spoq);
  if (j.contains("solver")) p.solver = solver_from_json(detail::object_at(j, "solver", ""), p.solver);
  return p;
}

inline json parse_json_file(const std::string& path) {
  try {
    return json::parse(read_text_file(path));
  } catch (const json::parse_error& e) {
    throw ConfigError(path + ": invalid JSON: " + e.what());
  }
}

inline ExperimentConfig read_experiment_config(const std::string& path) {
  return experiment_from_json(parse_json_file(path));
}

// ---------------------------------------------------------------------------
// JSON: results
// ---------------------------------------------------------------------------

inline json to_json(const Decomposition& d) {
  return {{"s_hat", d.s_hat},
          {"pi_hat", d.pi_hat.vec()},
          {"t_hat", d.t_hat},
          {"iterations", d.iterations},
          {"objective_trace", d.objective_trace},
          {"tr_tests_per_iter", d.tr_tests_per_iter},
          {"stop_reason", std::string(to_string(d.stop_reason))},
          {"recenter_shift", d.recenter_shift}};
}

inline json to_json(const MetricsReport& m) {
  return {{"snr_s", m.snr_s}, {"tsnr_s", m.tsnr_s}, {"snr_t", m.snr_t}, {"snr_pi", m.snr_pi}, {"composite", m.composite}};
}

inline json to_json(const SummaryStat& s) { return {{"mean", s.mean}, {"std", s.std}, {"n", s.n}}; }

inline json to_json(const BenchmarkSummary& s) {
  return {{"snr_s", to_json(s.snr_s)},   {"tsnr_s", to_json(s.tsnr_s)},       {"snr_t", to_json(s.snr_t)},
          {"snr_pi", to_json(s.snr_pi)}, {"composite", to_json(s.composite)}, {"failures", s.failures}};
}

/// realization,seed,snr_s,tsnr_s,snr_t,snr_pi,iterations,stop_reason
inline std::string benchmark_to_csv(const BenchmarkTable& t) {
  std::string out = "realization,seed,snr_s,tsnr_s,snr_t,snr_pi,iterations,stop_reason\n";
  for (const auto& r : t.rows) {
    out += std::to_string(r.realization) + ',' + std::to_string(r.seed) + ',';
    if (r.ok) {
      for (double v : {r.metrics.snr_s, r.metrics.tsnr_s, r.metrics.snr_t, r.metrics.snr_pi})
        out += format_double(v) + ',';
      out += std::to_string(r.iterations) + ',' + std::string(to_string(r.stop_reason));
    } else {
      out += "nan,nan,nan,nan," + std::to_string(r.iterations) + ",error";
    }
    out += '\n';
  }
  return out;
}

inline json to_json(const TuningResult& t) {
  json board = json::array();
  for (const auto& g : t.scoreboard) {
    json row = {{"lambda", g.spoq.lambda}, {"beta", g.spoq.beta}, {"eta", g.spoq.eta},
                {"k_max", g.k_max},        {"ok", g.ok}};
    if (g.ok) row["metrics"] = to_json(g.metrics);
    if (!g.error.empty()) row["error"] = g.error;
    board.push_back(row);
  }
  json cutoffs = json::array();
  for (const auto& c : t.cutoff_scores) {
    json row = {{"cutoff_bin", c.cutoff_bin}, {"ok", c.ok}};
    if (c.ok) row["metrics"] = to_json(c.metrics);
    if (!c.error.empty()) row["error"] = c.error;
    cutoffs.push_back(row);
  }
  return {{"selected",
           {{"lambda", t.spoq.lambda},
            {"beta", t.spoq.beta},
            {"eta", t.spoq.eta},
            {"cutoff_bin", t.cutoff_bin},
            {"k_max", t.k_max}}},
          {"spoq", to_json(t.spoq)},
          {"scoreboard", board},
          {"cutoff_scores", cutoffs}};
}

}  // namespace pendantss
