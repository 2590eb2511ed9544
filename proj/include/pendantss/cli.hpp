#pragma once

// Command-line front end: synth, solve, bench, tune.
//
// Exit codes: 0 success (any stop reason), 2 configuration or dimension
// error, 3 numeric failure, 4 I/O error.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include "pendantss/bench.hpp"
#include "pendantss/errors.hpp"
#include "pendantss/highpass.hpp"
#include "pendantss/io.hpp"
#include "pendantss/random.hpp"
#include "pendantss/solver.hpp"

namespace pendantss::cli {

enum ExitCode : int { kOk = 0, kConfigError = 2, kNumericFailure = 3, kIoError = 4 };

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<double> p;
  std::optional<double> q;
  std::optional<std::size_t> fc;
  unsigned jobs = 1;
};

namespace detail {

inline void ensure_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory '" + dir.string() + "': " + ec.message());
}

inline void write_json(const std::filesystem::path& path, const json& j) {
  write_text_file(path.string(), j.dump(2) + "\n");
}

inline void apply_spoq_overrides(SpoqParams& prm, const Overrides& o) {
  if (o.p) prm.p = *o.p;
  if (o.q) prm.q = *o.q;
}

inline json overrides_json(const Overrides& o) {
  json j = json::object();
  if (o.seed) j["seed"] = *o.seed;
  if (o.p) j["p"] = *o.p;
  if (o.q) j["q"] = *o.q;
  if (o.fc) j["fc"] = *o.fc;
  return j;
}

inline ExperimentConfig load_experiment(const std::string& path, const Overrides& o) {
  ExperimentConfig cfg = read_experiment_config(path);
  if (o.seed) cfg.base_seed = *o.seed;
  apply_spoq_overrides(cfg.spoq, o);
  if (o.fc) cfg.cutoff_bin = *o.fc;
  return cfg;
}

}  // namespace detail

/// Writes one realization (seed = base_seed) of the configured experiment.
inline void cmd_synth(const std::string& config_path, const std::filesystem::path& out, const Overrides& o) {
  const ExperimentConfig cfg = detail::load_experiment(config_path, o);
  require_valid(cfg);
  const GroundTruth gt = generate_ground_truth(cfg, realization_seed(cfg, 0));
  detail::ensure_dir(out);
  write_signal_csv((out / "y.csv").string(), gt.y);
  write_signal_csv((out / "s_true.csv").string(), gt.s_true);
  write_signal_csv((out / "pi_true.csv").string(), gt.pi_true.taps());
  write_signal_csv((out / "t_true.csv").string(), gt.t_true);
  json meta = {{"seed", gt.seed},
               {"sigma", gt.sigma},
               {"n", gt.y.size()},
               {"kernel_length", gt.pi_true.size()},
               {"n_spikes", gt.support.size()},
               {"support", gt.support},
               {"noise_percent", cfg.noise_percent},
               {"dataset_style", cfg.dataset_style == DatasetStyle::C ? "C" : "D"},
               {"rng", {{"name", kRngName}, {"version", kRngVersion}}}};
  detail::write_json(out / "meta.json", meta);
}

/// Solves y from a CSV file with the parameters of a JSON document.
inline Decomposition cmd_solve(const std::string& y_path, const std::string& params_path,
                               const std::filesystem::path& out, const Overrides& o) {
  SolveParams prm = solve_params_from_json(parse_json_file(params_path));
  detail::apply_spoq_overrides(prm.spoq, o);
  if (o.fc) prm.cutoff_bin = *o.fc;
  if (!prm.cutoff_bin) throw ConfigError("missing required key 'cutoff_bin' (or pass --fc)");
  const Signal y = read_signal_csv(y_path);
  if (y.size() != prm.n)
    throw DimensionError("y has " + std::to_string(y.size()) + " samples, params expect n = " + std::to_string(prm.n));
  if (prm.kernel_length % 2 == 0 || prm.kernel_length > prm.n)
    throw ConfigError("kernel_length must be odd and <= n");
  if (*prm.cutoff_bin < 1 || *prm.cutoff_bin > prm.n / 2) throw ConfigError("cutoff_bin must lie in [1, n/2]");

  const HighPassOperator h(prm.n, *prm.cutoff_bin);
  const Initialization init = default_initialization(prm.n, prm.kernel_length);
  Decomposition d = solve(y, init.s0, init.pi0, h, prm.spoq, prm.solver);

  detail::ensure_dir(out);
  write_signal_csv((out / "s_hat.csv").string(), d.s_hat);
  write_signal_csv((out / "pi_hat.csv").string(), d.pi_hat.taps());
  write_signal_csv((out / "t_hat.csv").string(), d.t_hat);
  json j = to_json(d);
  double t_max = 0.0;
  for (double v : d.t_hat) t_max = std::max(t_max, std::abs(v));
  j["diagnostics"] = {{"final_objective", d.objective_trace.back()},
                      {"t_hat_max_abs", t_max},
                      {"max_tr_tests", *std::max_element(d.tr_tests_per_iter.begin(), d.tr_tests_per_iter.end())}};
  j["provenance"] = {{"input", y_path},
                     {"params", params_path},
                     {"n", prm.n},
                     {"kernel_length", prm.kernel_length},
                     {"cutoff_bin", *prm.cutoff_bin},
                     {"spoq", to_json(prm.spoq)},
                     {"solver", to_json(prm.solver)},
                     {"overrides", detail::overrides_json(o)}};
  detail::write_json(out / "decomposition.json", j);
  return d;
}

inline BenchmarkTable cmd_bench(const std::string& config_path, const std::filesystem::path& out, const Overrides& o) {
  const ExperimentConfig cfg = detail::load_experiment(config_path, o);
  BenchmarkTable t = run_benchmark(cfg, o.jobs);
  detail::ensure_dir(out);
  write_text_file((out / "benchmark.csv").string(), benchmark_to_csv(t));
  json summary = to_json(t.summary);
  summary["cutoff_bin"] = t.cutoff_bin;
  summary["config"] = to_json(cfg);
  detail::write_json(out / "summary.json", summary);
  return t;
}

inline TuningResult cmd_tune(const std::string& config_path, const std::filesystem::path& out_file, const Overrides& o) {
  ExperimentConfig cfg = detail::load_experiment(config_path, o);
  // A fixed cutoff becomes the only candidate.
  if (cfg.cutoff_bin) cfg.cutoff_candidates = {*cfg.cutoff_bin};
  TuningResult r = tune_experiment(cfg);
  if (out_file.has_parent_path()) detail::ensure_dir(out_file.parent_path());
  json j = to_json(r);
  j["overrides"] = detail::overrides_json(o);
  detail::write_json(out_file, j);
  return r;
}

/// Parses argv and dispatches. Returns the process exit code.
inline int run(int argc, const char* const* argv, std::ostream& err = std::cerr) {
  CLI::App app{"Joint trend removal and blind deconvolution of spike signals"};
  app.require_subcommand(1);
  Overrides o;
  std::string config;
  std::string out;
  std::string y_path;

  auto add_common = [&](CLI::App* sub, bool spoq_flags) {
    sub->add_option("--config", config, "JSON config")->required();
    sub->add_option("--out", out, "Output location")->required();
    if (spoq_flags) {
      sub->add_option("--p", o.p, "Override SPOQ p");
      sub->add_option("--q", o.q, "Override SPOQ q");
      sub->add_option("--fc", o.fc, "High-pass cutoff bin");
    }
  };
  auto* synth = app.add_subcommand("synth", "Generate one synthetic realization");
  add_common(synth, false);
  synth->add_option("--seed", o.seed, "Override base_seed");

  auto* solve_cmd = app.add_subcommand("solve", "Decompose an observed signal");
  solve_cmd->add_option("y", y_path, "Observed signal CSV")->required();
  add_common(solve_cmd, true);

  auto* bench = app.add_subcommand("bench", "Multi-realization benchmark");
  add_common(bench, true);
  bench->add_option("--seed", o.seed, "Override base_seed");
  bench->add_option("--jobs", o.jobs, "Concurrent realizations")->check(CLI::PositiveNumber);

  auto* tune = app.add_subcommand("tune", "Cutoff selection and hyperparameter grid search");
  add_common(tune, true);
  tune->add_option("--seed", o.seed, "Override base_seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e, err, err);
    return kConfigError;
  }

  try {
    if (*synth)
      cmd_synth(config, out, o);
    else if (*solve_cmd)
      cmd_solve(y_path, config, out, o);
    else if (*bench)
      cmd_bench(config, out, o);
    else
      cmd_tune(config, out, o);
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return kIoError;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kConfigError;
  } catch (const DimensionError& e) {
    err << "error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kNumericFailure;
  }
  return kOk;
}

}  // namespace pendantss::cli
