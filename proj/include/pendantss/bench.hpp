#pragma once

// Synthetic experiment harness: ground-truth generation per dataset style,
// scoring, cutoff selection, hyperparameter grid search and the
// multi-realization benchmark.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numbers>
#include <numeric>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "pendantss/errors.hpp"
#include "pendantss/highpass.hpp"
#include "pendantss/metrics.hpp"
#include "pendantss/random.hpp"
#include "pendantss/smoothed_norms.hpp"
#include "pendantss/solver.hpp"
#include "pendantss/synth.hpp"

namespace pendantss {

enum class DatasetStyle { C, D };

/// Spike count of a dataset style: 10 (5% of N = 200) for C, 20 (10%) for D.
inline std::size_t spikes_for(DatasetStyle style) { return style == DatasetStyle::C ? 10 : 20; }

/// How the default cutoff candidates are derived from the observation.
enum class CutoffRule {
  first_bins,         ///< DFT bins 1..count
  largest_magnitude,  ///< the count bins in [1, N/2] with the largest |Y_k|
};

struct GeneratorConfig {
  std::size_t n = 200;
  std::size_t kernel_length = 21;
  double kernel_sigma = 0.15;
  /// Overrides the dataset style's spike count when set.
  std::optional<std::size_t> n_spikes;
  std::size_t min_gap = 4;
  double amp_low = 1.0;
  double amp_high = 10.0;
  double trend_amplitude = 2.0;
  std::size_t trend_max_bin = 3;
};

struct TuningGrid {
  std::vector<double> lambda;
  std::vector<double> beta;
  std::vector<double> eta;
  /// Optional iteration caps; empty means the solver config's k_max.
  std::vector<int> k_max;

  std::size_t size() const {
    return lambda.size() * beta.size() * eta.size() * std::max<std::size_t>(1, k_max.size());
  }
};

struct ExperimentConfig {
  DatasetStyle dataset_style = DatasetStyle::D;
  double noise_percent = 0.5;
  int realizations = 30;
  std::uint64_t base_seed = 1;
  SpoqParams spoq;
  SolverConfig solver;
  /// Fixed high-pass cutoff; when unset it is selected on the tuning realization.
  std::optional<std::size_t> cutoff_bin;
  std::vector<std::size_t> cutoff_candidates;  ///< empty: derived by cutoff_rule
  CutoffRule cutoff_rule = CutoffRule::first_bins;
  GeneratorConfig generator;
  /// Kernel SNR is scored over integer shifts up to this size.
  std::size_t kernel_max_shift = 0;
  TuningGrid tuning;
};

inline void require_valid(const ExperimentConfig& cfg) {
  if (cfg.realizations < 1) throw ConfigError("realizations must be >= 1");
  if (!(cfg.noise_percent >= 0.0)) throw ConfigError("noise_percent must be >= 0");
  const auto& g = cfg.generator;
  if (g.kernel_length % 2 == 0 || g.kernel_length > g.n) throw ConfigError("generator.kernel_length must be odd and <= n");
  if (!(g.trend_amplitude > 0.0)) throw ConfigError("generator.trend_amplitude must be > 0");
  if (cfg.cutoff_bin && (*cfg.cutoff_bin < 1 || *cfg.cutoff_bin > g.n / 2))
    throw ConfigError("cutoff_bin must lie in [1, n/2]");
  for (std::size_t c : cfg.cutoff_candidates)
    if (c < 1 || c > g.n / 2) throw ConfigError("cutoff_candidates must lie in [1, n/2]");
  if (cfg.kernel_max_shift >= g.kernel_length) throw ConfigError("kernel_max_shift must be < kernel_length");
  require_valid(cfg.spoq);
  require_valid(cfg.solver);
}

/// Realization seed -> independent streams for spikes (1), trend (2), noise (3).
inline GroundTruth generate_ground_truth(const GeneratorConfig& g, DatasetStyle style, double noise_percent,
                                         std::uint64_t seed) {
  const std::size_t n_spikes = g.n_spikes.value_or(spikes_for(style));
  SpikeTrain spikes = gen_spike_train(g.n, n_spikes, g.min_gap, g.amp_low, g.amp_high, derive_seed(seed, 1));
  Signal trend = gen_trend(g.n, g.trend_amplitude, g.trend_max_bin, derive_seed(seed, 2));
  GroundTruth gt = gen_observation(std::move(spikes.s), gen_gaussian_kernel(g.kernel_length, g.kernel_sigma),
                                   std::move(trend), noise_percent, derive_seed(seed, 3));
  gt.seed = seed;
  return gt;
}

inline GroundTruth generate_ground_truth(const ExperimentConfig& cfg, std::uint64_t seed) {
  return generate_ground_truth(cfg.generator, cfg.dataset_style, cfg.noise_percent, seed);
}

/// Seed of realization r (r = 0 is the tuning realization).
inline std::uint64_t realization_seed(const ExperimentConfig& cfg, int r) {
  return cfg.base_seed + static_cast<std::uint64_t>(r);
}

inline MetricsReport evaluate(const GroundTruth& gt, const Decomposition& d, std::size_t kernel_max_shift = 0) {
  return MetricsReport::make(snr(gt.s_true, d.s_hat), tsnr(gt.s_true, d.s_hat, gt.support),
                             snr(gt.t_true, d.t_hat),
                             kernel_snr_aligned(gt.pi_true, d.pi_hat, kernel_max_shift).db);
}

/// Bins 1..count, or the count largest-magnitude DFT bins of y in [1, N/2]
/// (ascending order).
inline std::vector<std::size_t> default_cutoff_candidates(std::span<const double> y, CutoffRule rule,
                                                          std::size_t count = 10) {
  const std::size_t half = y.size() / 2;
  count = std::min(count, half);
  std::vector<std::size_t> bins(half);
  std::iota(bins.begin(), bins.end(), std::size_t{1});
  if (rule == CutoffRule::largest_magnitude) {
    std::vector<double> mag(half + 1, 0.0);
    const double n = static_cast<double>(y.size());
    for (std::size_t k = 1; k <= half; ++k) {
      std::complex<double> acc = 0.0;
      for (std::size_t i = 0; i < y.size(); ++i)
        acc += y[i] * std::polar(1.0, -2.0 * std::numbers::pi * static_cast<double>((k * i) % y.size()) / n);
      mag[k] = std::abs(acc);
    }
    std::stable_sort(bins.begin(), bins.end(), [&](std::size_t a, std::size_t b) { return mag[a] > mag[b]; });
  }
  bins.resize(count);
  std::sort(bins.begin(), bins.end());
  return bins;
}

struct CandidateScore {
  std::size_t cutoff_bin = 0;
  bool ok = false;
  MetricsReport metrics;
  std::string error;
};

struct CutoffSelection {
  std::size_t cutoff_bin = 0;
  std::vector<CandidateScore> scores;
};

/// Solves the tuning realization once per candidate cutoff and keeps the best
/// composite score; ties go to the smallest cutoff. Failing candidates are
/// skipped.
inline CutoffSelection select_cutoff(std::span<const std::size_t> candidates, const GroundTruth& tuning_gt,
                                     const SpoqParams& prm, const SolverConfig& cfg,
                                     const std::optional<Initialization>& init = std::nullopt,
                                     std::size_t kernel_max_shift = 0) {
  if (candidates.empty()) throw ConfigError("select_cutoff: no candidates");
  const auto start = init.value_or(default_initialization(tuning_gt.y.size(), tuning_gt.pi_true.size()));
  CutoffSelection out;
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t fc : candidates) {
    CandidateScore sc{fc, false, {}, {}};
    try {
      const HighPassOperator h(tuning_gt.y.size(), fc);
      const Decomposition d = solve(tuning_gt.y, start.s0, start.pi0, h, prm, cfg);
      sc.metrics = evaluate(tuning_gt, d, kernel_max_shift);
      sc.ok = std::isfinite(sc.metrics.composite);
    } catch (const std::exception& e) {
      sc.error = e.what();
    }
    if (sc.ok && (sc.metrics.composite > best || (sc.metrics.composite == best && fc < out.cutoff_bin))) {
      best = sc.metrics.composite;
      out.cutoff_bin = fc;
    }
    out.scores.push_back(std::move(sc));
  }
  if (out.cutoff_bin == 0) throw std::runtime_error("select_cutoff: every candidate failed");
  return out;
}

struct GridScore {
  SpoqParams spoq;
  int k_max = 0;
  bool ok = false;
  MetricsReport metrics;
  std::string error;
};

struct TuningResult {
  SpoqParams spoq;
  int k_max = 0;
  std::size_t cutoff_bin = 0;
  std::vector<GridScore> scoreboard;
  std::vector<CandidateScore> cutoff_scores;
};

/// Exhaustive (lambda, beta, eta[, k_max]) search on one realization; p, q and
/// alpha come from `base`. Returns the first grid point with the best
/// composite score.
inline TuningResult tune_hyperparams(const TuningGrid& grid, const GroundTruth& tuning_gt, const SpoqParams& base,
                                     const SolverConfig& cfg, std::size_t cutoff_bin,
                                     const std::optional<Initialization>& init = std::nullopt,
                                     std::size_t kernel_max_shift = 0) {
  if (grid.size() == 0) throw ConfigError("tune_hyperparams: empty grid");
  const auto start = init.value_or(default_initialization(tuning_gt.y.size(), tuning_gt.pi_true.size()));
  const HighPassOperator h(tuning_gt.y.size(), cutoff_bin);
  const std::vector<int> caps = grid.k_max.empty() ? std::vector<int>{cfg.k_max} : grid.k_max;

  TuningResult out;
  out.cutoff_bin = cutoff_bin;
  double best = -std::numeric_limits<double>::infinity();
  bool found = false;
  for (double lambda : grid.lambda)
    for (double beta : grid.beta)
      for (double eta : grid.eta)
        for (int cap : caps) {
          GridScore sc;
          sc.spoq = base;
          sc.spoq.lambda = lambda;
          sc.spoq.beta = beta;
          sc.spoq.eta = eta;
          sc.k_max = cap;
          try {
            SolverConfig c = cfg;
            c.k_max = cap;
            const Decomposition d = solve(tuning_gt.y, start.s0, start.pi0, h, sc.spoq, c);
            sc.metrics = evaluate(tuning_gt, d, kernel_max_shift);
            sc.ok = std::isfinite(sc.metrics.composite);
          } catch (const std::exception& e) {
            sc.error = e.what();
          }
          if (sc.ok && sc.metrics.composite > best) {
            best = sc.metrics.composite;
            out.spoq = sc.spoq;
            out.k_max = cap;
            found = true;
          }
          out.scoreboard.push_back(std::move(sc));
        }
  if (!found) throw std::runtime_error("tune_hyperparams: every grid point failed");
  return out;
}

/// Cutoff selection followed by the grid search, both on realization 0.
inline TuningResult tune_experiment(const ExperimentConfig& cfg) {
  require_valid(cfg);
  if (cfg.tuning.size() == 0) throw ConfigError("tuning grid is empty");
  const GroundTruth gt = generate_ground_truth(cfg, realization_seed(cfg, 0));
  std::vector<std::size_t> candidates = cfg.cutoff_candidates.empty()
                                            ? default_cutoff_candidates(gt.y, cfg.cutoff_rule)
                                            : cfg.cutoff_candidates;
  const CutoffSelection sel = select_cutoff(candidates, gt, cfg.spoq, cfg.solver, std::nullopt, cfg.kernel_max_shift);
  TuningResult res = tune_hyperparams(cfg.tuning, gt, cfg.spoq, cfg.solver, sel.cutoff_bin, std::nullopt, cfg.kernel_max_shift);
  res.cutoff_scores = sel.scores;
  return res;
}

struct BenchmarkRow {
  int realization = 0;
  std::uint64_t seed = 0;
  bool ok = false;
  MetricsReport metrics;
  int iterations = 0;
  StopReason stop_reason = StopReason::iteration_cap;
  std::string error;
};

struct SummaryStat {
  double mean = 0.0;
  double std = 0.0;  ///< sample standard deviation; 0 for a single value
  std::size_t n = 0;
};

/// Two-pass mean and sample standard deviation.
inline SummaryStat summarize(std::span<const double> values) {
  SummaryStat st;
  st.n = values.size();
  if (values.empty()) return {std::numeric_limits<double>::quiet_NaN(), std::numeric_limits<double>::quiet_NaN(), 0};
  for (double v : values) st.mean += v;
  st.mean /= static_cast<double>(values.size());
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - st.mean) * (v - st.mean);
    st.std = std::sqrt(ss / static_cast<double>(values.size() - 1));
  }
  return st;
}

struct BenchmarkSummary {
  SummaryStat snr_s, tsnr_s, snr_t, snr_pi, composite;
  std::size_t failures = 0;
};

struct BenchmarkTable {
  std::size_t cutoff_bin = 0;
  std::vector<BenchmarkRow> rows;
  BenchmarkSummary summary;
};

inline BenchmarkSummary summarize_rows(std::span<const BenchmarkRow> rows) {
  std::vector<double> a, b, c, d, e;
  BenchmarkSummary s;
  for (const auto& r : rows) {
    if (!r.ok) {
      ++s.failures;
      continue;
    }
    a.push_back(r.metrics.snr_s);
    b.push_back(r.metrics.tsnr_s);
    c.push_back(r.metrics.snr_t);
    d.push_back(r.metrics.snr_pi);
    e.push_back(r.metrics.composite);
  }
  s.snr_s = summarize(a);
  s.tsnr_s = summarize(b);
  s.snr_t = summarize(c);
  s.snr_pi = summarize(d);
  s.composite = summarize(e);
  return s;
}

/// Solves realizations 1..R. Each realization depends only on
/// (base_seed, r), so any number of worker threads gives the same table.
/// Uses cfg.cutoff_bin when set, otherwise selects it on realization 0.
inline BenchmarkTable run_benchmark(const ExperimentConfig& cfg, unsigned jobs = 1) {
  require_valid(cfg);
  BenchmarkTable table;
  if (cfg.cutoff_bin) {
    table.cutoff_bin = *cfg.cutoff_bin;
  } else {
    const GroundTruth gt0 = generate_ground_truth(cfg, realization_seed(cfg, 0));
    const auto candidates = cfg.cutoff_candidates.empty() ? default_cutoff_candidates(gt0.y, cfg.cutoff_rule)
                                                          : cfg.cutoff_candidates;
    table.cutoff_bin = select_cutoff(candidates, gt0, cfg.spoq, cfg.solver, std::nullopt, cfg.kernel_max_shift).cutoff_bin;
  }
  const HighPassOperator h(cfg.generator.n, table.cutoff_bin);
  const auto init = default_initialization(cfg.generator.n, cfg.generator.kernel_length);

  table.rows.resize(static_cast<std::size_t>(cfg.realizations));
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int i = next++; i < cfg.realizations; i = next++) {
      BenchmarkRow& row = table.rows[static_cast<std::size_t>(i)];
      row.realization = i + 1;
      row.seed = realization_seed(cfg, i + 1);
      try {
        const GroundTruth gt = generate_ground_truth(cfg, row.seed);
        const Decomposition d = solve(gt.y, init.s0, init.pi0, h, cfg.spoq, cfg.solver);
        row.metrics = evaluate(gt, d, cfg.kernel_max_shift);
        row.iterations = d.iterations;
        row.stop_reason = d.stop_reason;
        row.ok = true;
      } catch (const std::exception& e) {
        row.error = e.what();
      }
    }
  };
  jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(cfg.realizations)));
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned j = 0; j < jobs; ++j) pool.emplace_back(worker);
  }
  table.summary = summarize_rows(table.rows);
  return table;
}

}  // namespace pendantss
