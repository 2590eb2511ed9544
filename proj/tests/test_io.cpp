#include <catch_amalgamated.hpp>

#include <random>

#include "oracles.hpp"
#include "pendantss/io.hpp"

using namespace pendantss;

TEST_CASE("signal CSV round-trips bit for bit") {
  std::mt19937_64 g(91);
  auto s = oracle::random_vec(g, 50, -1e3, 1e3);
  s.push_back(1e-300);
  s.push_back(-0.0);
  s.push_back(123456789.125);
  const auto text = signal_to_csv(s);
  CHECK(text.rfind("index,value\n", 0) == 0);
  const auto back = signal_from_csv(text);
  REQUIRE(back.size() == s.size());
  for (std::size_t i = 0; i < s.size(); ++i) CHECK(back[i] == s[i]);
}

TEST_CASE("signal CSV parsing accepts variants and reports the line") {
  CHECK(signal_from_csv("1.5\n2\n") == Signal{1.5, 2.0});
  CHECK(signal_from_csv("index,value\r\n0,1e-3\r\n1,-4\r\n\n") == Signal{1e-3, -4.0});
  try {
    signal_from_csv("index,value\n0,1\n1,abc\n");
    FAIL("expected IoError");
  } catch (const IoError& e) {
    CHECK_THAT(e.what(), Catch::Matchers::ContainsSubstring("line 3"));
  }
  CHECK_THROWS_AS(signal_from_csv("0,1\n2,3\n"), IoError);
  CHECK_THROWS_AS(signal_from_csv("0,1,2\n"), IoError);
  CHECK_THROWS_AS(signal_from_csv(""), IoError);
  CHECK_THROWS_AS(read_signal_csv("/nonexistent/dir/y.csv"), IoError);
}

TEST_CASE("format_double is scientific and round-trips") {
  CHECK(format_double(0.1) == "1e-01");
  CHECK(format_double(-2.5) == "-2.5e+00");
  for (double v : {0.1 + 0.2, 1.0 / 3.0, 6.02214076e23, 5e-324}) CHECK(std::strtod(format_double(v).c_str(), nullptr) == v);
}

TEST_CASE("experiment config parsing") {
  const auto j = json::parse(R"({
    "dataset_style": "C", "noise_percent": 1.0, "base_seed": 9, "realizations": 3,
    "spoq": {"lambda": 0.7, "q": 2},
    "solver": {"k_max": 200, "epsilon": 1e-5},
    "cutoff_bin": 6,
    "cutoff_rule": "largest_magnitude",
    "generator": {"n_spikes": 12, "trend_amplitude": 1.5},
    "tuning": {"lambda": [0.1, 1.0], "beta": [1e-9], "eta": [1e-3], "k_max": [100]}
  })");
  const auto c = experiment_from_json(j);
  CHECK(c.dataset_style == DatasetStyle::C);
  CHECK(c.noise_percent == 1.0);
  CHECK(c.base_seed == 9);
  CHECK(c.realizations == 3);
  CHECK(c.spoq.lambda == 0.7);
  CHECK(c.spoq.alpha == 7e-7);
  CHECK(c.solver.k_max == 200);
  CHECK(c.solver.epsilon == 1e-5);
  CHECK(c.cutoff_bin == 6u);
  CHECK(c.cutoff_rule == CutoffRule::largest_magnitude);
  CHECK(c.generator.n_spikes == 12u);
  CHECK(c.generator.trend_amplitude == 1.5);
  CHECK(c.tuning.size() == 2);

  // Serialization is re-readable.
  const auto c2 = experiment_from_json(to_json(c));
  CHECK(to_json(c2) == to_json(c));
}

TEST_CASE("config errors name the offending key") {
  auto msg = [](const char* text) {
    try {
      experiment_from_json(json::parse(text));
    } catch (const ConfigError& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  CHECK_THAT(msg(R"({"noise_percent": 1, "base_seed": 1})"), Catch::Matchers::ContainsSubstring("dataset_style"));
  CHECK_THAT(msg(R"({"dataset_style": "D", "base_seed": 1})"), Catch::Matchers::ContainsSubstring("noise_percent"));
  CHECK_THAT(msg(R"({"dataset_style": "D", "noise_percent": 1, "base_seed": 1, "spoq": {"p": "one"}})"),
             Catch::Matchers::ContainsSubstring("spoq.p"));
  CHECK_THAT(msg(R"({"dataset_style": "E", "noise_percent": 1, "base_seed": 1})"),
             Catch::Matchers::ContainsSubstring("dataset_style"));
  CHECK_THAT(msg(R"([1, 2])"), Catch::Matchers::ContainsSubstring("object"));
}

TEST_CASE("solve params from either layout") {
  const auto a = solve_params_from_json(json::parse(R"({"n": 64, "kernel_length": 9, "cutoff_bin": 3})"));
  CHECK(a.n == 64);
  CHECK(a.kernel_length == 9);
  CHECK(a.cutoff_bin == 3u);
  const auto b = solve_params_from_json(
      json::parse(R"({"dataset_style": "D", "generator": {"n": 100}, "spoq": {"lambda": 2}})"));
  CHECK(b.n == 100);
  CHECK(b.kernel_length == 21);
  CHECK_FALSE(b.cutoff_bin.has_value());
  CHECK(b.spoq.lambda == 2.0);
  const auto c = solve_params_from_json(json::parse(R"({"dataset_style": "C", "noise_percent": 1, "cutoff_bin": 5})"));
  CHECK(c.n == 200);
  CHECK(c.cutoff_bin == 5u);
  CHECK_THROWS_AS(solve_params_from_json(json::parse(R"({"kernel_length": 9})")), ConfigError);
}

TEST_CASE("decomposition and benchmark serialization") {
  Decomposition d;
  d.s_hat = {1.0, 0.0, 2.0};
  d.pi_hat = Kernel::delta(3);
  d.t_hat = {0.5, 0.5, 0.5};
  d.iterations = 2;
  d.objective_trace = {3.0, 2.0, 1.5};
  d.tr_tests_per_iter = {1, 1};
  d.stop_reason = StopReason::tolerance;
  const auto j = to_json(d);
  for (const char* key : {"s_hat", "pi_hat", "t_hat", "iterations", "objective_trace", "tr_tests_per_iter", "stop_reason"})
    CHECK(j.contains(key));
  CHECK(j["stop_reason"] == "tolerance");

  BenchmarkTable t;
  BenchmarkRow ok;
  ok.realization = 1;
  ok.seed = 2;
  ok.ok = true;
  ok.metrics = MetricsReport::make(30.0, 31.0, 40.0, 35.0);
  ok.iterations = 10;
  ok.stop_reason = StopReason::iteration_cap;
  BenchmarkRow bad;
  bad.realization = 2;
  bad.seed = 3;
  t.rows = {ok, bad};
  const auto csv = benchmark_to_csv(t);
  CHECK(csv ==
        "realization,seed,snr_s,tsnr_s,snr_t,snr_pi,iterations,stop_reason\n"
        "1,2,3e+01,3.1e+01,4e+01,3.5e+01,10,iteration_cap\n"
        "2,3,nan,nan,nan,nan,0,error\n");
  const auto summary = to_json(summarize_rows(t.rows));
  CHECK(summary["failures"] == 1);
  CHECK(summary["snr_s"]["n"] == 1);
}
