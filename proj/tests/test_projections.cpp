#include <catch_amalgamated.hpp>

#include <random>

#include "oracles.hpp"
#include "pendantss/projections.hpp"

using namespace pendantss;
using Catch::Matchers::WithinAbs;

TEST_CASE("project_nonneg examples") {
  CHECK(project_nonneg(std::vector<double>{-1.0, 2.0, 0.0}) == std::vector<double>{0.0, 2.0, 0.0});
  const std::vector<double> pos{0.0, 1.5, 3.0};
  CHECK(project_nonneg(pos) == pos);
}

TEST_CASE("project_nonneg solves the separable 1-D problems") {
  std::mt19937_64 g(41);
  for (int rep = 0; rep < 200; ++rep) {
    const auto v = oracle::random_vec(g, 12, -3.0, 3.0);
    const auto p = project_nonneg(v);
    for (std::size_t i = 0; i < v.size(); ++i) {
      // argmin_{x >= 0} (x - v)^2: the unconstrained minimizer if feasible, else the boundary.
      const double ref = v[i] >= 0.0 ? v[i] : 0.0;
      CHECK(p[i] == ref);
    }
  }
}

TEST_CASE("project_nonneg is the projection in any diagonal metric") {
  // KKT of min sum_n a_n (x_n - v_n)^2 s.t. x >= 0:
  // a_n (x_n - v_n) >= 0, x_n >= 0, x_n * a_n (x_n - v_n) = 0.
  std::mt19937_64 g(42);
  for (int rep = 0; rep < 200; ++rep) {
    const auto v = oracle::random_vec(g, 15, -2.0, 2.0);
    const auto a = oracle::random_vec(g, 15, 1e-3, 1e3);
    const auto x = project_nonneg(v);
    for (std::size_t n = 0; n < v.size(); ++n) {
      const double grad = a[n] * (x[n] - v[n]);
      CHECK(x[n] >= 0.0);
      CHECK(grad >= 0.0);
      CHECK(x[n] * grad == 0.0);
    }
  }
}

TEST_CASE("project_simplex examples") {
  const std::vector<double> on{0.2, 0.3, 0.5};
  const auto p = project_simplex(on);
  for (std::size_t i = 0; i < 3; ++i) CHECK_THAT(p[i], WithinAbs(on[i], 1e-14));
  CHECK(project_simplex(std::vector<double>{2.0, 0.0}) == std::vector<double>{1.0, 0.0});
  const auto q = project_simplex(std::vector<double>{0.5, 0.5, 3.0});
  CHECK(q == std::vector<double>{0.0, 0.0, 1.0});
  CHECK(project_simplex(std::vector<double>{-7.0}) == std::vector<double>{1.0});
}

TEST_CASE("project_simplex matches the brute-force support enumeration") {
  std::mt19937_64 g(43);
  std::uniform_int_distribution<int> dim(1, 5);
  std::uniform_real_distribution<double> spread(0.1, 10.0);
  double worst = 0.0;
  for (int rep = 0; rep < 10000; ++rep) {
    const auto n = static_cast<std::size_t>(dim(g));
    const double w = spread(g);
    const auto v = oracle::random_vec(g, n, -w, w);
    const auto p = project_simplex(v);
    const auto ref = oracle::brute_simplex(v);
    worst = std::max(worst, oracle::max_abs_diff(p, ref));
    double sum = 0.0;
    for (double x : p) {
      CHECK(x >= 0.0);
      sum += x;
    }
    CHECK_THAT(sum, WithinAbs(1.0, 1e-12));
  }
  CHECK(worst < 1e-8);
}

TEST_CASE("projections are nonexpansive and idempotent") {
  std::mt19937_64 g(44);
  for (int rep = 0; rep < 2000; ++rep) {
    const auto u = oracle::random_vec(g, 21, -2.0, 2.0);
    const auto v = oracle::random_vec(g, 21, -2.0, 2.0);
    const double d = oracle::norm([&] {
      oracle::Vec w(21);
      for (std::size_t i = 0; i < 21; ++i) w[i] = u[i] - v[i];
      return w;
    }());
    for (auto proj : {&project_nonneg, &project_simplex}) {
      const auto pu = proj(u);
      const auto pv = proj(v);
      oracle::Vec w(21);
      for (std::size_t i = 0; i < 21; ++i) w[i] = pu[i] - pv[i];
      CHECK(oracle::norm(w) <= d + 1e-12);
      CHECK(oracle::max_abs_diff(proj(pu), pu) <= 1e-14);
    }
  }
}

TEST_CASE("project_simplex satisfies the variational inequality") {
  std::mt19937_64 g(45);
  for (int rep = 0; rep < 100; ++rep) {
    const auto v = oracle::random_vec(g, 21, -1.0, 1.5);
    const auto p = project_simplex(v);
    for (int j = 0; j < 100; ++j) {
      const auto x = oracle::random_simplex(g, 21);
      double ip = 0.0;
      for (std::size_t i = 0; i < 21; ++i) ip += (v[i] - p[i]) * (x[i] - p[i]);
      CHECK(ip <= 1e-10);
    }
  }
}
