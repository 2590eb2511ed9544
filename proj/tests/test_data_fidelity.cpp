#include <catch_amalgamated.hpp>

#include <Eigen/Dense>
#include <random>

#include "oracles.hpp"
#include "pendantss/data_fidelity.hpp"
#include "pendantss/highpass.hpp"
#include "pendantss/power_iteration.hpp"

using namespace pendantss;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

Eigen::MatrixXd to_eigen(const oracle::Mat& m) {
  Eigen::MatrixXd e(m.size(), m[0].size());
  for (std::size_t i = 0; i < m.size(); ++i)
    for (std::size_t j = 0; j < m[0].size(); ++j) e(i, j) = m[i][j];
  return e;
}

double dense_top_eigenvalue(const oracle::Mat& a) {
  const Eigen::MatrixXd m = to_eigen(a);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m.transpose() * m);
  return es.eigenvalues().maxCoeff();
}

// 1/2 ||H (y - Pi s)||^2 with explicit matrices.
double dense_rho(const oracle::Vec& s, const oracle::Vec& k, const oracle::Vec& y, std::size_t fc) {
  const auto hm = oracle::dft_highpass_matrix(y.size(), fc);
  const auto pis = oracle::matvec(oracle::conv_matrix_s(k, y.size()), s);
  oracle::Vec r(y.size());
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = y[i] - pis[i];
  const auto hr = oracle::matvec(hm, r);
  return 0.5 * oracle::dot(hr, hr);
}

}  // namespace

TEST_CASE("HighPassOperator equals DFT bin masking") {
  std::mt19937_64 g(21);
  for (std::size_t n : {16u, 30u, 31u, 64u}) {
    for (std::size_t fc : {std::size_t{1}, std::size_t{2}, std::size_t{5}, n / 2}) {
      const HighPassOperator h(n, fc);
      for (int rep = 0; rep < 3; ++rep) {
        const auto x = oracle::random_vec(g, n, -2.0, 2.0);
        INFO("N = " << n << ", fc = " << fc);
        CHECK(oracle::max_abs_diff(apply_H(h, x), oracle::dft_highpass(x, fc)) < 1e-12);
      }
    }
  }
}

TEST_CASE("apply_H: DC, pass band, idempotence, self-adjointness") {
  const std::size_t n = 40;
  const HighPassOperator h(n, 4);
  for (double v : apply_H(h, Signal(n, 3.5))) CHECK_THAT(v, WithinAbs(0.0, 1e-12));

  const auto c = oracle::cosine(n, 4.0, 1.3, 0.4);
  CHECK(oracle::max_abs_diff(apply_H(h, c), c) < 1e-10);
  CHECK(oracle::max_abs_diff(apply_lowpass_complement(h, c), Signal(n, 0.0)) < 1e-10);

  std::mt19937_64 g(22);
  for (int rep = 0; rep < 20; ++rep) {
    const auto x = oracle::random_vec(g, n);
    const auto z = oracle::random_vec(g, n);
    const auto hx = apply_H(h, x);
    CHECK(oracle::max_abs_diff(apply_H(h, hx), hx) < 1e-12);
    CHECK_THAT(oracle::dot(hx, z), WithinAbs(oracle::dot(x, apply_H(h, z)), 1e-10));
    const auto lx = apply_lowpass_complement(h, x);
    for (std::size_t i = 0; i < n; ++i) CHECK(hx[i] + lx[i] == Catch::Approx(x[i]).margin(1e-15));
  }
  const Signal dc(n, -2.0);
  CHECK(oracle::max_abs_diff(apply_lowpass_complement(h, dc), dc) < 1e-12);
}

TEST_CASE("HighPassOperator rejects bad sizes") {
  CHECK_THROWS_AS(HighPassOperator(20, 0), ConfigError);
  CHECK_THROWS_AS(HighPassOperator(20, 11), ConfigError);
  const HighPassOperator h(20, 2);
  CHECK_THROWS_AS(apply_H(h, Signal(19, 0.0)), DimensionError);
}

TEST_CASE("rho: perfect fit, low-pass residual and dense-matrix oracle") {
  std::mt19937_64 g(23);
  const std::size_t n = 30, len = 5;
  const HighPassOperator h(n, 3);
  const auto s = oracle::random_vec(g, n, 0.0, 2.0);
  const Kernel k(oracle::random_simplex(g, len));
  const auto x = convolve_same(s, k);
  CHECK(rho(s, k, x, h) == 0.0);

  auto y_dc = x;
  for (double& v : y_dc) v += 4.0;
  CHECK_THAT(rho(s, k, y_dc, h), WithinAbs(0.0, 1e-24));

  for (int rep = 0; rep < 10; ++rep) {
    const auto si = oracle::random_vec(g, n, 0.0, 2.0);
    const auto yi = oracle::random_vec(g, n, -1.0, 3.0);
    const Kernel ki(oracle::random_simplex(g, len));
    CHECK_THAT(rho(si, ki, yi, h), WithinRel(dense_rho(si, ki.vec(), yi, 3), 1e-10));
    CHECK(rho(si, ki, yi, h) >= 0.0);
  }
}

TEST_CASE("grad_rho_s and grad_rho_pi match finite differences") {
  std::mt19937_64 g(24);
  const std::size_t n = 40, len = 7;
  const HighPassOperator h(n, 4);
  double worst_s = 0.0, worst_k = 0.0;
  for (int rep = 0; rep < 100; ++rep) {
    const auto s = oracle::random_vec(g, n, 0.0, 3.0);
    const auto k = oracle::random_simplex(g, len);
    const auto y = oracle::random_vec(g, n, -1.0, 4.0);
    const auto fs = oracle::fd_gradient([&](const oracle::Vec& v) { return rho(v, k, y, h); }, s);
    const auto fk = oracle::fd_gradient([&](const oracle::Vec& v) { return rho(s, v, y, h); }, k);
    worst_s = std::max(worst_s, oracle::rel_err(grad_rho_s(s, k, y, h), fs));
    worst_k = std::max(worst_k, oracle::rel_err(grad_rho_pi(s, k, y, h), fk));
  }
  CHECK(worst_s < 1e-6);
  CHECK(worst_k < 1e-6);
}

TEST_CASE("gradients vanish at a perfect fit and for s = 0 in the kernel block") {
  std::mt19937_64 g(25);
  const std::size_t n = 32;
  const HighPassOperator h(n, 2);
  const auto s = oracle::random_vec(g, n, 0.0, 1.0);
  const Kernel k(oracle::random_simplex(g, 5));
  const auto y = convolve_same(s, k);
  for (double v : grad_rho_s(s, k, y, h)) CHECK(v == 0.0);
  for (double v : grad_rho_pi(s, k, y, h)) CHECK(v == 0.0);
  const auto y2 = oracle::random_vec(g, n);
  for (double v : grad_rho_pi(Signal(n, 0.0), k, y2, h)) CHECK(v == 0.0);
}

TEST_CASE("grad_rho_s with a delta kernel on DC-free inputs is s - y") {
  std::mt19937_64 g(26);
  const std::size_t n = 24;
  const HighPassOperator h(n, 1);
  auto dc_free = [&] {
    auto v = oracle::random_vec(g, n);
    double m = 0.0;
    for (double x : v) m += x;
    m /= static_cast<double>(n);
    for (double& x : v) x -= m;
    return v;
  };
  const auto s = dc_free();
  const auto y = dc_free();
  const auto grad = grad_rho_s(s, Kernel::delta(3), y, h);
  for (std::size_t i = 0; i < n; ++i) CHECK_THAT(grad[i], WithinAbs(s[i] - y[i], 1e-12));
}

TEST_CASE("lipschitz_s agrees with a dense eigendecomposition") {
  {
    const HighPassOperator h(16, 1);
    const auto hm = oracle::dft_highpass_matrix(16, 1);
    const double ref = dense_top_eigenvalue(oracle::matmul(hm, oracle::conv_matrix_s({1.0}, 16)));
    CHECK_THAT(ref, WithinAbs(1.0, 1e-12));
    CHECK_THAT(lipschitz_s(Kernel::delta(1), h).value, WithinRel(1.01, 1e-4));
  }
  std::mt19937_64 g(27);
  for (int rep = 0; rep < 10; ++rep) {
    const std::size_t n = 30, len = 5, fc = 1 + rep % 4;
    const HighPassOperator h(n, fc);
    const Kernel k(oracle::random_simplex(g, len));
    const auto a = oracle::matmul(oracle::dft_highpass_matrix(n, fc), oracle::conv_matrix_s(k.vec(), n));
    const double ref = dense_top_eigenvalue(a);
    const auto est = lipschitz_s(k, h);
    CHECK_THAT(est.value / kLipschitzSafety, WithinRel(ref, 1e-4));
    CHECK(est.value <= 1.01 + 1e-12);
  }
}

TEST_CASE("lipschitz_pi agrees with a dense eigendecomposition") {
  const std::size_t n = 30, len = 7;
  {
    Signal s(n, 0.0);
    s[n / 2] = 1.0;
    const HighPassOperator h(n, 1);
    const double ref = dense_top_eigenvalue(oracle::matmul(oracle::dft_highpass_matrix(n, 1), oracle::conv_matrix_k(s, len)));
    CHECK_THAT(lipschitz_pi(s, h, len).value / kLipschitzSafety, WithinRel(ref, 1e-4));
  }
  CHECK(lipschitz_pi(Signal(n, 0.0), HighPassOperator(n, 2), len).value == kLipschitzFloor);

  std::mt19937_64 g(28);
  for (int rep = 0; rep < 10; ++rep) {
    const std::size_t fc = 1 + rep % 4;
    const HighPassOperator h(n, fc);
    const auto s = oracle::random_vec(g, n, 0.0, 3.0);
    const double ref = dense_top_eigenvalue(oracle::matmul(oracle::dft_highpass_matrix(n, fc), oracle::conv_matrix_k(s, len)));
    CHECK_THAT(lipschitz_pi(s, h, len).value / kLipschitzSafety, WithinRel(ref, 1e-4));
  }
}

TEST_CASE("Lipschitz estimates never fall below the top eigenvalue") {
  // Random kernels often have nearly equal top eigenvalues, where the power
  // iteration converges slowly or exhausts its budget; the estimate must still
  // bound lambda_max.
  std::mt19937_64 g(31);
  const std::size_t n = 40, len = 7;
  const HighPassOperator h(n, 3);
  int exhausted = 0;
  for (int rep = 0; rep < 600; ++rep) {
    const Kernel k(oracle::random_simplex(g, len));
    const double ref = dense_top_eigenvalue(oracle::matmul(oracle::dft_highpass_matrix(n, 3), oracle::conv_matrix_s(k.vec(), n)));
    const auto est = lipschitz_s(k, h);
    exhausted += est.converged ? 0 : 1;
    CHECK(est.value >= ref);
    CHECK(est.value <= kLipschitzSafety * ref * (1.0 + 1e-9));
  }
  INFO("exhausted budgets: " << exhausted);
  SUCCEED();
}

TEST_CASE("power_iteration converges, handles A x = 0 and reports exhaustion") {
  auto diag = [](std::span<const double> x) { return std::vector<double>{3.0 * x[0], 1.0 * x[1]}; };
  const auto res = power_iteration(diag, std::vector<double>{1.0, 1.0});
  CHECK_THAT(res.value, WithinRel(3.0, 1e-6));
  auto zero = [](std::span<const double> x) { return std::vector<double>(x.size(), 0.0); };
  CHECK(power_iteration(zero, std::vector<double>{1.0, 1.0}).value == 0.0);
  CHECK_THROWS_AS(power_iteration(diag, std::vector<double>{0.0, 0.0}), DimensionError);

  // One sweep never satisfies the two-iterate convergence test.
  try {
    power_iteration(diag, std::vector<double>{1.0, 1.0}, 1e-6, 1);
    FAIL("expected ConvergenceError");
  } catch (const ConvergenceError& e) {
    CHECK(e.last_vector().size() == 2);
    CHECK_THAT(e.last_value(), WithinRel(2.0, 1e-12));  // Rayleigh quotient of (1,1)/sqrt(2)
  }
}

TEST_CASE("descent lemma holds in both blocks") {
  std::mt19937_64 g(29);
  const std::size_t n = 40, len = 7;
  const HighPassOperator h(n, 3);
  for (int rep = 0; rep < 1000; ++rep) {
    const auto s = oracle::random_vec(g, n, 0.0, 3.0);
    const auto kv = oracle::random_simplex(g, len);
    const Kernel k(kv);
    const auto y = oracle::random_vec(g, n, -1.0, 4.0);
    const double scale = std::uniform_real_distribution<double>(1e-3, 2.0)(g);
    auto ds = oracle::random_vec(g, n);
    auto dk = oracle::random_vec(g, len);
    for (double& v : ds) v *= scale;
    for (double& v : dk) v *= scale;

    const double r0 = rho(s, k, y, h);
    {
      const double l1 = lipschitz_s(k, h).value;
      oracle::Vec s1 = s;
      for (std::size_t i = 0; i < n; ++i) s1[i] += ds[i];
      const double bound = r0 + oracle::dot(grad_rho_s(s, k, y, h), ds) + 0.5 * l1 * oracle::dot(ds, ds);
      CHECK(rho(s1, k, y, h) <= bound + 1e-10 * (1.0 + std::abs(bound)));
    }
    {
      const double l2 = lipschitz_pi(s, h, len).value;
      oracle::Vec k1 = kv;
      for (std::size_t i = 0; i < len; ++i) k1[i] += dk[i];
      const double bound = r0 + oracle::dot(grad_rho_pi(s, k, y, h), dk) + 0.5 * l2 * oracle::dot(dk, dk);
      CHECK(rho(s, std::span<const double>(k1), y, h) <= bound + 1e-10 * (1.0 + std::abs(bound)));
    }
  }
}
