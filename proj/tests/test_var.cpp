#include <doctest.h>

#include "freqconn/simulate.hpp"
#include "freqconn/var.hpp"
#include "oracles.hpp"

#include <random>

using namespace freqconn;

TEST_CASE("white noise gives small coefficients") {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> normal;
  Matrix x(1000, 3);
  for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = normal(rng);
  const auto m = estimate_var(x, VarSpec{1, true});
  CHECK(m.phi[0].cwiseAbs().maxCoeff() < 4.0 / std::sqrt(1000.0));
}

TEST_CASE("orthogonal solve agrees with the normal equations") {
  BivariateSpec spec;
  spec.beta1 = spec.beta2 = 0.9;
  spec.s = 0.09;
  spec.seed = 5;
  const auto panel = generate(spec);
  for (int p : {1, 2, 3}) {
    for (bool c : {false, true}) {
      const auto m = estimate_var(panel, VarSpec{p, c});
      const Matrix b = oracle::ols(panel.values(), p, c);
      Eigen::Index row = 0;
      if (c) CHECK((m.intercept.transpose() - b.row(row++)).cwiseAbs().maxCoeff() < 1e-9);
      for (int j = 0; j < p; ++j)
        CHECK((m.phi[std::size_t(j)].transpose() - b.middleRows(row + 2 * j, 2)).cwiseAbs().maxCoeff() < 1e-9);
    }
  }
  const auto m = estimate_var(panel, VarSpec{1, false});
  // three standard errors of an AR coefficient near 0.9 at T = 1000
  const double se = std::sqrt((1 - 0.99 * 0.99) / 1000.0) * 3.0 * 2.0;
  CHECK(std::abs(m.phi[0](0, 0) - 0.9) < se);
  CHECK(std::abs(m.phi[0](0, 1) - 0.09) < 3 * se);
}

TEST_CASE("residual covariance uses the degrees-of-freedom correction") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> normal;
  Matrix x(300, 11);
  for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = normal(rng);
  const auto m = estimate_var(x, VarSpec{2, true});
  CHECK(m.z == 23);
  CHECK(m.effective_length() == 298);
  const Matrix expected = m.residuals.transpose() * m.residuals / double(298 - 23);
  CHECK((m.sigma - expected).cwiseAbs().maxCoeff() < 1e-14);
  CHECK((m.sigma - m.sigma.transpose()).cwiseAbs().maxCoeff() == 0.0);
  CHECK(Eigen::SelfAdjointEigenSolver<Matrix>(m.sigma).eigenvalues().minCoeff() > -1e-10);

  // residuals are orthogonal to every regressor
  const Matrix X = lagged_design(x, m.spec);
  const double scale = X.cwiseAbs().maxCoeff() * m.residuals.cwiseAbs().maxCoeff() * double(X.rows());
  CHECK((X.transpose() * m.residuals).cwiseAbs().maxCoeff() / scale < 1e-8);
}

TEST_CASE("estimability and singular designs are rejected") {
  Matrix tiny(5, 3);
  tiny.setRandom();
  CHECK_THROWS_AS(estimate_var(tiny, VarSpec{2, true}), ValidationError);

  Matrix collinear(200, 2);
  std::mt19937_64 rng(1);
  std::normal_distribution<double> normal;
  for (Eigen::Index t = 0; t < 200; ++t) {
    collinear(t, 0) = normal(rng);
    collinear(t, 1) = 2.0 * collinear(t, 0);
  }
  CHECK_THROWS_AS(estimate_var(collinear, VarSpec{1, true}), EstimationError);
  VarSpec ridge{1, true};
  ridge.ridge = 1e-3;
  CHECK_NOTHROW(estimate_var(collinear, ridge));
}

TEST_CASE("large sample recovers the coefficients") {
  BivariateSpec spec;
  spec.beta1 = 0.5;
  spec.beta2 = -0.3;
  spec.s = 0.2;
  spec.rho = 0.4;
  spec.T = 100000;
  spec.seed = 99;
  const auto m = estimate_var(generate(spec), VarSpec{1, false});
  CHECK((m.phi[0] - spec.phi()).cwiseAbs().maxCoeff() < 0.01);
}

TEST_CASE("spectral radius of the companion matrix") {
  auto radius = [](Matrix a) { return stability(var_from_coefficients<double>({a}, Matrix::Identity(a.rows(), a.rows()))); };
  CHECK(radius(Matrix::Zero(2, 2)) == 0.0);
  Matrix a(2, 2);
  a << 0.9, 0.09, 0.09, 0.9;
  CHECK(radius(a) == doctest::Approx(0.99).epsilon(1e-12));
  CHECK(radius(Matrix::Ones(1, 1)) == doctest::Approx(1.0));

  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    const auto phi = oracle::random_stable(rng, 3, 2, 0.9);
    CHECK(stability(var_from_coefficients<double>(phi, Matrix::Identity(3, 3))) ==
          doctest::Approx(oracle::companion_radius(phi)).epsilon(1e-10));
  }
}

TEST_CASE("MA recursion matches companion powers") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 50; ++trial) {
    const Eigen::Index n = 1 + trial % 4;
    const int p = 1 + trial % 3;
    const auto phi = oracle::random_stable(rng, n, p);
    const auto ma = ma_truncated(phi, 64);
    const auto ref = oracle::psi_by_powers(phi, 64);
    CHECK(ma.psi[0] == Matrix::Identity(n, n));
    double err = 0;
    for (std::size_t h = 0; h < 64; ++h) err = std::max(err, (ma.psi[h] - ref[h]).cwiseAbs().maxCoeff());
    CHECK(err < 1e-10);
  }
}

TEST_CASE("frequency response matches the naive DFT and inverts") {
  std::mt19937_64 rng(4);
  const auto phi = oracle::random_stable(rng, 3, 2);
  const auto ma = ma_truncated(phi, 48);
  double fwd = 0, sym = 0;
  for (std::size_t k = 0; k < 48; ++k) {
    fwd = std::max(fwd, (ma.psi_hat[k] - oracle::naive_dft(ma.psi, k)).cwiseAbs().maxCoeff());
    if (k > 0) sym = std::max(sym, (ma.psi_hat[48 - k] - ma.psi_hat[k].conjugate()).cwiseAbs().maxCoeff());
  }
  CHECK(fwd < 1e-10);
  CHECK(sym < 1e-12);
  const auto back = oracle::naive_inverse_dft(ma.psi_hat);
  double inv = 0;
  for (std::size_t h = 0; h < 48; ++h) inv = std::max(inv, (back[h] - ma.psi[h]).cwiseAbs().maxCoeff());
  CHECK(inv < 1e-10);

  Matrix half(1, 1);
  half << 0.5;
  CHECK(ma_truncated<double>({half}, 4).psi_hat[0](0, 0).real() == doctest::Approx(1.875).epsilon(1e-15));
}

TEST_CASE("msfe increments settle where the geometric rate predicts") {
  auto model = var_from_coefficients<double>({Matrix::Zero(2, 2)}, Matrix::Identity(2, 2));
  for (const auto& h : msfe_convergence(model, 50, 0.5)) CHECK(h == std::size_t(1));

  Matrix a(2, 2);
  a << 0.9, 0.09, 0.09, 0.9;
  const auto slow = var_from_coefficients<double>({a}, Matrix::Identity(2, 2));
  const auto reached = msfe_convergence(slow, 2000, 1e-6);
  // Psi_h = 0.99^h P + 0.81^h Q with P = 11'/2, so the diagonal increment is
  // 0.99^{2h}/2 plus a faster term; solve 0.99^{2h}/2 < 1e-6
  const double bound = std::log(2e-6) / (2.0 * std::log(0.99));
  for (const auto& h : reached) {
    REQUIRE(h);
    CHECK(*h > 100);
    CHECK(double(*h) == doctest::Approx(bound).epsilon(0.02));
  }

  const auto unit = var_from_coefficients<double>({Matrix::Identity(1, 1)}, Matrix::Identity(1, 1));
  CHECK_FALSE(msfe_convergence(unit, 500, 1e-3)[0].has_value());
}
