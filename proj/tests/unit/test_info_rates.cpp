#include <cmath>

#include "cqed/dynamics.hpp"
#include "cqed/info_rates.hpp"
#include "doctest.h"
#include "helpers.hpp"
#include "oracles.hpp"

using namespace cqed;
using testing::pi;

namespace {

Matrix traceless(Matrix m) {
  m -= (m.trace() / double(m.rows())) * Matrix::Identity(m.rows(), m.cols());
  return m;
}

// Density matrix with a prescribed spectrum in a random eigenbasis.
Matrix with_spectrum(const Eigen::VectorXd& w, NormalStream& rng) {
  const int d = int(w.size());
  Matrix g(d, d);
  for (int j = 0; j < d; ++j)
    for (int i = 0; i < d; ++i) g(i, j) = Complex(rng(), rng());
  const Matrix u = Eigen::HouseholderQR<Matrix>(g).householderQ();
  return hermitize(u * w.cast<Complex>().asDiagonal() * u.adjoint());
}

}  // namespace

TEST_SUITE("info_rates") {
  TEST_CASE("diagonal pair validation") {
    CHECK_NOTHROW(DiagonalPair(Eigen::Vector2d(0.5, 0.5), Eigen::Vector2d(0.1, -0.1)));
    CHECK_THROWS_AS(DiagonalPair(Eigen::Vector2d(0.5, 0.5), Eigen::Vector3d(0.1, -0.1, 0.0)), DomainError);
    CHECK_THROWS_AS(DiagonalPair(Eigen::Vector2d(1.0, 0.0), Eigen::Vector2d(0.1, -0.1)), DomainError);
    CHECK_THROWS_AS(DiagonalPair(Eigen::Vector2d(0.6, 0.6), Eigen::Vector2d(0.1, -0.1)), DomainError);
    CHECK_THROWS_AS(DiagonalPair(Eigen::Vector2d(0.5, 0.5), Eigen::Vector2d(0.1, 0.1)), DomainError);
  }

  TEST_CASE("diagonal entropy rate") {
    CHECK(entropy_rate_diagonal(DiagonalPair(Eigen::Vector2d(0.25, 0.75), Eigen::Vector2d(0.1, -0.1))) ==
          doctest::Approx(-0.0266666667).epsilon(1e-9));
    CHECK(entropy_rate_diagonal(DiagonalPair(Eigen::Vector2d(0.5, 0.5), Eigen::Vector2d(0.0, 0.0))) == 0.0);
  }

  TEST_CASE("closed-form rate R_Q") {
    for (double kappa : {0.5, 1.0, 2.0})
      for (double eta : {0.3, 1.0})
        for (double phi : {0.0, 0.4, pi / 2, 2.0}) {
          SystemParams p;
          p.E = 10;
          p.g = 1;
          p.kappa = kappa;
          p.eta = eta;
          p.phi = phi;
          const double r = rate_RQ(p);
          CHECK(r == doctest::Approx(oracle::RQ(10, 1, kappa, eta, phi)).epsilon(1e-13));
          CHECK(r >= 0.0);
          // the dressed-pair formula is the same number with the opposite sign
          CHECK(entropy_rate_diagonal(m_diagonal_ss(p)) == doctest::Approx(-r).epsilon(1e-12));
        }
    SystemParams p;
    p.E = 10;
    p.g = 1;
    p.phi = pi / 2;
    CHECK(rate_RQ(p) == doctest::Approx(0.9975).epsilon(1e-12));
    p.g = 20;
    CHECK_THROWS_AS(rate_RQ(p), DomainError);
    CHECK_THROWS_AS(m_diagonal_ss(p), DomainError);
  }

  TEST_CASE("R_Q is monotone in eta and in sin^2 phi") {
    SystemParams p;
    p.E = 5;
    p.g = 1;
    double prev = -1;
    for (double phi = 0; phi <= pi / 2 + 1e-12; phi += pi / 16) {
      const double r = rate_RQ(p.with_phi(phi));
      CHECK(r > prev);
      prev = r;
    }
    p.phi = 1.0;
    prev = -1;
    for (double eta : {0.1, 0.4, 0.7, 1.0}) {
      p.eta = eta;
      CHECK(rate_RQ(p) > prev);
      prev = rate_RQ(p);
    }
  }

  TEST_CASE("dressed projection of M reproduces the closed form") {
    for (double E : {2.5, 10.0})
      for (double phi : {0.0, 0.7, pi / 2}) {
        const auto p = testing::params(E, 1.0, phi);
        const auto d = dressed_measurement_projection(p);
        const auto m = m_diagonal_ss(p);
        CHECK(std::abs(d.b_plus - m.b()(0)) < 1e-10);
        CHECK(std::abs(d.b_minus - m.b()(1)) < 1e-10);
        CHECK(d.off_diagonal < 1e-10);
        CHECK(d.outside < 1e-8);
      }
  }

  TEST_CASE("series: two-level example") {
    const FockSpec spec(1);
    Matrix rho = Matrix::Zero(4, 4), M = Matrix::Zero(4, 4);
    rho(0, 0) = 0.25;
    rho(1, 1) = 0.75;
    M(0, 0) = 0.1;
    M(1, 1) = -0.1;
    const auto s = entropy_rate_series(DensityMatrix(rho, spec), Matrix::Zero(4, 4), M);
    CHECK(s.value == doctest::Approx(-0.0266666667).epsilon(1e-8));
    CHECK(s.support_dim == 2);
    CHECK(s.n_terms == kDefaultSeriesTerms);
  }

  TEST_CASE("series matches the exact second-order rate on full-rank states") {
    NormalStream rng(31);
    const FockSpec spec(2);
    for (int k = 0; k < 8; ++k) {
      // smallest eigenvalue 0.15 keeps every |lambda - 1| <= 0.85
      Eigen::VectorXd u(6);
      for (int i = 0; i < 6; ++i) u(i) = std::abs(rng()) + 0.1;
      const Eigen::VectorXd w = (0.15 + 0.1 * (u / u.sum()).array()).matrix();
      const Matrix rho = with_spectrum(w, rng);
      const Matrix L = 0.3 * traceless(testing::random_hermitian(6, rng));
      const Matrix M = 0.3 * traceless(testing::random_hermitian(6, rng));
      const auto s = entropy_rate_series(DensityMatrix(rho, spec), L, M);
      const double ref = oracle::second_order_rate(rho, L, M);
      CHECK(std::abs(s.value - ref) < 1e-10 * std::max(1.0, std::abs(ref)));
      CHECK(s.last_term < 1e-12);
      CHECK(s.support_dim == 6);
    }
  }

  TEST_CASE("series is basis independent") {
    NormalStream rng(41);
    const FockSpec spec(2);
    Eigen::VectorXd w(6);
    w << 0.3, 0.25, 0.2, 0.1, 0.1, 0.05;
    const Matrix rho = with_spectrum(w, rng);
    const Matrix L = traceless(testing::random_hermitian(6, rng));
    const Matrix M = traceless(testing::random_hermitian(6, rng));
    Matrix g(6, 6);
    for (int j = 0; j < 6; ++j)
      for (int i = 0; i < 6; ++i) g(i, j) = Complex(rng(), rng());
    const Matrix U = Eigen::HouseholderQR<Matrix>(g).householderQ();
    const auto a = entropy_rate_series(DensityMatrix(rho, spec), L, M, 400);
    const auto b = entropy_rate_series(DensityMatrix(hermitize(U * rho * U.adjoint()), spec), U * L * U.adjoint(),
                                       U * M * U.adjoint(), 400);
    CHECK(std::abs(a.value - b.value) < 1e-9);
  }

  TEST_CASE("series agrees with a finite-difference entropy rate") {
    NormalStream rng(51);
    const FockSpec spec(1);
    Eigen::VectorXd w(4);
    w << 0.4, 0.3, 0.2, 0.1;
    const Matrix rho = with_spectrum(w, rng);
    const Matrix L = 0.2 * traceless(testing::random_hermitian(4, rng));
    const Matrix M = 0.2 * traceless(testing::random_hermitian(4, rng));
    const auto s = entropy_rate_series(DensityMatrix(rho, spec), L, M, 400);
    const double fd = oracle::finite_difference_rate(rho, L, M, 1e-5);
    CHECK(std::abs(s.value - fd) < 1e-4 * std::max(1.0, std::abs(fd)));
    CHECK(std::abs(entropy_rate_finite_difference(rho, L, M, 1e-5) - fd) < 1e-4 * std::max(1.0, std::abs(fd)));
  }

  TEST_CASE("series restricted to the support of a rank-deficient state") {
    // M confined to the support: the series is the diagonal formula
    const auto p = testing::params(10.0, 1.0, pi / 2);
    const auto rho = rho_ss_analytic(p);
    const auto basis = dressed_basis(p);
    const auto m = m_diagonal_ss(p);
    const Matrix M = m.b()(0) * basis.plus.projector() + m.b()(1) * basis.minus.projector();
    const auto s = entropy_rate_series(rho, Matrix::Zero(rho.dim(), rho.dim()), M);
    CHECK(s.support_dim == 2);
    CHECK(std::abs(s.value - entropy_rate_diagonal(m)) < 1e-12);
  }

  TEST_CASE("series rejects operators of the wrong size") {
    const FockSpec spec(1);
    Matrix rho = Matrix::Zero(4, 4);
    rho(0, 0) = 1;
    CHECK_THROWS_AS(entropy_rate_series(DensityMatrix(rho, spec), Matrix::Zero(6, 6), Matrix::Zero(4, 4)),
                    DimensionError);
  }

  TEST_CASE("Monte Carlo entropy rate at phi = pi/2") {
    const auto p = testing::params(10.0, 1.0, pi / 2);
    const auto est = entropy_rate_monte_carlo(p, 10000, 1e-4, 7);
    CHECK(est.samples == 10000);
    CHECK(est.subspace_dim >= 2);
    CHECK(est.subspace_dim <= 6);
    CHECK(std::abs(est.estimate + rate_RQ(p)) <= 3 * est.std_error + std::abs(est.leakage_bias));
  }

  TEST_CASE("Monte Carlo entropy rate at phi = 0 is the leakage offset") {
    const auto p = testing::params(10.0, 1.0, 0.0);
    const auto est = entropy_rate_monte_carlo(p, 2000, 1e-4, 8);
    CHECK(est.leakage_bias < 0.0);
    CHECK(std::abs(est.estimate - est.leakage_bias) <= 3 * est.std_error + 1e-9);
    // halving dt halves the offset
    const auto half = entropy_rate_monte_carlo(p, 2000, 5e-5, 8);
    CHECK(half.leakage_bias == doctest::Approx(0.5 * est.leakage_bias).epsilon(1e-6));
  }

  TEST_CASE("Monte Carlo entropy rate is deterministic in the seed") {
    const auto p = testing::params(5.0, 1.0, 1.0);
    const auto a = entropy_rate_monte_carlo(p, 500, 1e-4, 3);
    const auto b = entropy_rate_monte_carlo(p, 500, 1e-4, 3);
    const auto c = entropy_rate_monte_carlo(p, 500, 1e-4, 4);
    CHECK(a.estimate == b.estimate);
    CHECK(a.estimate != c.estimate);
  }
}
