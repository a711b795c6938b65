#include <cmath>

#include "cqed/dynamics.hpp"
#include "cqed/steady_state.hpp"
#include "doctest.h"
#include "helpers.hpp"
#include "oracles.hpp"

using namespace cqed;
using testing::pi;

TEST_SUITE("steady_state") {
  TEST_CASE("analytic amplitude") {
    for (double kappa : {0.5, 1.0, 3.0})
      for (auto [E, g] : {std::pair{10.0, 1.0}, {2.5, 1.0}, {1.0, 1.9}, {4.0, 0.0}}) {
        SystemParams p;
        p.E = E;
        p.g = g;
        p.kappa = kappa;
        const Complex a = analytic_alpha(p);
        CHECK(std::abs(a - oracle::alpha(E, g, kappa)) < 1e-13 * std::abs(a));
        // |alpha| = (E/kappa) sqrt(1 - x^2)
        const double x = g / (2 * E);
        CHECK(std::abs(a) == doctest::Approx(E / kappa * std::sqrt(1 - x * x)).epsilon(1e-13));
      }
    SystemParams p;
    p.E = 10.0;
    p.g = 1.0;
    CHECK(std::abs(analytic_alpha(p) - Complex(9.975, 0.499375)) < 1e-5);
    p.g = 20.0;
    CHECK_THROWS_AS(analytic_alpha(p), DomainError);
    p.g = 25.0;
    CHECK_THROWS_AS(analytic_alpha(p), DomainError);
  }

  TEST_CASE("centred spec sits on the real part of alpha") {
    SystemParams p;
    p.E = 10.0;
    p.g = 1.0;
    const FockSpec s = centered_spec(p);
    CHECK(s.center == Complex(analytic_alpha(p).real(), 0.0));
    CHECK(s.n_max == recommended_n_max(Complex(0.0, analytic_alpha(p).imag())));
    CHECK(centered_spec(p, 7).n_max == 7);
  }

  TEST_CASE("analytic steady state") {
    const auto p = testing::params(10.0, 1.0, 0.3);
    const auto rho = rho_ss_analytic(p);
    CHECK(std::abs(rho.matrix().trace() - 1.0) < 1e-12);
    Eigen::SelfAdjointEigenSolver<Matrix> es(rho.matrix());
    const auto ev = es.eigenvalues();
    CHECK(ev(ev.size() - 1) == doctest::Approx(0.5).epsilon(1e-10));
    CHECK(ev(ev.size() - 2) == doctest::Approx(0.5).epsilon(1e-10));
    CHECK(std::abs(ev(ev.size() - 3)) < 1e-12);
    CHECK(von_neumann_entropy(rho) == doctest::Approx(std::log(2.0)).epsilon(1e-10));

    const Matrix a = make_annihilation(p.spec).matrix;
    CHECK(std::abs(rho.expectation(a) - analytic_alpha(p).real()) < 1e-10);
  }

  TEST_CASE("analytic state is independent of phi") {
    const auto p = testing::params(5.0, 1.0);
    const auto r0 = rho_ss_analytic(p.with_phi(0.0));
    const auto r1 = rho_ss_analytic(p.with_phi(1.1));
    CHECK((r0.matrix() - r1.matrix()).norm() == 0.0);
  }

  TEST_CASE("truncation too small raises") {
    auto p = testing::params(10.0, 1.0);
    p.spec = FockSpec(60);  // lab frame, |alpha|^2 ~ 100
    CHECK_THROWS_AS(rho_ss_analytic(p), TruncationError);
  }

  TEST_CASE("numeric steady state agrees with long master-equation integration") {
    const auto p = testing::params(2.5, 1.0, 0.0, 1.0, 1.0, 12);
    const auto s = solve_steady_state(p);
    REQUIRE(s.null_dimension == 1);
    REQUIRE(s.rho.has_value());
    CHECK(s.residual < 1e-8);
    CHECK(s.smallest_singular_value < 1e-10 * s.largest_singular_value);
    CHECK(s.gap_singular_value > 1e-6 * s.largest_singular_value);

    const oracle::Model om{p.E, p.g, p.kappa, p.eta, p.phi, p.spec.n_max, p.spec.center};
    Matrix rho = rho_ss_analytic(p).matrix();
    rho = oracle::rk4(oracle::Lindblad(om), rho, 80.0, 1e-2);
    const DensityMatrix evolved(hermitize(rho / rho.trace()), p.spec);
    CHECK(trace_distance(evolved, *s.rho) < 1e-6);

    const auto direct = rho_ss_numeric(p);
    CHECK(trace_distance(direct, *s.rho) < 1e-12);
  }

  TEST_CASE("degenerate null space at g = 0") {
    SystemParams p;
    p.E = 3.0;
    p.g = 0.0;
    p.spec = FockSpec(6, 3.0);
    const auto s = solve_steady_state(p);
    CHECK(s.null_dimension == 4);
    CHECK_FALSE(s.rho.has_value());
    CHECK_THROWS_AS(rho_ss_numeric(p), ConvergenceError);
  }

  TEST_CASE("analytic residual is small and the report is consistent") {
    const auto p = testing::params(5.0, 1.0, 0.0, 1.0, 1.0, 10);
    const auto r = steady_state_report(p);
    CHECK(r.null_dimension == 1);
    CHECK(r.liouvillian_residual_numeric < 1e-8);
    CHECK(r.liouvillian_residual_analytic > r.liouvillian_residual_numeric);
    CHECK(r.trace_distance == doctest::Approx(trace_distance(r.rho_analytic, r.rho_numeric)));
    CHECK(r.trace_distance < 0.2);
    CHECK(std::abs(r.alpha - analytic_alpha(p)) == 0.0);
  }
}
