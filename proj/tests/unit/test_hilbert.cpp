#include <cmath>

#include "doctest.h"
#include "helpers.hpp"
#include "oracles.hpp"

using namespace cqed;
using testing::pi;

TEST_SUITE("hilbert") {
  TEST_CASE("fock spec rejects n_max below one") {
    CHECK_THROWS_AS(FockSpec(0), DomainError);
    CHECK(FockSpec(3).dim() == 8);
  }

  TEST_CASE("annihilation operator matrix elements") {
    const Matrix a1 = make_annihilation(FockSpec(1)).matrix;
    // field factor [[0,1],[0,0]] on both atomic levels
    CHECK(a1(basis_index(0, Atom::ground), basis_index(1, Atom::ground)) == Complex(1.0));
    CHECK(a1(basis_index(0, Atom::excited), basis_index(1, Atom::excited)) == Complex(1.0));
    CHECK(a1.cwiseAbs().sum() == doctest::Approx(2.0));

    const Matrix a2 = make_annihilation(FockSpec(2)).matrix;
    CHECK(std::real(a2(basis_index(1, Atom::ground), basis_index(2, Atom::ground))) == doctest::Approx(1.41421356));
    CHECK(std::abs(a2(basis_index(1, Atom::ground), basis_index(2, Atom::excited))) == 0.0);
  }

  TEST_CASE("ladder commutator is the identity below the top level") {
    for (int n_max : {1, 3, 8, 20}) {
      const FockSpec spec(n_max);
      const Matrix a = make_annihilation(spec).matrix;
      const Matrix c = a * a.adjoint() - a.adjoint() * a;
      const int keep = 2 * n_max;
      CHECK((c.topLeftCorner(keep, keep) - Matrix::Identity(keep, keep)).cwiseAbs().maxCoeff() < 1e-12);
      // fails at the top level
      CHECK(std::abs(c(keep, keep) - 1.0) > 1.0);
    }
  }

  TEST_CASE("centred basis gives a = ladder + centre") {
    const FockSpec spec(5, Complex(2.0, -1.0));
    const Matrix a = make_annihilation(spec).matrix;
    CHECK((a - oracle::annihilation(5, Complex(2.0, -1.0))).cwiseAbs().maxCoeff() < 1e-15);
  }

  TEST_CASE("sigma algebra") {
    const FockSpec spec(2);
    const Matrix s = make_sigma(spec).matrix;
    CHECK((s * s).cwiseAbs().maxCoeff() == 0.0);
    CHECK((s.adjoint() * s + s * s.adjoint() - Matrix::Identity(spec.dim(), spec.dim())).cwiseAbs().maxCoeff() == 0.0);
    CHECK(std::real((s.adjoint() * s).trace()) == doctest::Approx(3.0));
    const Matrix ee = s.adjoint() * s;
    for (int n = 0; n <= 2; ++n) {
      CHECK(ee(basis_index(n, Atom::excited), basis_index(n, Atom::excited)) == Complex(1.0));
      CHECK(ee(basis_index(n, Atom::ground), basis_index(n, Atom::ground)) == Complex(0.0));
    }
  }

  TEST_CASE("coherent state basics") {
    const Vector vac = coherent_state(0.0, FockSpec(4));
    CHECK(std::abs(vac(0) - 1.0) < 1e-15);
    CHECK(vac.tail(4).norm() == 0.0);

    const FockSpec spec(40);
    const Vector c = coherent_state(2.0, spec);
    Complex mean = 0.0;
    for (int n = 1; n <= 40; ++n) mean += std::conj(c(n - 1)) * std::sqrt(double(n)) * c(n);
    CHECK(std::abs(mean - 2.0) < 1e-6);
  }

  TEST_CASE("coherent state eigenvector property") {
    for (Complex z : {Complex(1.0, 0.5), Complex(-2.0, 1.5), Complex(0.0, 3.0)}) {
      const FockSpec spec(recommended_n_max(z));
      const Vector f = coherent_state(z, spec);
      const PureState psi = product_state(f, Eigen::Vector2cd(1.0, 0.0), spec);
      const Matrix a = make_annihilation(spec).matrix;
      CHECK((a * psi.vector() - z * psi.vector()).norm() <= 1e-5);
    }
  }

  TEST_CASE("truncation test follows the Poisson tail") {
    // |alpha|^2 = 99.75 in the lab basis
    const Complex alpha = oracle::alpha(10, 1, 1);
    for (int n_max : {140, 150, 158, 160, 161, 162, 170, 210}) {
      const bool enough = oracle::coherent_mass(std::abs(alpha), n_max) >= 1.0 - 1e-8;
      if (enough)
        CHECK_NOTHROW(coherent_state(alpha, FockSpec(n_max)));
      else
        CHECK_THROWS_AS(coherent_state(alpha, FockSpec(n_max)), TruncationError);
    }
    CHECK_THROWS_AS(coherent_state(alpha, FockSpec(150)), TruncationError);
    CHECK_NOTHROW(coherent_state(alpha, FockSpec(recommended_n_max(alpha))));
    // a centred basis needs only the displacement from the centre
    CHECK_NOTHROW(coherent_state(alpha, FockSpec(16, alpha.real())));
  }

  TEST_CASE("coherent state in a centred basis has the lab mean") {
    const Complex z(9.975, 0.499375);
    const FockSpec spec(16, 9.975);
    const PureState psi = product_state(coherent_state(z, spec), Eigen::Vector2cd(1.0, 0.0), spec);
    const Matrix a = make_annihilation(spec).matrix;
    CHECK(std::abs(psi.vector().dot(a * psi.vector()) - z) < 1e-10);
  }

  TEST_CASE("dressed states") {
    const FockSpec spec(30);
    for (Complex z : {Complex(0.0), Complex(1.0, 1.0), Complex(2.0, -0.5)}) {
      const auto plus = dressed_state(Branch::plus, z, spec);
      const auto minus = dressed_state(Branch::minus, z, spec);
      CHECK(std::abs(plus.vector().dot(minus.vector())) <= 1e-10);
    }
    const auto p0 = dressed_state(Branch::plus, 0.0, spec);
    CHECK(std::abs(p0.vector()(basis_index(0, Atom::ground)) - 1.0 / std::sqrt(2.0)) < 1e-15);
    CHECK(std::abs(p0.vector()(basis_index(0, Atom::excited)) - kI / std::sqrt(2.0)) < 1e-15);

    const auto m = dressed_state(Branch::minus, Complex(1.0, 1.0), spec);
    const Matrix a = make_annihilation(spec).matrix;
    CHECK(std::abs(m.vector().dot(a * m.vector()) - Complex(1.0, -1.0)) < 1e-10);
  }

  TEST_CASE("density matrix validation") {
    const FockSpec spec(1);
    Matrix rho = Matrix::Zero(4, 4);
    rho(0, 0) = 1.0;
    CHECK_NOTHROW(DensityMatrix(rho, spec));
    CHECK_THROWS_AS(DensityMatrix(Matrix::Identity(2, 2), spec), DimensionError);
    Matrix bad = rho;
    bad(0, 1) = 1e-6;
    CHECK_THROWS_AS(DensityMatrix(bad, spec), InvalidStateError);
    bad = rho * 1.001;
    CHECK_THROWS_AS(DensityMatrix(bad, spec), InvalidStateError);
    bad = Matrix::Zero(4, 4);
    bad(0, 0) = 1.1;
    bad(1, 1) = -0.1;
    CHECK_THROWS_AS(DensityMatrix(bad, spec), InvalidStateError);
  }

  TEST_CASE("von Neumann entropy") {
    NormalStream rng(5);
    const FockSpec spec(3);
    const int d = spec.dim();
    Vector v = Vector::Zero(d);
    for (int i = 0; i < d; ++i) v(i) = Complex(rng(), rng());
    v.normalize();
    CHECK(von_neumann_entropy(DensityMatrix(v * v.adjoint(), spec)) == doctest::Approx(0.0).epsilon(1e-12));

    Matrix q = Matrix::Zero(d, d);
    q(0, 0) = 0.25;
    q(1, 1) = 0.75;
    CHECK(von_neumann_entropy(DensityMatrix(q, spec)) == doctest::Approx(0.56233514).epsilon(1e-8));

    const auto p = testing::params(10, 1, pi / 2);
    CHECK(std::abs(von_neumann_entropy(rho_ss_analytic(p)) - std::log(2.0)) < 1e-8);
  }

  TEST_CASE("entropy bounds and unitary invariance") {
    NormalStream rng(11);
    const FockSpec spec(2);
    const int d = spec.dim();
    for (int k = 0; k < 25; ++k) {
      const Matrix rho = testing::random_density(d, rng);
      const double h = von_neumann_entropy(DensityMatrix(rho, spec));
      CHECK(h >= 0.0);
      CHECK(h <= std::log(double(d)) + 1e-12);
      Matrix g(d, d);
      for (int j = 0; j < d; ++j)
        for (int i = 0; i < d; ++i) g(i, j) = Complex(rng(), rng());
      const Matrix u = Eigen::HouseholderQR<Matrix>(g).householderQ();
      const double hu = von_neumann_entropy(DensityMatrix(hermitize(u * rho * u.adjoint()), spec));
      CHECK(std::abs(hu - h) < 1e-8);
    }
    CHECK(von_neumann_entropy(DensityMatrix(Matrix::Identity(d, d) / d, spec)) ==
          doctest::Approx(std::log(double(d))));
  }

  TEST_CASE("trace distance") {
    const FockSpec spec(1);
    Matrix a = Matrix::Zero(4, 4), b = Matrix::Zero(4, 4);
    a(0, 0) = 1.0;
    b(1, 1) = 1.0;
    CHECK(trace_distance(DensityMatrix(a, spec), DensityMatrix(b, spec)) == doctest::Approx(1.0));
    CHECK(trace_distance(DensityMatrix(a, spec), DensityMatrix(a, spec)) == doctest::Approx(0.0));
    CHECK_THROWS_AS(trace_distance(DensityMatrix(a, spec), DensityMatrix(Matrix::Identity(6, 6) / 6, FockSpec(2))),
                    DimensionError);
  }
}
