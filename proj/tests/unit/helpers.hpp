#pragma once

#include <numbers>

#include "cqed/hilbert.hpp"
#include "cqed/params.hpp"
#include "cqed/rng.hpp"
#include "cqed/steady_state.hpp"

namespace testing {

inline constexpr double pi = std::numbers::pi;

inline cqed::SystemParams params(double E, double g, double phi = 0.0, double kappa = 1.0, double eta = 1.0,
                                 int n_max = 0) {
  cqed::SystemParams p;
  p.E = E;
  p.g = g;
  p.kappa = kappa;
  p.eta = eta;
  p.phi = phi;
  return cqed::with_centered_spec(p, n_max);
}

inline cqed::Matrix random_density(int d, cqed::NormalStream& rng) {
  cqed::Matrix m(d, d);
  for (int j = 0; j < d; ++j)
    for (int i = 0; i < d; ++i) m(i, j) = cqed::Complex(rng(), rng());
  cqed::Matrix rho = m * m.adjoint();
  rho /= std::real(rho.trace());
  return cqed::hermitize(rho);
}

inline cqed::Matrix random_hermitian(int d, cqed::NormalStream& rng) {
  cqed::Matrix m(d, d);
  for (int j = 0; j < d; ++j)
    for (int i = 0; i < d; ++i) m(i, j) = cqed::Complex(rng(), rng());
  return cqed::hermitize(m);
}

}  // namespace testing
