#include "cqed/steady_state.hpp"

#include <cmath>
#include <string>

#include "cqed/dynamics.hpp"

namespace cqed {

Complex analytic_alpha(const SystemParams& p) {
  p.validate();
  p.require_strong_driving();
  const double x = p.coupling_ratio();
  const double one_minus_x2 = (1.0 - x) * (1.0 + x);
  const double scale = p.E / p.kappa;
  return {scale * one_minus_x2, scale * x * std::sqrt(one_minus_x2)};
}

FockSpec centered_spec(const SystemParams& p, int n_max) {
  const Complex alpha = analytic_alpha(p);
  const Complex center{alpha.real(), 0.0};
  return FockSpec(n_max > 0 ? n_max : recommended_n_max(alpha, center), center);
}

SystemParams with_centered_spec(SystemParams p, int n_max) {
  p.spec = centered_spec(p, n_max);
  return p;
}

DressedBasis dressed_basis(const SystemParams& p) {
  const Complex alpha = analytic_alpha(p);
  return {dressed_state(Branch::plus, alpha, p.spec), dressed_state(Branch::minus, alpha, p.spec)};
}

DensityMatrix rho_ss_analytic(const SystemParams& p) {
  const DressedBasis b = dressed_basis(p);
  Matrix rho = 0.5 * (b.plus.projector() + b.minus.projector());
  return DensityMatrix(hermitize(rho), p.spec);
}

NumericSteadyState solve_steady_state(const SystemParams& p, double rel_tol) {
  const CavityModel model(p);
  const int d = model.dim();
  const Matrix S = model.liouvillian_superoperator();
  Eigen::BDCSVD<Matrix> svd(S, Eigen::ComputeFullV);
  const Eigen::VectorXd& sv = svd.singularValues();  // descending
  const Eigen::Index n = sv.size();

  NumericSteadyState out;
  out.largest_singular_value = sv(0);
  out.smallest_singular_value = sv(n - 1);
  const double threshold = rel_tol * sv(0);
  for (Eigen::Index i = n - 1; i >= 0 && sv(i) <= threshold; --i) ++out.null_dimension;
  const Eigen::Index gap = n - 1 - out.null_dimension;
  out.gap_singular_value = gap >= 0 ? sv(gap) : 0.0;
  if (out.null_dimension != 1) return out;

  const Vector v = svd.matrixV().col(n - 1);
  Matrix rho = Eigen::Map<const Matrix>(v.data(), d, d);
  rho = hermitize(rho);
  const Complex tr = rho.trace();
  if (std::abs(tr) < 1e-14) throw ConvergenceError("steady-state null vector is traceless");
  rho /= tr;
  rho = hermitize(rho);
  out.residual = trace_norm(model.liouvillian(rho));
  out.rho = DensityMatrix(std::move(rho), p.spec);
  return out;
}

DensityMatrix rho_ss_numeric(const SystemParams& p) {
  NumericSteadyState s = solve_steady_state(p);
  if (s.null_dimension != 1)
    throw ConvergenceError("Liouvillian null space has dimension " + std::to_string(s.null_dimension) +
                           " (smallest singular value " + std::to_string(s.smallest_singular_value) + ")");
  if (s.residual > 1e-8)
    throw ConvergenceError("steady-state residual " + std::to_string(s.residual) + " exceeds 1e-8");
  return std::move(*s.rho);
}

SteadyStateReport steady_state_report(const SystemParams& p) {
  const CavityModel model(p);
  DensityMatrix analytic = rho_ss_analytic(p);
  NumericSteadyState s = solve_steady_state(p);
  if (s.null_dimension != 1)
    throw ConvergenceError("Liouvillian null space has dimension " + std::to_string(s.null_dimension));
  SteadyStateReport r{p, analytic_alpha(p), analytic, *s.rho};
  r.trace_distance = trace_distance(r.rho_analytic, r.rho_numeric);
  r.liouvillian_residual_analytic = trace_norm(model.liouvillian(analytic.matrix()));
  r.liouvillian_residual_numeric = s.residual;
  r.null_dimension = s.null_dimension;
  r.gap_singular_value = s.gap_singular_value;
  return r;
}

}  // namespace cqed
