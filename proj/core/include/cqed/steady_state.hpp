#pragma once

#include <optional>

#include "cqed/hilbert.hpp"
#include "cqed/params.hpp"

namespace cqed {

/// Strong-driving field amplitude
///   alpha = (E/kappa) [1 - x^2 + i x sqrt(1 - x^2)],  x = g / 2E.
/// Throws DomainError if g >= 2E.
Complex analytic_alpha(const SystemParams& p);

/// Fock space centred on Re(alpha). Both dressed branches (alpha, alpha*) sit
/// at relative amplitude |Im alpha|; n_max defaults to recommended_n_max of that.
FockSpec centered_spec(const SystemParams& p, int n_max = 0);

/// Copy of p with spec = centered_spec(p, n_max).
SystemParams with_centered_spec(SystemParams p, int n_max = 0);

struct DressedBasis {
  PureState plus;   // |alpha;+>
  PureState minus;  // |alpha*;->
};

DressedBasis dressed_basis(const SystemParams& p);

/// (|alpha;+><alpha;+| + |alpha*;-><alpha*;-|) / 2 on p.spec. Throws TruncationError.
DensityMatrix rho_ss_analytic(const SystemParams& p);

/// Null space of the vectorized Liouvillian.
struct NumericSteadyState {
  int null_dimension = 0;
  std::optional<DensityMatrix> rho;  ///< set only when the null space is one-dimensional
  double residual = 0.0;             ///< ||L(rho)||_1 of the returned state
  double smallest_singular_value = 0.0;
  double gap_singular_value = 0.0;   ///< next singular value above the null space
  double largest_singular_value = 0.0;
};

/// Relative singular-value threshold below which a direction counts as null.
inline constexpr double kNullSpaceRelTol = 1e-10;

/// Dense SVD of the d^2 x d^2 superoperator. A degenerate null space (e.g. g = 0,
/// where any atomic state is stationary) is reported through null_dimension.
NumericSteadyState solve_steady_state(const SystemParams& p, double rel_tol = kNullSpaceRelTol);

/// The unique steady state. Throws ConvergenceError if the null space is empty
/// or degenerate at tolerance, or if the residual exceeds 1e-8.
DensityMatrix rho_ss_numeric(const SystemParams& p);

struct SteadyStateReport {
  SystemParams params;
  Complex alpha;
  DensityMatrix rho_analytic;
  DensityMatrix rho_numeric;
  double trace_distance = 0.0;
  double liouvillian_residual_analytic = 0.0;
  double liouvillian_residual_numeric = 0.0;
  int null_dimension = 0;
  double gap_singular_value = 0.0;
};

SteadyStateReport steady_state_report(const SystemParams& p);

}  // namespace cqed
