#pragma once

#include <cstdint>

#include "cqed/hilbert.hpp"
#include "cqed/params.hpp"

namespace cqed {

/// Non-zero eigenvalues a_k of a steady state and the matching diagonal
/// elements b_k of M(rho) in a common eigenbasis.
class DiagonalPair {
 public:
  /// Throws DomainError unless sizes match, a_k > 0, sum a = 1 (1e-10) and sum b = 0 (1e-8).
  DiagonalPair(Eigen::VectorXd a, Eigen::VectorXd b);

  const Eigen::VectorXd& a() const { return a_; }
  const Eigen::VectorXd& b() const { return b_; }

 private:
  Eigen::VectorXd a_;
  Eigen::VectorXd b_;
};

/// <dH/dt> = -sum_k b_k^2 / (2 a_k).
double entropy_rate_diagonal(const DiagonalPair& d);

/// a = (1/2, 1/2), b = +-g sin(phi) sqrt((eta / 2 kappa)(1 - (g/2E)^2)). Throws DomainError if g >= 2E.
DiagonalPair m_diagonal_ss(const SystemParams& p);

/// M(rho_ss^alpha) computed as a full matrix on p.spec and projected on the
/// dressed pair. Used to cross-check m_diagonal_ss.
struct DressedProjection {
  double b_plus = 0.0;
  double b_minus = 0.0;
  double off_diagonal = 0.0;  ///< |<+|M|->|
  double outside = 0.0;       ///< Frobenius norm of M outside the dressed block
};

DressedProjection dressed_measurement_projection(const SystemParams& p);

/// R_Q = (g^2 eta / kappa)(1 - (g/2E)^2) sin^2(phi). Throws DomainError if g >= 2E.
double rate_RQ(const SystemParams& p);

inline constexpr int kDefaultSeriesTerms = 200;
/// Eigenvalues of rho at or below this are treated as its kernel.
inline constexpr double kSupportThreshold = 1e-12;

struct SeriesResult {
  double value = 0.0;      ///< partial sum through n_terms
  double last_term = 0.0;  ///< magnitude of term n_terms (truncation indicator)
  int support_dim = 0;
  int n_terms = 0;
};

/// General double-sum series for <dH/dt> in powers of rho - 1, given L(rho)
/// and M(rho). Evaluated in the eigenbasis of rho restricted to its support,
/// where each term is a weighted double sum over eigenpairs.
SeriesResult entropy_rate_series(const DensityMatrix& rho, const Matrix& L_rho, const Matrix& M_rho,
                                 int n_terms = kDefaultSeriesTerms);

struct EntropyRateEstimate {
  double estimate = 0.0;
  double std_error = 0.0;
  long samples = 0;
  /// Size of a typical perturbation outside the dressed 2x2 block:
  /// ||Q L P||_F dt + ||Q M P||_F sqrt(dt).
  double leakage_norm = 0.0;
  /// Expected O(dt) offset from the L-leakage alone, -2(1 - ln 2)||Q L P||_F^2 dt;
  /// it vanishes as dt -> 0 and is the whole estimate when M(rho) = 0.
  double leakage_bias = 0.0;
  int subspace_dim = 0;
};

inline constexpr double kDefaultEntropyDt = 1e-4;

/// Sample mean of [H(rho + L dt + M dW) - H(rho)] / dt at rho = rho_ss^alpha.
/// rho + delta lives in span{dressed pair, Q L P, Q M P}; entropies are taken
/// there (at most 6 dimensions) after hermitizing and renormalizing.
EntropyRateEstimate entropy_rate_monte_carlo(const SystemParams& p, long n_traj, double delta_t,
                                             std::uint64_t seed);

/// Average of [H(rho + L dt + M dW) - H(rho)] / dt over dW = +-sqrt(dt),
/// extrapolated to dt -> 0 from dt and dt/2 (Richardson). Entropies of the
/// perturbed matrices are taken after hermitizing and renormalizing.
double entropy_rate_finite_difference(const Matrix& rho, const Matrix& L_rho, const Matrix& M_rho, double dt);

}  // namespace cqed
