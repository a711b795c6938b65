#include "cqed/info_rates.hpp"

#include <cmath>
#include <string>

#include "cqed/dynamics.hpp"
#include "cqed/rng.hpp"
#include "cqed/stats.hpp"
#include "cqed/steady_state.hpp"

namespace cqed {

OriginFit fit_through_origin(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.empty()) throw DimensionError("fit_through_origin: bad sample sizes");
  double sxx = 0.0, sxy = 0.0, ybar = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
    ybar += y[i];
  }
  ybar /= static_cast<double>(y.size());
  OriginFit f;
  f.slope = sxx > 0.0 ? sxy / sxx : 0.0;
  double ss_res = 0.0, ss_tot = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - f.slope * x[i];
    ss_res += r * r;
    ss_tot += (y[i] - ybar) * (y[i] - ybar);
  }
  f.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : (ss_res == 0.0 ? 1.0 : 0.0);
  return f;
}

DiagonalPair::DiagonalPair(Eigen::VectorXd a, Eigen::VectorXd b) : a_(std::move(a)), b_(std::move(b)) {
  if (a_.size() != b_.size() || a_.size() == 0) throw DomainError("DiagonalPair: a and b must have equal, non-zero length");
  if (a_.minCoeff() <= 0.0) throw DomainError("DiagonalPair: every a_k must be positive");
  if (std::abs(a_.sum() - 1.0) > 1e-10) throw DomainError("DiagonalPair: a must sum to 1");
  if (std::abs(b_.sum()) > 1e-8) throw DomainError("DiagonalPair: b must sum to 0");
}

double entropy_rate_diagonal(const DiagonalPair& d) {
  return -(d.b().array().square() / (2.0 * d.a().array())).sum();
}

DiagonalPair m_diagonal_ss(const SystemParams& p) {
  p.require_strong_driving();
  const double x = p.coupling_ratio();
  const double b = p.g * std::sin(p.phi) * std::sqrt(p.eta / (2.0 * p.kappa) * (1.0 - x) * (1.0 + x));
  return DiagonalPair(Eigen::Vector2d(0.5, 0.5), Eigen::Vector2d(b, -b));
}

DressedProjection dressed_measurement_projection(const SystemParams& p) {
  const DressedBasis basis = dressed_basis(p);
  const DensityMatrix rho = rho_ss_analytic(p);
  const Matrix M = measurement_apply(rho, p);
  Matrix V(p.spec.dim(), 2);
  V.col(0) = basis.plus.vector();
  V.col(1) = basis.minus.vector();
  const Matrix block = V.adjoint() * M * V;
  DressedProjection out;
  out.b_plus = std::real(block(0, 0));
  out.b_minus = std::real(block(1, 1));
  out.off_diagonal = std::abs(block(0, 1));
  out.outside = (M - V * block * V.adjoint()).norm();
  return out;
}

double rate_RQ(const SystemParams& p) {
  p.require_strong_driving();
  const double x = p.coupling_ratio();
  const double s = std::sin(p.phi);
  return p.g * p.g * p.eta / p.kappa * (1.0 - x) * (1.0 + x) * s * s;
}

SeriesResult entropy_rate_series(const DensityMatrix& rho, const Matrix& L_rho, const Matrix& M_rho, int n_terms) {
  if (n_terms < 1) throw DomainError("entropy_rate_series needs n_terms >= 1");
  const int d = rho.dim();
  if (L_rho.rows() != d || L_rho.cols() != d || M_rho.rows() != d || M_rho.cols() != d)
    throw DimensionError("entropy_rate_series: L(rho), M(rho) must match rho");

  Eigen::SelfAdjointEigenSolver<Matrix> es(hermitize(rho.matrix()));
  std::vector<int> support;
  for (int k = 0; k < d; ++k)
    if (es.eigenvalues()(k) > kSupportThreshold) support.push_back(k);
  const int m = static_cast<int>(support.size());
  Matrix V(d, m);
  Eigen::VectorXd t(m);
  for (int k = 0; k < m; ++k) {
    V.col(k) = es.eigenvectors().col(support[k]);
    t(k) = es.eigenvalues()(support[k]) - 1.0;
  }
  const Eigen::VectorXd Ldiag = (V.adjoint() * L_rho * V).diagonal().real();
  const Eigen::MatrixXd w = (V.adjoint() * M_rho * V).cwiseAbs2();

  // S_n(i,j) = sum_{s<n} (s+1) t_i^s t_j^{n-1-s};  S_{n+1} = t_j S_n + (n+1) t_i^n.
  Eigen::MatrixXd S_prev = Eigen::MatrixXd::Zero(m, m);
  Eigen::MatrixXd S = Eigen::MatrixXd::Ones(m, m);
  Eigen::VectorXd t_pow = Eigen::VectorXd::Ones(m);  // t_i^(n-1)
  SeriesResult r;
  r.support_dim = m;
  r.n_terms = n_terms;
  for (int n = 1; n <= n_terms; ++n) {
    const Eigen::VectorXd t_pow_n = t_pow.cwiseProduct(t);  // t_i^n
    double term = (Ldiag.array() * ((n + 1.0) * t_pow_n.array() + n * t_pow.array())).sum();
    term += (w.array() * (S + S_prev).array()).sum();
    term *= (n % 2 == 0 ? 1.0 : -1.0) / n;
    r.value += term;
    r.last_term = std::abs(term);

    Eigen::MatrixXd S_next(m, m);
    for (int j = 0; j < m; ++j)
      for (int i = 0; i < m; ++i) S_next(i, j) = t(j) * S(i, j) + (n + 1.0) * t_pow_n(i);
    S_prev = std::move(S);
    S = std::move(S_next);
    t_pow = t_pow_n;
  }
  return r;
}

EntropyRateEstimate entropy_rate_monte_carlo(const SystemParams& p, long n_traj, double delta_t,
                                             std::uint64_t seed) {
  if (n_traj < 2) throw DomainError("entropy_rate_monte_carlo needs at least two samples");
  if (!(delta_t > 0.0)) throw DomainError("delta_t must be positive");
  const DressedBasis basis = dressed_basis(p);
  const DensityMatrix rho = rho_ss_analytic(p);
  const Matrix L = liouvillian_apply(rho, p);
  const Matrix M = measurement_apply(rho, p);
  const int d = p.spec.dim();

  Matrix P(d, 2);
  P.col(0) = basis.plus.vector();
  P.col(1) = basis.minus.vector();
  const Matrix Q = Matrix::Identity(d, d) - P * P.adjoint();
  const Matrix QLP = Q * L * P;
  const Matrix QMP = Q * M * P;

  Matrix leak(d, 4);
  leak << QLP, QMP;
  Eigen::ColPivHouseholderQR<Matrix> qr(leak);
  qr.setThreshold(1e-10);
  const int extra = static_cast<int>(qr.rank());
  const Matrix q_full = qr.householderQ();
  Matrix Vb(d, 2 + extra);
  Vb << P, q_full.leftCols(extra);
  const int rank = 2 + extra;
  const Matrix Rc = Vb.adjoint() * rho.matrix() * Vb;
  const Matrix Lc = Vb.adjoint() * L * Vb;
  const Matrix Mc = Vb.adjoint() * M * Vb;
  const double h0 = von_neumann_entropy(rho);

  EntropyRateEstimate out;
  out.subspace_dim = rank;
  out.leakage_norm = QLP.norm() * delta_t + QMP.norm() * std::sqrt(delta_t);
  out.leakage_bias = -2.0 * (1.0 - std::log(2.0)) * QLP.squaredNorm() * delta_t;
  RunningStats stats;
  NormalStream noise(seed);
  for (long k = 0; k < n_traj; ++k) {
    const double dW = noise.wiener(delta_t);
    Matrix X = hermitize(Rc + Lc * delta_t + Mc * dW);
    const double tr = std::real(X.trace());
    if (!(tr > 0.0) || !std::isfinite(tr))
      throw InvalidStateError("perturbed state has non-positive trace at sample " + std::to_string(k));
    X /= tr;
    stats.add((hermitian_entropy(X) - h0) / delta_t);
  }
  out.estimate = stats.mean();
  out.std_error = stats.std_error();
  out.samples = static_cast<long>(stats.count());
  return out;
}

double entropy_rate_finite_difference(const Matrix& rho, const Matrix& L_rho, const Matrix& M_rho, double dt) {
  if (!(dt > 0.0)) throw DomainError("dt must be positive");
  const double h0 = hermitian_entropy(rho);
  auto two_point = [&](double h) {
    double sum = 0.0;
    for (double sign : {1.0, -1.0}) {
      Matrix x = hermitize(rho + L_rho * h + M_rho * (sign * std::sqrt(h)));
      x /= std::real(x.trace());
      sum += hermitian_entropy(x);
    }
    return (0.5 * sum - h0) / h;
  };
  return 2.0 * two_point(0.5 * dt) - two_point(dt);
}

}  // namespace cqed
