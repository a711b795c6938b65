#include "cqed/hilbert.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace cqed {

FockSpec::FockSpec(int n_max_, Complex center_) : n_max(n_max_), center(center_) {
  if (n_max < 1) throw DomainError("FockSpec requires n_max >= 1, got " + std::to_string(n_max));
}

int recommended_n_max(Complex amplitude, Complex center) {
  const double r = std::abs(amplitude - center);
  return std::max(1, static_cast<int>(std::ceil(r * r + 10.0 * r + 10.0)));
}

PureState::PureState(Vector vector, FockSpec spec) : vector_(std::move(vector)), spec_(spec) {
  if (vector_.size() != spec_.dim())
    throw DimensionError("pure state has size " + std::to_string(vector_.size()) + ", expected " +
                         std::to_string(spec_.dim()));
  if (std::abs(vector_.norm() - 1.0) > 1e-8) throw InvalidStateError("pure state is not normalized");
}

StateDefects measure_defects(const Matrix& rho) {
  StateDefects d;
  d.hermiticity = (rho - rho.adjoint()).cwiseAbs().maxCoeff();
  d.trace_error = std::abs(rho.trace() - Complex(1.0, 0.0));
  Eigen::SelfAdjointEigenSolver<Matrix> es(hermitize(rho), Eigen::EigenvaluesOnly);
  d.min_eigenvalue = es.eigenvalues().minCoeff();
  return d;
}

DensityMatrix::DensityMatrix(Matrix matrix, FockSpec spec) : matrix_(std::move(matrix)), spec_(spec) {
  if (matrix_.rows() != spec_.dim() || matrix_.cols() != spec_.dim())
    throw DimensionError("density matrix is " + std::to_string(matrix_.rows()) + "x" +
                         std::to_string(matrix_.cols()) + ", expected dimension " + std::to_string(spec_.dim()));
  const StateDefects d = measure_defects(matrix_);
  if (d.hermiticity > kHermiticityTol)
    throw InvalidStateError("density matrix not Hermitian (max deviation " + std::to_string(d.hermiticity) + ")");
  if (d.trace_error > kTraceTol)
    throw InvalidStateError("density matrix trace deviates from 1 by " + std::to_string(d.trace_error));
  if (d.min_eigenvalue < -kPositivityTol)
    throw InvalidStateError("density matrix has eigenvalue " + std::to_string(d.min_eigenvalue));
}

DensityMatrix DensityMatrix::from_pure(const PureState& psi) { return DensityMatrix(psi.projector(), psi.spec()); }

DensityMatrix adopt_density_matrix(Matrix matrix, FockSpec spec) {
  if (matrix.rows() != spec.dim() || matrix.cols() != spec.dim())
    throw DimensionError("density matrix dimension does not match spec");
  return DensityMatrix(std::move(matrix), spec, DensityMatrix::Unchecked{});
}

namespace {

Matrix field_ladder(const FockSpec& spec) {
  const int nf = spec.field_dim();
  Matrix a = Matrix::Zero(nf, nf);
  for (int n = 1; n < nf; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
  return a;
}

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

}  // namespace

Operator make_annihilation(const FockSpec& spec) {
  Matrix a = field_ladder(spec);
  a.diagonal().array() += spec.center;
  return {kron(a, Matrix::Identity(2, 2)), spec};
}

Operator make_sigma(const FockSpec& spec) {
  Matrix s = Matrix::Zero(2, 2);
  s(static_cast<int>(Atom::ground), static_cast<int>(Atom::excited)) = 1.0;
  return {kron(Matrix::Identity(spec.field_dim(), spec.field_dim()), s), spec};
}

Operator make_identity(const FockSpec& spec) { return {Matrix::Identity(spec.dim(), spec.dim()), spec}; }

namespace {

Vector coherent_series(Complex amplitude, const FockSpec& spec) {
  const Complex z = amplitude - spec.center;
  const int nf = spec.field_dim();
  Vector c = Vector::Zero(nf);
  const double r = std::abs(z);
  if (r == 0.0) {
    c(0) = 1.0;
    return c;
  }
  const double log_r = std::log(r);
  const double theta = std::arg(z);
  for (int n = 0; n < nf; ++n) {
    const double log_mag = -0.5 * r * r + n * log_r - 0.5 * std::lgamma(n + 1.0);
    c(n) = std::polar(std::exp(log_mag), n * theta);
  }
  return c;
}

}  // namespace

double coherent_truncated_norm(Complex amplitude, const FockSpec& spec) {
  return coherent_series(amplitude, spec).squaredNorm();
}

Vector coherent_state(Complex amplitude, const FockSpec& spec) {
  Vector c = coherent_series(amplitude, spec);
  const double norm_sq = c.squaredNorm();
  if (norm_sq < 1.0 - 1e-8)
    throw TruncationError("coherent amplitude |" + std::to_string(std::abs(amplitude - spec.center)) +
                          "| needs more than n_max = " + std::to_string(spec.n_max) +
                          " levels (truncated norm^2 " + std::to_string(norm_sq) + ")");
  return c / std::sqrt(norm_sq);
}

PureState product_state(const Vector& field, const Eigen::Vector2cd& atom, const FockSpec& spec) {
  if (field.size() != spec.field_dim()) throw DimensionError("field factor size does not match spec");
  Vector psi(spec.dim());
  for (int n = 0; n < spec.field_dim(); ++n) {
    psi(basis_index(n, Atom::ground)) = field(n) * atom(0);
    psi(basis_index(n, Atom::excited)) = field(n) * atom(1);
  }
  return PureState(psi, spec);
}

PureState dressed_state(Branch branch, Complex amplitude, const FockSpec& spec) {
  const double s = 1.0 / std::sqrt(2.0);
  if (branch == Branch::plus) return product_state(coherent_state(amplitude, spec), {s, kI * s}, spec);
  return product_state(coherent_state(std::conj(amplitude), spec), {s, -kI * s}, spec);
}

double spectrum_entropy(const Eigen::VectorXd& eigenvalues) {
  double h = 0.0;
  for (double p : eigenvalues)
    if (p > kEntropyEigenFloor) h -= p * std::log(p);
  return std::max(0.0, h);
}

double hermitian_entropy(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(hermitize(m), Eigen::EigenvaluesOnly);
  return spectrum_entropy(es.eigenvalues());
}

double von_neumann_entropy(const DensityMatrix& rho) { return hermitian_entropy(rho.matrix()); }

Matrix hermitize(const Matrix& m) { return 0.5 * (m + m.adjoint()); }

double trace_norm(const Matrix& m) {
  Eigen::BDCSVD<Matrix> svd(m);
  return svd.singularValues().sum();
}

double trace_distance(const DensityMatrix& a, const DensityMatrix& b) {
  if (a.spec() != b.spec()) throw DimensionError("trace distance between states on different spaces");
  Eigen::SelfAdjointEigenSolver<Matrix> es(hermitize(a.matrix() - b.matrix()), Eigen::EigenvaluesOnly);
  return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

}  // namespace cqed
