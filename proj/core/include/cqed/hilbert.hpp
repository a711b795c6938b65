#pragma once

#include <complex>

#include <Eigen/Dense>

#include "cqed/errors.hpp"

namespace cqed {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

inline constexpr Complex kI{0.0, 1.0};

enum class Atom : int { ground = 0, excited = 1 };

/// Truncated Hilbert space of one cavity mode tensored with a two-level atom.
///
/// Tensor ordering is field (x) atom everywhere in the library: the joint basis
/// index of |n>|s> is 2*n + s, with s = 0 for |g> and s = 1 for |e>.
///
/// The field basis may be centred on a coherent amplitude: with a non-zero
/// `center` the field basis vectors are D(center)|n>, n = 0..n_max, where D is
/// the displacement operator. Operators and states built from the spec are
/// always the physical (lab) quantities expressed in that basis, so
/// make_annihilation() returns ladder + center * 1 and a coherent state of
/// amplitude alpha is stored with relative amplitude alpha - center. A strongly
/// driven mode then needs only a handful of levels around its mean field.
struct FockSpec {
  int n_max = 1;
  Complex center{0.0, 0.0};

  FockSpec() = default;
  explicit FockSpec(int n_max_, Complex center_ = {});

  int field_dim() const { return n_max + 1; }
  int dim() const { return 2 * field_dim(); }

  friend bool operator==(const FockSpec&, const FockSpec&) = default;
};

constexpr int basis_index(int n, Atom s) { return 2 * n + static_cast<int>(s); }

/// Default truncation ceil(|z|^2 + 10|z| + 10) for relative amplitude z = amplitude - center.
int recommended_n_max(Complex amplitude, Complex center = {});

/// Operator on the joint space, tagged with the space it acts on.
struct Operator {
  Matrix matrix;
  FockSpec spec;

  Operator adjoint() const { return {matrix.adjoint(), spec}; }
};

/// Unit vector on the joint space.
class PureState {
 public:
  /// Validates the norm (1e-8).
  PureState(Vector vector, FockSpec spec);

  const Vector& vector() const { return vector_; }
  const FockSpec& spec() const { return spec_; }
  Matrix projector() const { return vector_ * vector_.adjoint(); }

 private:
  Vector vector_;
  FockSpec spec_;
};

/// Deviations of a matrix from the density-matrix invariants.
struct StateDefects {
  double hermiticity = 0.0;  ///< max |rho - rho^dagger|
  double trace_error = 0.0;  ///< |tr rho - 1|
  double min_eigenvalue = 0.0;
};

StateDefects measure_defects(const Matrix& rho);

/// Hermitian, unit-trace, numerically positive matrix on the joint space.
class DensityMatrix {
 public:
  static constexpr double kHermiticityTol = 1e-10;
  static constexpr double kTraceTol = 1e-10;
  static constexpr double kPositivityTol = 1e-8;

  /// Throws InvalidStateError if any invariant fails, DimensionError on size mismatch.
  DensityMatrix(Matrix matrix, FockSpec spec);

  static DensityMatrix from_pure(const PureState& psi);

  const Matrix& matrix() const { return matrix_; }
  const FockSpec& spec() const { return spec_; }
  int dim() const { return static_cast<int>(matrix_.rows()); }

  Complex expectation(const Matrix& op) const { return (matrix_ * op).trace(); }

 private:
  struct Unchecked {};
  DensityMatrix(Matrix matrix, FockSpec spec, Unchecked) : matrix_(std::move(matrix)), spec_(spec) {}
  friend DensityMatrix adopt_density_matrix(Matrix, FockSpec);

  Matrix matrix_;
  FockSpec spec_;
};

/// Wraps a matrix that is a density matrix by construction (hermitized,
/// renormalized, positive). Only checks dimensions; used on hot paths.
DensityMatrix adopt_density_matrix(Matrix matrix, FockSpec spec);

/// Field annihilation operator a (x) 1_atom.
Operator make_annihilation(const FockSpec& spec);

/// Atomic lowering operator 1_field (x) |g><e|.
Operator make_sigma(const FockSpec& spec);

Operator make_identity(const FockSpec& spec);

/// Field-factor coefficients of the coherent state |amplitude>, length n_max + 1.
/// Throws TruncationError if the truncated norm is below 1 - 1e-8 before renormalization.
Vector coherent_state(Complex amplitude, const FockSpec& spec);

/// Squared norm of the truncated coherent series before renormalization.
double coherent_truncated_norm(Complex amplitude, const FockSpec& spec);

PureState product_state(const Vector& field, const Eigen::Vector2cd& atom, const FockSpec& spec);

enum class Branch { plus, minus };

/// |alpha;+> = |alpha>(|g> + i|e>)/sqrt(2) and |alpha*;-> = |alpha*>(|g> - i|e>)/sqrt(2).
/// `amplitude` is alpha for both branches; the minus branch conjugates it.
PureState dressed_state(Branch branch, Complex amplitude, const FockSpec& spec);

/// Entropy floor: eigenvalues below this count as exactly zero.
inline constexpr double kEntropyEigenFloor = 1e-12;

/// -sum p ln p over a spectrum, with p < 1e-12 dropped (0 ln 0 = 0).
double spectrum_entropy(const Eigen::VectorXd& eigenvalues);

/// Entropy of an arbitrary Hermitian matrix (hermitized first, negatives clamped).
double hermitian_entropy(const Matrix& m);

/// H(rho) = -tr(rho ln rho) in nats.
double von_neumann_entropy(const DensityMatrix& rho);

Matrix hermitize(const Matrix& m);

/// Sum of singular values.
double trace_norm(const Matrix& m);

/// Half the trace norm of the difference.
double trace_distance(const DensityMatrix& a, const DensityMatrix& b);

}  // namespace cqed
