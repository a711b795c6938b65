#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "cqed/banded.hpp"
#include "cqed/hilbert.hpp"
#include "cqed/params.hpp"

namespace cqed {

/// Precomputed generators of the driven, homodyne-monitored cavity.
///
///   L(rho) = [E(a^+ - a) + g(a^+ sigma - sigma^+ a), rho] + kappa (2 a rho a^+ - a^+ a rho - rho a^+ a)
///   M(rho) = sqrt(2 kappa eta) (e^{-i phi} a rho + e^{i phi} rho a^+ - tr[rho(e^{-i phi} a + e^{i phi} a^+)] rho)
///
/// The dissipator normalization kappa(2 a rho a^+ - ...) is the one whose
/// empty-cavity steady state is the coherent amplitude E/kappa.
///
/// Internally a = l + c, with l the ladder of the (possibly centred) basis and
/// c = spec.center. The constant part is folded into an equivalent
/// anti-Hermitian generator so that no O(|c|^2) cancellations happen on the
/// hot path.
class CavityModel {
 public:
  explicit CavityModel(const SystemParams& p);

  const SystemParams& params() const { return params_; }
  const FockSpec& spec() const { return params_.spec; }
  int dim() const { return params_.spec.dim(); }

  Matrix liouvillian(const Matrix& rho) const;

  /// Assumes tr rho = 1.
  Matrix measurement(const Matrix& rho) const;

  /// tr[rho (e^{i phi} a^+ + e^{-i phi} a)] (lab-frame quadrature).
  double quadrature_mean(const Matrix& rho) const;

  /// dq = 2 kappa eta <X_phi> dt + sqrt(2 kappa eta) dW.
  double photocurrent(const Matrix& rho, double dt, double dW) const;

  /// Dense superoperator acting on column-stacked rho (size d^2 x d^2).
  Matrix liouvillian_superoperator() const;

  // Generators in the internal (centred) representation; exposed for tests and benchmarks.
  const BandedOperator& hamiltonian_generator() const { return generator_; }
  const BandedOperator& ladder() const { return ladder_; }

 private:
  friend class KrausStepper;

  SystemParams params_;
  BandedOperator generator_;   // anti-Hermitian, commutator part of L
  BandedOperator ladder_;      // l
  BandedOperator ladder_dag_;  // l^+
  BandedOperator number_;      // l^+ l
  BandedOperator quadrature_;  // e^{-i phi} l + e^{i phi} l^+
  double center_quadrature_ = 0.0;  // 2 Re(e^{-i phi} c)
  double meas_scale_ = 0.0;         // sqrt(2 kappa eta)
};

/// L(rho) for a validated state. Throws DimensionError if rho does not live in p.spec.
Matrix liouvillian_apply(const DensityMatrix& rho, const SystemParams& p);

/// M(rho) for a validated (unit-trace) state.
Matrix measurement_apply(const DensityMatrix& rho, const SystemParams& p);

/// Photocharge increment sharing the noise sample dW with the paired state update.
double photocurrent_increment(const DensityMatrix& rho, const SystemParams& p, double dt, double dW);

/// Counters accumulated by the steppers.
struct StepDiagnostics {
  long steps = 0;
  long clip_events = 0;              ///< steps whose min eigenvalue fell below -1e-8
  double max_trace_deviation = 0.0;  ///< |tr - 1| before renormalization
  double max_top_level_population = 0.0;  ///< population of the highest Fock level (truncation monitor)

  double clip_fraction() const { return steps > 0 ? static_cast<double>(clip_events) / steps : 0.0; }
};

/// Euler-Maruyama step of d rho = L dt + M dW, followed by hermitization,
/// renormalization and (only when min eigenvalue < -1e-8) eigenvalue clipping.
/// Throws StabilityError if the trace before renormalization is off by more than 1e-3.
Matrix euler_maruyama_step(const CavityModel& model, const Matrix& rho, double dt, double dW,
                           StepDiagnostics* diag = nullptr);

DensityMatrix sme_step(const DensityMatrix& rho, const SystemParams& p, double dt, double dW,
                       StepDiagnostics* diag = nullptr);

/// First-order completely positive (Kraus-form) step of the same Ito equation:
///   rho' ~ K rho K^+ + (1 - eta) dt C rho C^+,  K = 1 + (A - C^+C/2) dt + sqrt(eta) C dy,
///   dy = sqrt(eta) <C + C^+> dt + dW,  C = sqrt(2 kappa) e^{-i phi} a.
/// Agrees with the Euler-Maruyama update to O(dt) and keeps rho positive by
/// construction, which matters for the rank-deficient dressed states.
class KrausStepper {
 public:
  KrausStepper(const CavityModel& model, double dt);

  /// Throws StabilityError if the normalization leaves (0, 2).
  Matrix step(const Matrix& rho, double dW, StepDiagnostics* diag = nullptr) const;

  double dt() const { return dt_; }

 private:
  const CavityModel* model_;
  double dt_;
  BandedOperator drift_;     // 1 + (A - C^+C/2) dt
  BandedOperator jump_;      // C
  Matrix scratch_left_;
};

enum class Integrator { euler_maruyama, kraus };

std::string to_string(Integrator integrator);
Integrator integrator_from_string(const std::string& name);

struct TrajectoryOptions {
  Integrator integrator = Integrator::kraus;
  long store_every = 0;  ///< keep a state snapshot every N steps (0: none)
  /// Called with (step index, state after the step).
  std::function<void(long, const Matrix&)> observer;
};

/// Seeded realization of (W, q, rho) from one integration.
struct TrajectoryRecord {
  SystemParams params;
  double dt = 0.0;
  std::uint64_t seed = 0;
  Integrator integrator = Integrator::kraus;
  std::vector<double> noise;   ///< Wiener increments dW, each ~ N(0, dt)
  std::vector<double> charge;  ///< photocharge increments dq
  std::vector<long> state_steps;
  std::vector<DensityMatrix> states;
  StepDiagnostics diagnostics;
  Matrix final_state;
};

/// Number of steps ceil(t_final / dt) (robust to round-off in the ratio).
long step_count(double t_final, double dt);

/// Deterministic given `seed`. Throws StabilityError carrying the step index.
TrajectoryRecord simulate_trajectory(const DensityMatrix& rho0, const SystemParams& p, double t_final, double dt,
                                     std::uint64_t seed, const TrajectoryOptions& options = {});

/// Text form: '#'-prefixed header lines (parameters, dt, seed, version, RNG), then "step,dW,dq" rows.
void write_record_text(std::ostream& os, const TrajectoryRecord& record);

/// Binary form: magic "CQEDTRJ1", u64 header length, JSON header, u64 row count,
/// rows of (u64 step, f64 dW, f64 dq), little-endian.
void write_record_binary(std::ostream& os, const TrajectoryRecord& record);

struct RecordRows {
  std::string header_json;
  std::vector<double> noise;
  std::vector<double> charge;
};

RecordRows read_record_binary(std::istream& is);

}  // namespace cqed
