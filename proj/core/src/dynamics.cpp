#include "cqed/dynamics.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <istream>
#include <ostream>

#include "json.hpp"

#include "cqed/format.hpp"
#include "cqed/rng.hpp"
#include "cqed/version.hpp"

namespace cqed {

namespace {

Matrix field_ladder_joint(const FockSpec& spec) {
  const int d = spec.dim();
  Matrix l = Matrix::Zero(d, d);
  for (int n = 1; n < spec.field_dim(); ++n) {
    const double s = std::sqrt(static_cast<double>(n));
    l(basis_index(n - 1, Atom::ground), basis_index(n, Atom::ground)) = s;
    l(basis_index(n - 1, Atom::excited), basis_index(n, Atom::excited)) = s;
  }
  return l;
}

void require_spec(const DensityMatrix& rho, const SystemParams& p) {
  if (rho.spec() != p.spec) throw DimensionError("state and parameters refer to different Fock spaces");
}

double top_level_population(const Matrix& rho, const FockSpec& spec) {
  const int n = spec.n_max;
  return std::real(rho(basis_index(n, Atom::ground), basis_index(n, Atom::ground)) +
                   rho(basis_index(n, Atom::excited), basis_index(n, Atom::excited)));
}

}  // namespace

CavityModel::CavityModel(const SystemParams& p) : params_(p) {
  params_.validate_dynamics();
  const FockSpec& spec = params_.spec;
  const Complex c = spec.center;
  const Matrix l = field_ladder_joint(spec);
  const Matrix ld = l.adjoint();
  const Matrix s = make_sigma(spec).matrix;
  const Matrix sd = s.adjoint();
  const double E = params_.E;
  const double g = params_.g;
  const double k = params_.kappa;

  // E(a^+ - a) with a = l + c, plus the commutator generated by shifting the
  // dissipator, kappa [c* l - c l^+, .]; scalars drop out of the commutator.
  const Matrix generator = (E - k * c) * ld - (E - k * std::conj(c)) * l + g * (ld * s - sd * l) +
                           g * (std::conj(c) * s - c * sd);
  generator_ = BandedOperator::from_dense(generator);
  ladder_ = BandedOperator::from_dense(l);
  ladder_dag_ = BandedOperator::from_dense(ld);
  number_ = BandedOperator::from_dense(ld * l);
  const Complex phase = std::polar(1.0, -params_.phi);
  quadrature_ = BandedOperator::from_dense(phase * l + std::conj(phase) * ld);
  center_quadrature_ = 2.0 * std::real(phase * c);
  meas_scale_ = std::sqrt(2.0 * k * params_.eta);
}

Matrix CavityModel::liouvillian(const Matrix& rho) const {
  const int d = dim();
  if (rho.rows() != d || rho.cols() != d) throw DimensionError("liouvillian: operand dimension mismatch");
  const double k = params_.kappa;
  Matrix out = Matrix::Zero(d, d);
  generator_.add_left_product(rho, 1.0, out);
  generator_.add_right_product(rho, -1.0, out);
  const Matrix lr = ladder_.left(rho);
  ladder_dag_.add_right_product(lr, 2.0 * k, out);
  number_.add_left_product(rho, -k, out);
  number_.add_right_product(rho, -k, out);
  return out;
}

Matrix CavityModel::measurement(const Matrix& rho) const {
  const int d = dim();
  if (rho.rows() != d || rho.cols() != d) throw DimensionError("measurement: operand dimension mismatch");
  const Complex phase = std::polar(1.0, -params_.phi);
  Matrix out = Matrix::Zero(d, d);
  ladder_.add_left_product(rho, meas_scale_ * phase, out);
  ladder_dag_.add_right_product(rho, meas_scale_ * std::conj(phase), out);
  const double x = std::real(quadrature_.trace_product(rho));
  out -= (meas_scale_ * x) * rho;
  return out;
}

double CavityModel::quadrature_mean(const Matrix& rho) const {
  return std::real(quadrature_.trace_product(rho)) + center_quadrature_ * std::real(rho.trace());
}

double CavityModel::photocurrent(const Matrix& rho, double dt, double dW) const {
  const double k = params_.kappa;
  const double eta = params_.eta;
  return 2.0 * k * eta * quadrature_mean(rho) * dt + std::sqrt(2.0 * k * eta) * dW;
}

Matrix CavityModel::liouvillian_superoperator() const {
  const int d = dim();
  const double k = params_.kappa;
  const Matrix A = generator_.to_dense();
  const Matrix l = ladder_.to_dense();
  const Matrix n = number_.to_dense();
  const Matrix I = Matrix::Identity(d, d);
  auto kron = [d](const Matrix& x, const Matrix& y) {
    Matrix out(d * d, d * d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) out.block(i * d, j * d, d, d) = x(i, j) * y;
    return out;
  };
  // vec(X rho Y) = (Y^T (x) X) vec(rho), column stacking.
  return kron(I, A) - kron(A.transpose(), I) + 2.0 * k * kron(l.conjugate(), l) - k * kron(I, n) -
         k * kron(n.transpose(), I);
}

Matrix liouvillian_apply(const DensityMatrix& rho, const SystemParams& p) {
  require_spec(rho, p);
  return CavityModel(p).liouvillian(rho.matrix());
}

Matrix measurement_apply(const DensityMatrix& rho, const SystemParams& p) {
  require_spec(rho, p);
  return CavityModel(p).measurement(rho.matrix());
}

double photocurrent_increment(const DensityMatrix& rho, const SystemParams& p, double dt, double dW) {
  require_spec(rho, p);
  return CavityModel(p).photocurrent(rho.matrix(), dt, dW);
}

Matrix euler_maruyama_step(const CavityModel& model, const Matrix& rho, double dt, double dW,
                           StepDiagnostics* diag) {
  if (!(dt > 0.0)) throw DomainError("time step must be positive");
  Matrix next = rho + model.liouvillian(rho) * dt + model.measurement(rho) * dW;
  const Complex tr = next.trace();
  const double deviation = std::abs(tr - Complex(1.0, 0.0));
  if (!std::isfinite(deviation) || deviation > 1e-3)
    throw StabilityError("trace drifted by " + std::to_string(deviation) + " in one step; reduce dt");
  next = hermitize(next);
  next /= std::real(next.trace());

  bool clipped = false;
  Eigen::SelfAdjointEigenSolver<Matrix> es(next);
  if (es.eigenvalues().minCoeff() < -DensityMatrix::kPositivityTol) {
    const Eigen::VectorXd w = es.eigenvalues().cwiseMax(0.0);
    next = es.eigenvectors() * w.asDiagonal() * es.eigenvectors().adjoint();
    next = hermitize(next);
    next /= std::real(next.trace());
    clipped = true;
  }
  if (diag) {
    ++diag->steps;
    if (clipped) ++diag->clip_events;
    diag->max_trace_deviation = std::max(diag->max_trace_deviation, deviation);
    diag->max_top_level_population =
        std::max(diag->max_top_level_population, top_level_population(next, model.spec()));
  }
  return next;
}

DensityMatrix sme_step(const DensityMatrix& rho, const SystemParams& p, double dt, double dW,
                       StepDiagnostics* diag) {
  require_spec(rho, p);
  return adopt_density_matrix(euler_maruyama_step(CavityModel(p), rho.matrix(), dt, dW, diag), p.spec);
}

KrausStepper::KrausStepper(const CavityModel& model, double dt) : model_(&model), dt_(dt) {
  if (!(dt > 0.0)) throw DomainError("time step must be positive");
  const SystemParams& p = model.params();
  const Matrix A = model.generator_.to_dense();
  const Matrix N = model.number_.to_dense();
  const Matrix I = Matrix::Identity(model.dim(), model.dim());
  // C^+ C = 2 kappa l^+ l
  drift_ = BandedOperator::from_dense(I + (A - p.kappa * N) * dt);
  jump_ = BandedOperator::from_dense(std::sqrt(2.0 * p.kappa) * std::polar(1.0, -p.phi) * model.ladder_.to_dense());
}

Matrix KrausStepper::step(const Matrix& rho, double dW, StepDiagnostics* diag) const {
  const SystemParams& p = model_->params();
  const int d = model_->dim();
  const double sqrt_eta = std::sqrt(p.eta);
  const double c_mean = 2.0 * std::real(jump_.trace_product(rho));
  const double dy = sqrt_eta * c_mean * dt_ + dW;
  const double w = sqrt_eta * dy;

  // Y = K rho, out = Y K^+, K = drift + w C
  Matrix y = Matrix::Zero(d, d);
  drift_.add_left_product(rho, 1.0, y);
  jump_.add_left_product(rho, w, y);
  // Y K^+ = (K Y^+)^+ ; Y^+ = rho K^+ is not available, so form K Y^+ and take the adjoint.
  const Matrix yd = y.adjoint();
  Matrix out = Matrix::Zero(d, d);
  drift_.add_left_product(yd, 1.0, out);
  jump_.add_left_product(yd, w, out);
  out.adjointInPlace();
  if (p.eta < 1.0) {
    const Matrix cr = jump_.left(rho);
    const Matrix crd = cr.adjoint();  // rho C^+
    Matrix ccd = Matrix::Zero(d, d);
    jump_.add_left_product(crd, 1.0, ccd);  // C (rho C^+)^+ ... = C rho C^+ after adjoint
    out += (1.0 - p.eta) * dt_ * ccd.adjoint();
  }
  const double tr = std::real(out.trace());
  const double deviation = std::abs(tr - 1.0);
  if (!std::isfinite(tr) || tr <= 0.0 || deviation >= 1.0)
    throw StabilityError("Kraus normalization " + std::to_string(tr) + " out of range; reduce dt");
  out = hermitize(out);
  out /= std::real(out.trace());
  if (diag) {
    ++diag->steps;
    diag->max_trace_deviation = std::max(diag->max_trace_deviation, deviation);
    diag->max_top_level_population =
        std::max(diag->max_top_level_population, top_level_population(out, model_->spec()));
  }
  return out;
}

std::string to_string(Integrator integrator) {
  return integrator == Integrator::kraus ? "kraus" : "euler-maruyama";
}

Integrator integrator_from_string(const std::string& name) {
  if (name == "kraus") return Integrator::kraus;
  if (name == "euler-maruyama" || name == "euler_maruyama" || name == "em") return Integrator::euler_maruyama;
  throw DomainError("unknown integrator '" + name + "'");
}

long step_count(double t_final, double dt) {
  if (!(t_final > 0.0) || !(dt > 0.0)) throw DomainError("t_final and dt must be positive");
  const double ratio = t_final / dt;
  const double nearest = std::round(ratio);
  if (std::abs(ratio - nearest) <= 1e-9 * std::max(1.0, nearest)) return static_cast<long>(nearest);
  return static_cast<long>(std::ceil(ratio));
}

TrajectoryRecord simulate_trajectory(const DensityMatrix& rho0, const SystemParams& p, double t_final, double dt,
                                     std::uint64_t seed, const TrajectoryOptions& options) {
  require_spec(rho0, p);
  const long n = step_count(t_final, dt);
  const CavityModel model(p);

  TrajectoryRecord rec;
  rec.params = p;
  rec.dt = dt;
  rec.seed = seed;
  rec.integrator = options.integrator;
  rec.noise.reserve(n);
  rec.charge.reserve(n);

  NormalStream noise(seed);
  Matrix rho = rho0.matrix();
  std::optional<KrausStepper> kraus;
  if (options.integrator == Integrator::kraus) kraus.emplace(model, dt);

  for (long step = 0; step < n; ++step) {
    const double dW = noise.wiener(dt);
    rec.noise.push_back(dW);
    rec.charge.push_back(model.photocurrent(rho, dt, dW));
    try {
      rho = kraus ? kraus->step(rho, dW, &rec.diagnostics)
                  : euler_maruyama_step(model, rho, dt, dW, &rec.diagnostics);
    } catch (const StabilityError& e) {
      throw StabilityError(e.what(), step);
    }
    if (options.observer) options.observer(step, rho);
    if (options.store_every > 0 && (step + 1) % options.store_every == 0) {
      rec.state_steps.push_back(step + 1);
      rec.states.push_back(adopt_density_matrix(rho, p.spec));
    }
  }
  rec.final_state = std::move(rho);
  return rec;
}

namespace {

nlohmann::json record_header(const TrajectoryRecord& r) {
  const auto& p = r.params;
  return {{"E", p.E},
          {"g", p.g},
          {"kappa", p.kappa},
          {"eta", p.eta},
          {"phi", p.phi},
          {"n_max", p.spec.n_max},
          {"center_re", p.spec.center.real()},
          {"center_im", p.spec.center.imag()},
          {"dt", r.dt},
          {"seed", r.seed},
          {"steps", r.noise.size()},
          {"integrator", to_string(r.integrator)},
          {"code_version", std::string(kVersion)},
          {"rng", std::string(kRngAlgorithm)}};
}

constexpr char kMagic[8] = {'C', 'Q', 'E', 'D', 'T', 'R', 'J', '1'};

template <class T>
void put(std::ostream& os, T v) {
  static_assert(std::endian::native == std::endian::little, "binary records assume a little-endian host");
  os.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <class T>
T get(std::istream& is) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof v);
  if (!is) throw Error("truncated binary trajectory record");
  return v;
}

}  // namespace

void write_record_text(std::ostream& os, const TrajectoryRecord& record) {
  const nlohmann::json h = record_header(record);
  for (const auto& [key, value] : h.items()) os << "# " << key << ": " << value.dump() << '\n';
  os << "step,dW,dq\n";
  for (std::size_t i = 0; i < record.noise.size(); ++i)
    os << i << ',' << format_double(record.noise[i]) << ',' << format_double(record.charge[i]) << '\n';
}

void write_record_binary(std::ostream& os, const TrajectoryRecord& record) {
  const std::string header = record_header(record).dump();
  os.write(kMagic, sizeof kMagic);
  put<std::uint64_t>(os, header.size());
  os.write(header.data(), static_cast<std::streamsize>(header.size()));
  put<std::uint64_t>(os, record.noise.size());
  for (std::size_t i = 0; i < record.noise.size(); ++i) {
    put<std::uint64_t>(os, i);
    put<double>(os, record.noise[i]);
    put<double>(os, record.charge[i]);
  }
}

RecordRows read_record_binary(std::istream& is) {
  char magic[sizeof kMagic];
  is.read(magic, sizeof magic);
  if (!is || std::memcmp(magic, kMagic, sizeof kMagic) != 0) throw Error("not a binary trajectory record");
  RecordRows rows;
  const auto header_len = get<std::uint64_t>(is);
  rows.header_json.resize(header_len);
  is.read(rows.header_json.data(), static_cast<std::streamsize>(header_len));
  const auto n = get<std::uint64_t>(is);
  rows.noise.reserve(n);
  rows.charge.reserve(n);
  for (std::uint64_t i = 0; i < n; ++i) {
    if (get<std::uint64_t>(is) != i) throw Error("binary trajectory record rows out of order");
    rows.noise.push_back(get<double>(is));
    rows.charge.push_back(get<double>(is));
  }
  return rows;
}

}  // namespace cqed
