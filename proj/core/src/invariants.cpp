#include <cmath>
#include <numbers>
#include <string>

#include "cqed/bayes.hpp"
#include "cqed/experiments.hpp"
#include "cqed/format.hpp"
#include "cqed/info_rates.hpp"
#include "cqed/rng.hpp"
#include "cqed/stats.hpp"
#include "cqed/steady_state.hpp"

namespace cqed {

namespace {

std::string fmt(double x) { return format_double(x); }

Matrix random_complex(int d, NormalStream& rng) {
  Matrix m(d, d);
  for (int j = 0; j < d; ++j)
    for (int i = 0; i < d; ++i) m(i, j) = Complex(rng(), rng());
  return m;
}

Matrix random_density(int d, NormalStream& rng) {
  const Matrix g = random_complex(d, rng);
  Matrix rho = g * g.adjoint();
  rho /= std::real(rho.trace());
  return hermitize(rho);
}

Matrix random_unitary(int d, NormalStream& rng) {
  Eigen::HouseholderQR<Matrix> qr(random_complex(d, rng));
  return qr.householderQ();
}

SystemParams strong(double phi, double E = 10.0, double g = 1.0, double kappa = 1.0, double eta = 1.0) {
  SystemParams p;
  p.E = E;
  p.g = g;
  p.kappa = kappa;
  p.eta = eta;
  p.phi = phi;
  return with_centered_spec(p);
}

Check bounded(const std::string& name, double value, double limit) {
  return {name, value <= limit, "max deviation " + fmt(value) + (value <= limit ? " <= " : " > ") + fmt(limit)};
}

}  // namespace

std::vector<Check> run_invariant_suite(std::uint64_t seed) {
  std::vector<Check> out;
  NormalStream rng(derive_seed(seed, 0));
  const double pi = std::numbers::pi;

  {  // [a, a^+] = 1 below the top level
    const FockSpec spec(12);
    const Matrix a = make_annihilation(spec).matrix;
    const Matrix c = a * a.adjoint() - a.adjoint() * a;
    const int keep = 2 * spec.n_max;
    const double dev = (c.topLeftCorner(keep, keep) - Matrix::Identity(keep, keep)).cwiseAbs().maxCoeff();
    out.push_back(bounded("ladder_commutator", dev, 1e-12));
  }
  {  // ||(a - alpha)|alpha>|| with the truncation test passing
    double worst = 0.0;
    for (Complex alpha : {Complex(2.0, 1.0), Complex(0.5, -1.5), Complex(3.0, 0.0)}) {
      const FockSpec spec(recommended_n_max(alpha));
      const Vector f = coherent_state(alpha, spec);
      Matrix a = Matrix::Zero(spec.field_dim(), spec.field_dim());
      for (int n = 1; n < spec.field_dim(); ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
      worst = std::max(worst, (a * f - alpha * f).norm());
    }
    out.push_back(bounded("coherent_eigenvector", worst, 1e-5));
  }
  {  // dressed pair orthogonal
    double worst = 0.0;
    for (Complex alpha : {Complex(0.0, 0.0), Complex(1.0, 1.0), Complex(2.5, -0.7), Complex(9.975, 0.499375)}) {
      const FockSpec spec(recommended_n_max(alpha, alpha.real()), alpha.real());
      const auto plus = dressed_state(Branch::plus, alpha, spec);
      const auto minus = dressed_state(Branch::minus, alpha, spec);
      worst = std::max(worst, std::abs(plus.vector().dot(minus.vector())));
    }
    out.push_back(bounded("dressed_orthogonality", worst, 1e-10));
  }
  {  // 0 <= H <= ln d, invariant under unitaries
    const FockSpec spec(4);
    const int d = spec.dim();
    double below = 0.0, above = 0.0, unitary = 0.0;
    for (int k = 0; k < 20; ++k) {
      Matrix rho = random_density(d, rng);
      if (k % 4 == 0) {  // low rank
        const Vector v = random_complex(d, rng).col(0).normalized();
        rho = v * v.adjoint();
      }
      const DensityMatrix dm(rho, spec);
      const double h = von_neumann_entropy(dm);
      below = std::max(below, -h);
      above = std::max(above, h - std::log(static_cast<double>(d)));
      const Matrix u = random_unitary(d, rng);
      const double hu = von_neumann_entropy(DensityMatrix(hermitize(u * rho * u.adjoint()), spec));
      unitary = std::max(unitary, std::abs(hu - h));
    }
    out.push_back({"entropy_bounds", below <= 0.0 && above <= 1e-12,
                   "min H = " + fmt(-below) + ", max H - ln d = " + fmt(above)});
    out.push_back(bounded("entropy_unitary_invariance", unitary, 1e-8));
  }
  {  // L and M: Hermitian, traceless
    const SystemParams p = strong(pi / 3);
    double worst_l = 0.0, worst_m = 0.0;
    for (int k = 0; k < 10; ++k) {
      const DensityMatrix rho(random_density(p.spec.dim(), rng), p.spec);
      const Matrix L = liouvillian_apply(rho, p);
      const Matrix M = measurement_apply(rho, p);
      worst_l = std::max({worst_l, std::abs(L.trace()), (L - L.adjoint()).cwiseAbs().maxCoeff()});
      worst_m = std::max({worst_m, std::abs(M.trace()), (M - M.adjoint()).cwiseAbs().maxCoeff()});
    }
    out.push_back(bounded("liouvillian_traceless_hermitian", worst_l, 1e-10));
    out.push_back(bounded("measurement_traceless_hermitian", worst_m, 1e-10));
  }
  {  // Euler-Maruyama: pre-renormalization trace deviation at the default dt
    const SystemParams p = strong(pi / 2);
    const CavityModel model(p);
    Matrix rho = rho_ss_analytic(p).matrix();
    StepDiagnostics diag;
    NormalStream noise(derive_seed(seed, 1));
    for (int k = 0; k < 200; ++k) rho = euler_maruyama_step(model, rho, 1e-3, noise.wiener(1e-3), &diag);
    out.push_back(bounded("sme_trace_preservation", diag.max_trace_deviation, 1e-5));
  }
  {  // default (Kraus) integrator: every stored state valid, no clipping needed, at acceptance parameters
    double worst_herm = 0.0, worst_trace = 0.0, worst_neg = 0.0;
    long clips = 0, steps = 0;
    for (double phi : {0.0, pi / 4, pi / 2}) {
      const SystemParams p = strong(phi);
      TrajectoryOptions opt;
      opt.store_every = 50;
      const auto rec = simulate_trajectory(rho_ss_analytic(p), p, 1.0, 1e-3, derive_seed(seed, 2), opt);
      for (const auto& s : rec.states) {
        const StateDefects d = measure_defects(s.matrix());
        worst_herm = std::max(worst_herm, d.hermiticity);
        worst_trace = std::max(worst_trace, d.trace_error);
        worst_neg = std::max(worst_neg, -d.min_eigenvalue);
      }
      clips += rec.diagnostics.clip_events;
      steps += rec.diagnostics.steps;
    }
    const double clip_fraction = static_cast<double>(clips) / static_cast<double>(steps);
    out.push_back({"trajectory_states_valid",
                   worst_herm <= DensityMatrix::kHermiticityTol && worst_trace <= DensityMatrix::kTraceTol &&
                       worst_neg <= DensityMatrix::kPositivityTol,
                   "hermiticity " + fmt(worst_herm) + ", trace " + fmt(worst_trace) + ", negativity " + fmt(worst_neg)});
    out.push_back({"clip_fraction_default_integrator", clip_fraction < 1e-3, "fraction " + fmt(clip_fraction)});
  }
  {  // [M(rho_ss^alpha), rho_ss^alpha] = 0 and H = ln 2
    const SystemParams p = strong(pi / 2);
    const DensityMatrix rho = rho_ss_analytic(p);
    const Matrix M = measurement_apply(rho, p);
    out.push_back(bounded("dressed_mixture_commutes_with_measurement",
                          trace_norm(M * rho.matrix() - rho.matrix() * M), 1e-8));
    out.push_back(bounded("dressed_mixture_entropy_ln2", std::abs(von_neumann_entropy(rho) - std::log(2.0)), 1e-8));
    const DressedProjection proj = dressed_measurement_projection(p);
    const DiagonalPair dp = m_diagonal_ss(p);
    out.push_back(bounded("dressed_projection_matches_closed_form",
                          std::max(std::abs(proj.b_plus - dp.b()(0)), std::abs(proj.b_minus - dp.b()(1))), 1e-6));
  }
  {  // algebraic identities of the closed forms
    double consistency = 0.0, sin_law = 0.0, cos_law = 0.0, tradeoff = 0.0, substitution = 0.0;
    for (double E : {2.0, 10.0, 20.0})
      for (double g : {0.3, 1.0, 2.0})
        for (double eta : {0.25, 0.8, 1.0})
          for (double kappa : {0.5, 1.0, 2.0})
            for (int k = 0; k <= 12; ++k) {
              SystemParams p;
              p.E = E;
              p.g = g;
              p.eta = eta;
              p.kappa = kappa;
              p.phi = k * pi / 24;
              const double v0_sq = 0.09;
              const double rq = rate_RQ(p), rg = rate_Rg(p, v0_sq);
              consistency = std::max(consistency, std::abs(rq + entropy_rate_diagonal(m_diagonal_ss(p))));
              const double s = std::sin(p.phi), c = std::cos(p.phi);
              sin_law = std::max(sin_law, std::abs(rq / rate_RQ(p.with_phi(pi / 2)) - s * s));
              cos_law = std::max(cos_law, std::abs(rg / rate_Rg(p.with_phi(0.0), v0_sq) - c * c));
              const double x2 = (1.0 - p.coupling_ratio()) * (1.0 + p.coupling_ratio());
              tradeoff = std::max(tradeoff, std::abs(rq / (g * g * eta / kappa * x2) +
                                                     rg / (2.0 * v0_sq * eta / kappa * x2) - 1.0));
              const double swapped = rate_RQ(p.with_phi(pi / 2 - p.phi)) * (2.0 * v0_sq) / (g * g);
              substitution = std::max(substitution, std::abs(swapped - rg) / std::max(1.0, std::abs(rg)));
            }
    out.push_back(bounded("RQ_equals_minus_diagonal_rate", consistency, 1e-10));
    out.push_back(bounded("RQ_sin2_law", sin_law, 1e-12));
    out.push_back(bounded("Rg_cos2_law", cos_law, 1e-12));
    out.push_back(bounded("tradeoff_identity", tradeoff, 1e-12));
    out.push_back(bounded("Rg_RQ_substitution", substitution, 1e-12));
  }
  {  // numeric steady state is a fixed point of a noiseless step
    SystemParams p = strong(pi / 2, 2.5, 1.0);
    p = with_centered_spec(p, 12);
    const DensityMatrix rho = rho_ss_numeric(p);
    const double dt = 1e-3;
    const DensityMatrix next = sme_step(rho, p, dt, 0.0);
    out.push_back(bounded("numeric_steady_state_fixed_point", trace_norm(next.matrix() - rho.matrix()), dt * 1e-8));
  }
  {  // analytic residual shrinks from E/g = 2.5 to E/g = 10
    const SystemParams lo = strong(0.0, 2.5, 1.0), hi = strong(0.0, 10.0, 1.0);
    const double r_lo = trace_norm(liouvillian_apply(rho_ss_analytic(lo), lo));
    const double r_hi = trace_norm(liouvillian_apply(rho_ss_analytic(hi), hi));
    out.push_back({"analytic_residual_decreases_with_E", r_hi < r_lo,
                   "||L(rho_ss)||_1 = " + fmt(r_hi) + " at E/g=10 vs " + fmt(r_lo) + " at E/g=2.5"});
  }
  {  // noise statistics
    const double dt = 1e-3;
    const long n = 200000;
    NormalStream noise(derive_seed(seed, 3));
    RunningStats s;
    for (long k = 0; k < n; ++k) s.add(noise.wiener(dt));
    const double mean_rate = s.mean() / dt, mean_se = std::sqrt(dt / n) / dt;
    const double var_se = dt * std::sqrt(2.0 / (n - 1));
    out.push_back({"wiener_increment_statistics",
                   std::abs(mean_rate) <= 4 * mean_se && std::abs(s.variance() - dt) <= 4 * var_se,
                   "mean dW/dt " + fmt(mean_rate) + " (4 se " + fmt(4 * mean_se) + "), var " + fmt(s.variance()) +
                       " vs " + fmt(dt)});
  }
  {  // Delta S linearization within 1% for |q| <= 3 sigma
    SystemParams p;
    p.E = 10;
    p.g = 1;
    p.kappa = 2;
    const double dt = 1e-3;
    const double sigma = std::sqrt(likelihood_mean_variance(1.0, p, dt).variance);
    double worst = 0.0;
    for (int k = -30; k <= 30; ++k) {
      const double q = k * 0.1 * sigma;
      if (q == 0.0) continue;
      const GaussianBelief prior(1.0, 0.09);
      const auto ds = delta_S(prior, posterior_update(prior, q, p, dt));
      worst = std::max(worst, std::abs(ds.exact - ds.linear) / std::abs(ds.exact));
    }
    out.push_back(bounded("delta_S_linearization", worst, 1e-2));
  }
  {  // sequential inference: variance after 1e4 steps below v0^2/2
    SystemParams p;
    p.E = 10;
    p.g = 1;
    p.kappa = 2;
    const auto t = sequential_inference(p, 1.0, GaussianBelief(1.0, 0.09), 10000, 1e-3, derive_seed(seed, 4));
    out.push_back({"posterior_variance_shrinks", t.beliefs.back().variance < 0.045,
                   "variance " + fmt(t.beliefs.back().variance) + " < 0.045"});
  }
  {  // R_Q Monte Carlo linear in eta
    std::vector<double> etas{0.25, 0.5, 1.0}, est;
    for (std::size_t k = 0; k < etas.size(); ++k)
      est.push_back(-entropy_rate_monte_carlo(strong(pi / 2, 10, 1, 1, etas[k]), 10000, 1e-4, derive_seed(seed, 5 + k))
                         .estimate);
    const OriginFit f = fit_through_origin(etas, est);
    out.push_back({"RQ_mc_linear_in_eta", f.r_squared >= 0.99, "R^2 = " + fmt(f.r_squared)});
  }
  return out;
}

}  // namespace cqed
