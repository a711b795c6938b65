#include "cqed/bayes.hpp"

#include <cmath>
#include <numbers>
#include <optional>
#include <string>

#include "cqed/dynamics.hpp"
#include "cqed/rng.hpp"
#include "cqed/stats.hpp"
#include "cqed/steady_state.hpp"

namespace cqed {

GaussianBelief::GaussianBelief(double m, double v) : mean(m), variance(v) {
  if (!std::isfinite(m)) throw DomainError("belief mean must be finite");
  if (!(v > 0.0) || !std::isfinite(v)) throw DomainError("belief variance must be positive and finite");
}

double GaussianBelief::entropy() const {
  return 0.5 * std::log(2.0 * std::numbers::pi * std::numbers::e * variance);
}

LikelihoodMoments likelihood_mean_variance(double g, const SystemParams& p, double delta_t) {
  if (!(delta_t > 0.0)) throw DomainError("delta_t must be positive");
  p.validate();
  // even in g; the running mean of a belief may cross zero
  if (!(std::abs(g) < 2.0 * p.E))
    throw DomainError("likelihood requires |g| < 2E (g = " + std::to_string(g) + ", E = " + std::to_string(p.E) + ")");
  const double x = g / (2.0 * p.E);
  return {4.0 * p.E * p.eta * (1.0 - x) * (1.0 + x) * std::cos(p.phi) * delta_t, 2.0 * p.kappa * p.eta * delta_t};
}

GaussianBelief posterior_update(const GaussianBelief& prior, double q, const SystemParams& p, double delta_t) {
  const double kE = p.kappa * p.E;
  const double c = std::cos(p.phi);
  const double denom = kE + q * prior.variance * c;
  if (!(denom > 0.0))
    throw InvalidUpdate("posterior variance undefined: kappa E + q v0^2 cos(phi) = " + std::to_string(denom));
  const double v1 = prior.variance * kE / denom;

  const LikelihoodMoments lm = likelihood_mean_variance(prior.mean, p, delta_t);
  const double slope = -2.0 * p.eta * prior.mean * c * delta_t / p.E;
  const double m1 = prior.mean + v1 * slope * (q - lm.mean) / lm.variance;
  return GaussianBelief(m1, v1);
}

EntropyChange delta_S(const GaussianBelief& prior, const GaussianBelief& posterior) {
  const double ratio = prior.variance / posterior.variance;
  return {-0.5 * std::log(ratio), -0.5 * (ratio - 1.0)};
}

double rate_Rg(const SystemParams& p, double v0_sq) {
  p.require_strong_driving();
  if (!(v0_sq > 0.0)) throw DomainError("prior variance v0^2 must be positive");
  const double x = p.coupling_ratio();
  const double c = std::cos(p.phi);
  return 2.0 * v0_sq * p.eta / p.kappa * (1.0 - x) * (1.0 + x) * c * c;
}

namespace {

// Produces one photocharge per window, either from the likelihood or from a
// conditioned trajectory started at the steady state for g_true.
class ChargeGenerator {
 public:
  ChargeGenerator(const SystemParams& p, double g_true, double delta_t, std::uint64_t seed, ChargeSource source)
      : source_(source), noise_(derive_seed(seed, 0)) {
    truth_ = p;
    truth_.g = g_true;
    truth_.require_strong_driving();
    moments_ = likelihood_mean_variance(g_true, p, delta_t);
    if (source_ == ChargeSource::sme) {
      model_.emplace(truth_);
      stepper_.emplace(*model_, delta_t);
      rho_ = rho_ss_analytic(truth_).matrix();
      dt_ = delta_t;
    }
  }

  double next() {
    if (source_ == ChargeSource::likelihood) return moments_.mean + std::sqrt(moments_.variance) * noise_();
    const double dW = noise_.wiener(dt_);
    const double q = model_->photocurrent(rho_, dt_, dW);
    rho_ = stepper_->step(rho_, dW);
    return q;
  }

 private:
  ChargeSource source_;
  NormalStream noise_;
  SystemParams truth_;
  LikelihoodMoments moments_;
  std::optional<CavityModel> model_;
  std::optional<KrausStepper> stepper_;
  Matrix rho_;
  double dt_ = 0.0;
};

}  // namespace

RgEstimate rate_Rg_monte_carlo(const SystemParams& p, double g_true, double v0_sq, long n_steps, double delta_t,
                               std::uint64_t seed, ChargeSource source, bool record_trace) {
  if (n_steps < 2) throw DomainError("rate_Rg_monte_carlo needs at least two steps");
  const GaussianBelief prior(p.g, v0_sq);
  ChargeGenerator charges(p, g_true, delta_t, seed, source);

  RgEstimate out;
  out.trace.reset_prior = true;
  if (record_trace) out.trace.beliefs.push_back(prior);
  RunningStats stats;
  for (long k = 0; k < n_steps; ++k) {
    const double q = charges.next();
    std::optional<GaussianBelief> post;
    try {
      post = posterior_update(prior, q, p, delta_t);
    } catch (const InvalidUpdate&) {
      ++out.invalid_updates;
      if (out.invalid_updates > kMaxInvalidFraction * static_cast<double>(n_steps))
        throw InvalidUpdate(std::to_string(out.invalid_updates) + " invalid posterior updates by step " +
                            std::to_string(k) + " exceed 0.1% of " + std::to_string(n_steps));
      continue;
    }
    const EntropyChange ds = delta_S(prior, *post);
    stats.add(-ds.exact / delta_t);
    if (record_trace) {
      out.trace.beliefs.push_back(*post);
      out.trace.charges.push_back(q);
      out.trace.delta_S_exact.push_back(ds.exact);
      out.trace.delta_S_linear.push_back(ds.linear);
    }
  }
  out.estimate = stats.mean();
  out.std_error = stats.std_error();
  out.steps = static_cast<long>(stats.count());
  return out;
}

InferenceTrace sequential_inference(const SystemParams& p, double g_true, const GaussianBelief& prior, long n_steps,
                                    double delta_t, std::uint64_t seed, ChargeSource source) {
  ChargeGenerator charges(p, g_true, delta_t, seed, source);
  InferenceTrace trace;
  trace.reset_prior = false;
  trace.beliefs.reserve(n_steps + 1);
  trace.beliefs.push_back(prior);
  for (long k = 0; k < n_steps; ++k) {
    const double q = charges.next();
    const GaussianBelief& cur = trace.beliefs.back();
    GaussianBelief next = [&] {
      try {
        return posterior_update(cur, q, p, delta_t);
      } catch (const InvalidUpdate& e) {
        throw InvalidUpdate(std::string(e.what()) + " at step " + std::to_string(k));
      }
    }();
    const EntropyChange ds = delta_S(cur, next);
    trace.beliefs.push_back(next);
    trace.charges.push_back(q);
    trace.delta_S_exact.push_back(ds.exact);
    trace.delta_S_linear.push_back(ds.linear);
  }
  return trace;
}

}  // namespace cqed
