#pragma once

#include <cstdint>
#include <vector>

#include "cqed/params.hpp"

namespace cqed {

/// Gaussian distribution over the coupling g.
struct GaussianBelief {
  double mean = 0.0;
  double variance = 1.0;

  /// Throws DomainError unless variance > 0 and both fields are finite.
  GaussianBelief(double mean, double variance);

  /// Differential entropy 1/2 ln(2 pi e v^2).
  double entropy() const;
};

struct LikelihoodMoments {
  double mean = 0.0;      ///< 4 E eta (1 - (g/2E)^2) cos(phi) dt
  double variance = 0.0;  ///< 2 kappa eta dt
};

/// Gaussian photocharge statistics over a window delta_t, evaluated at the
/// strong-driving steady state for coupling g (p.g is ignored).
LikelihoodMoments likelihood_mean_variance(double g, const SystemParams& p, double delta_t);

/// Small-q posterior. Variance v1^2 = v0^2 kappa E / (kappa E + q v0^2 cos phi);
/// this keeps terms through first order in q and drops O(q eps^2), O(eps^3).
/// Mean: m0 + v1^2 mu'(m0) (q - mu(m0)) / v^2 with mu the likelihood mean,
/// i.e. the Gaussian-linear rule for the likelihood linearized at m0.
/// Throws InvalidUpdate if kappa E + q v0^2 cos phi <= 0.
GaussianBelief posterior_update(const GaussianBelief& prior, double q, const SystemParams& p, double delta_t);

struct EntropyChange {
  double exact = 0.0;   ///< -1/2 ln(v0^2 / v1^2)
  double linear = 0.0;  ///< first order in v0^2/v1^2 - 1, equal to -q cos(phi) v0^2 / (2 kappa E)
};

EntropyChange delta_S(const GaussianBelief& prior, const GaussianBelief& posterior);

/// R_g = (2 v0^2 eta / kappa)(1 - (g/2E)^2) cos^2(phi). Throws DomainError.
double rate_Rg(const SystemParams& p, double v0_sq);

struct InferenceTrace {
  std::vector<GaussianBelief> beliefs;  ///< beliefs[0] is the initial prior, beliefs[k+1] the posterior after step k
  std::vector<double> charges;
  std::vector<double> delta_S_exact;
  std::vector<double> delta_S_linear;
  bool reset_prior = true;  ///< if set, every step starts again from beliefs[0]
};

enum class ChargeSource {
  likelihood,  ///< q drawn from the Gaussian likelihood at g_true
  sme,         ///< q integrated from a conditioned SME trajectory at g_true
};

struct RgEstimate {
  double estimate = 0.0;
  double std_error = 0.0;
  long steps = 0;             ///< successful updates
  long invalid_updates = 0;
  InferenceTrace trace;
};

/// Largest tolerated fraction of InvalidUpdate events before a run aborts.
inline constexpr double kMaxInvalidFraction = 1e-3;

/// Mean of -Delta S / delta_t with the prior reset to N(p.g, v0_sq) before every step.
/// For ChargeSource::sme, p.spec must be adequate for the steady state at g_true.
/// Throws InvalidUpdate if more than 0.1% of updates fail.
RgEstimate rate_Rg_monte_carlo(const SystemParams& p, double g_true, double v0_sq, long n_steps, double delta_t,
                               std::uint64_t seed, ChargeSource source = ChargeSource::likelihood,
                               bool record_trace = true);

/// Non-reset chain: each posterior is the next prior.
InferenceTrace sequential_inference(const SystemParams& p, double g_true, const GaussianBelief& prior, long n_steps,
                                    double delta_t, std::uint64_t seed,
                                    ChargeSource source = ChargeSource::likelihood);

}  // namespace cqed
