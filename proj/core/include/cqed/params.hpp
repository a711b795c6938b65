#pragma once

#include "cqed/hilbert.hpp"

namespace cqed {

/// Physical parameters of the driven, monitored cavity. All rates are in
/// units of the field decay rate kappa and times in units of 1/kappa; kappa is
/// still kept explicit so every formula can be checked at kappa != 1.
struct SystemParams {
  double E = 1.0;      ///< drive strength
  double g = 0.0;      ///< atom-cavity coupling
  double kappa = 1.0;  ///< field decay rate
  double eta = 1.0;    ///< detection efficiency, (0, 1]
  double phi = 0.0;    ///< local-oscillator phase (rad)
  FockSpec spec{};

  /// Throws DomainError unless E > 0, g >= 0, kappa > 0, 0 < eta <= 1.
  void validate() const;

  /// Same checks but admits E = 0 (undriven cavity), which the dynamics allow.
  void validate_dynamics() const;

  /// g / (2E); the strong-driving expressions need it strictly below 1.
  double coupling_ratio() const { return g / (2.0 * E); }

  /// Throws DomainError("... requires g < 2E") when the strong-driving formulas are undefined.
  void require_strong_driving() const;

  SystemParams with_phi(double new_phi) const {
    SystemParams p = *this;
    p.phi = new_phi;
    return p;
  }
};

}  // namespace cqed
