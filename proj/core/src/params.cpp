#include "cqed/params.hpp"

#include <cmath>
#include <string>

namespace cqed {

void SystemParams::validate() const {
  if (!(E > 0.0)) throw DomainError("drive strength E must be positive");
  validate_dynamics();
}

void SystemParams::validate_dynamics() const {
  if (!(E >= 0.0) || !std::isfinite(E)) throw DomainError("drive strength E must be non-negative and finite");
  if (!(g >= 0.0) || !std::isfinite(g)) throw DomainError("coupling g must be non-negative");
  if (!(kappa > 0.0) || !std::isfinite(kappa)) throw DomainError("decay rate kappa must be positive");
  if (!(eta > 0.0 && eta <= 1.0)) throw DomainError("detection efficiency eta must lie in (0, 1]");
  if (!std::isfinite(phi)) throw DomainError("phase phi must be finite");
}

void SystemParams::require_strong_driving() const {
  validate();
  if (!(g < 2.0 * E))
    throw DomainError("strong-driving steady state requires g < 2E (g = " + std::to_string(g) +
                      ", E = " + std::to_string(E) + ")");
}

}  // namespace cqed
