#include "covpair/params.hpp"

#include <cmath>
#include <string>

namespace covpair {

std::optional<ConstraintViolation::Which> check_structure(double rho, double sigma) noexcept {
  if (!std::isfinite(rho) || !std::isfinite(sigma)) return ConstraintViolation::Which::SigmaBound;
  if (!(1.0 - sigma * sigma > 0.0)) return ConstraintViolation::Which::SigmaBound;
  if (!(1.0 - 2.0 * rho * rho + sigma > 0.0)) return ConstraintViolation::Which::XiBound;
  return std::nullopt;
}

CovarianceStructure CovarianceStructure::make(double rho, double sigma) {
  if (!std::isfinite(rho) || !std::isfinite(sigma)) {
    throw DomainError("rho and sigma must be finite");
  }
  if (auto which = check_structure(rho, sigma)) {
    if (*which == ConstraintViolation::Which::SigmaBound) {
      throw ConstraintViolation(*which, "constraint 1 - sigma^2 > 0 violated (sigma = " +
                                            std::to_string(sigma) + ")");
    }
    throw ConstraintViolation(*which, "constraint 1 - 2*rho^2 + sigma > 0 violated (rho = " +
                                          std::to_string(rho) +
                                          ", sigma = " + std::to_string(sigma) + ")");
  }
  return CovarianceStructure(rho, sigma);
}

CovarianceStructure make_structure(double rho, double sigma) {
  return CovarianceStructure::make(rho, sigma);
}

Matrix3 CovarianceStructure::matrix() const noexcept {
  return {{{1.0, sigma_, rho_}, {sigma_, 1.0, rho_}, {rho_, rho_, 1.0}}};
}

DerivedConstants derive_constants(const CovarianceStructure& s) noexcept {
  const double rho = s.rho();
  const double sigma = s.sigma();
  DerivedConstants c;
  c.xi = 1.0 - 2.0 * rho * rho + sigma;
  c.eta = (1.0 + sigma) / (1.0 - sigma);
  c.lambda = 1.0 / std::sqrt(1.0 - sigma);
  c.kappa = 1.0 / std::sqrt(c.xi);
  c.delta = 2.0 * rho / c.xi;
  c.alpha = std::sqrt(2.0 * c.eta) / c.xi;
  c.a = 1.0 - rho * rho;
  c.b = sigma - rho * rho;
  return c;
}

}  // namespace covpair
