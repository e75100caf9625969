#pragma once

#include <array>
#include <optional>

#include "covpair/errors.hpp"

namespace covpair {

using Matrix3 = std::array<std::array<double, 3>, 3>;

// Covariance structure of the underlying trivariate normal: unit variances,
// Cov(A,B) = sigma, Cov(A,C) = Cov(B,C) = rho.  Valid iff
//   1 - sigma^2 > 0   and   1 - 2 rho^2 + sigma > 0   (both strict),
// which together make Sigma symmetric positive definite.
class CovarianceStructure {
 public:
  static CovarianceStructure make(double rho, double sigma);  // throws ConstraintViolation

  double rho() const noexcept { return rho_; }
  double sigma() const noexcept { return sigma_; }
  Matrix3 matrix() const noexcept;

 private:
  CovarianceStructure(double rho, double sigma) : rho_(rho), sigma_(sigma) {}
  double rho_;
  double sigma_;
};

// Non-throwing validity probe; returns the first violated constraint, if any.
std::optional<ConstraintViolation::Which> check_structure(double rho, double sigma) noexcept;

CovarianceStructure make_structure(double rho, double sigma);  // throws ConstraintViolation

// The reparameterization that diagonalizes the quadratic form common to all
// the closed-form densities, plus the n=1 form coefficients a, b.
//   xi = 1 - 2 rho^2 + sigma        eta = (1 + sigma) / (1 - sigma)
//   lambda = 1/sqrt(1 - sigma)      kappa = 1/sqrt(xi)
//   delta = 2 rho / xi              alpha = sqrt(2 eta) / xi
//   a = 1 - rho^2                   b = sigma - rho^2
struct DerivedConstants {
  double xi;
  double eta;
  double lambda;
  double kappa;
  double delta;
  double alpha;
  double a;
  double b;
};

DerivedConstants derive_constants(const CovarianceStructure& s) noexcept;

}  // namespace covpair
