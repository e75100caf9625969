#pragma once

#include "covpair/errors.hpp"

namespace covpair {

// Order of a modified Bessel function, stored as 2*nu so integer and
// half-integer orders are exact.  K_{-nu} = K_nu, so only |nu| matters
// for evaluation; the sign is kept because density prefactors use the
// signed power z^nu.
struct BesselOrder {
  int twice_nu = 0;

  static constexpr BesselOrder integer(int m) noexcept { return {2 * m}; }
  static constexpr BesselOrder half_integer(int twice) noexcept { return {twice}; }

  double nu() const noexcept { return 0.5 * twice_nu; }
  bool is_integer() const noexcept { return twice_nu % 2 == 0; }
};

// Modified Bessel function of the second kind K_nu(x), x > 0.
// Relative error <= ~1e-12 for |nu| <= 8 up to where the value underflows;
// results below the smallest positive normal are flushed to exact 0.
double bessel_k(BesselOrder order, double x);

// e^x * K_nu(x): same accuracy, no underflow over the supported range.
double bessel_k_scaled(BesselOrder order, double x);

// z^nu * K_{|nu|}(z) * e^z with the z -> 0 limit built in (the shape every
// density kernel needs; nu is signed here).  Returns +inf where the limit
// diverges (nu = 0 or nu < 0 at z = 0).
double bessel_k_power_scaled(BesselOrder order, double z);

// ln Gamma(x), x > 0.
double log_gamma(double x);

}  // namespace covpair
