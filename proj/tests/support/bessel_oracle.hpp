#pragma once

// Test-only oracle for K_nu, independent of the library implementation:
// trapezoidal evaluation of the integral representation
//   K_nu(x) = integral_0^inf exp(-x cosh t) cosh(nu t) dt
// in long double.  The integrand is even and decays doubly exponentially, so
// the trapezoid rule converges at spectral rate; h = 1/32 leaves the result
// accurate to well beyond double precision over the tested domain.
long double bessel_k_oracle(long double nu, long double x);
