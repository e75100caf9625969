#pragma once

#include "covpair/distributions.hpp"
#include "covpair/quadrature.hpp"

namespace covpair {

struct ProbabilityResult {
  double value = 0.0;      // clamped to [0, 1]
  double raw_value = 0.0;  // quadrature value before clamping
  double error_estimate = 0.0;
  long subdivisions_used = 0;
  bool converged = true;
};

// Half-width R such that the density mass outside the centered square
// [-R, R]^2 is provably below epsilon (rigorous analytic bound on the
// exponential kernel; bisected to a near-minimal R).
double truncation_radius(const CovarianceStructure& s, int n, double epsilon);

// Tail-mass bound behind truncation_radius, exposed so tests can check it
// against direct quadrature of the annulus.
double tail_mass_bound(const CovarianceStructure& s, int n, double radius);

// P(gamma_AC > x0, gamma_BC > y0) by quadrature of the joint density over the
// truncated quadrant; the n <= 2 origin singularity is handled in polar cells.
ProbabilityResult quadrant_probability(const CovarianceStructure& s, int n, double x0, double y0,
                                       const QuadratureConfig& cfg = {});

// Integral of the density over the (truncated) plane; 1 for a correct density.
IntegralResult normalization_integral(const CovarianceStructure& s, int n,
                                      const QuadratureConfig& cfg = {});

// Integral of f_n(x, .) over the second argument; matches marginal_density.
IntegralResult marginalize(const CovarianceStructure& s, int n, double x,
                           const QuadratureConfig& cfg = {});

struct InversionResult {
  double value = 0.0;
  double error_estimate = 0.0;
  bool slow_convergence = false;
};

// Density recovered by numerically inverting the characteristic function:
//   f(x,y) = (2 pi)^{-2} * (1/2) * iint exp(-i(x+y)s/2 - i(y-x)t/2) Ftilde(s,t) ds dt
// in the rotated frame s = u+v, t = -u+v (Jacobian 1/2).  The axis carrying
// the faster oscillation is integrated innermost with epsilon-algorithm
// acceleration; the outer axis then decays exponentially.  Verification
// path only: the closed-form densities are the primary evaluators.
InversionResult invert_cf(const CovarianceStructure& s, int n, double x, double y,
                          const QuadratureConfig& cfg = {});

}  // namespace covpair
