#pragma once

#include <array>
#include <complex>

#include "covpair/params.hpp"
#include "covpair/special_functions.hpp"

namespace covpair {

// Evaluation point of the joint density of the cumulative cross-product pair
// (sum_j A_j C_j, sum_j B_j C_j) after n observations.
struct DensityQuery {
  CovarianceStructure structure;
  int n = 1;  // sample size / degrees of freedom, n >= 1
  double x = 0.0;
  double y = 0.0;
};

struct CfQuery {
  CovarianceStructure structure;
  int n = 1;
  double u = 0.0;
  double v = 0.0;
};

// Exact joint density for n = 1 (the single-observation product pair).
// Integrable 1/r singularity at the origin, reported as +inf.
double density_n1(const DensityQuery& q);

// Hand-specialized closed forms for n = 2, 3, 4.
double density_n2(const DensityQuery& q);
double density_n3(const DensityQuery& q);          // canonical 1/(2 pi sqrt(1-sigma^2)) form
double density_n3_reduced(const DensityQuery& q);  // equivalent (lambda,kappa,alpha) form
double density_n4(const DensityQuery& q);

// Closed form for arbitrary n >= 1; specializes to the above.
double density_general(const DensityQuery& q);

// Marginal density of a single cumulative cross-product; depends on rho only.
double marginal_density(const CovarianceStructure& s, int n, double x);

// Density of the difference statistic sum_j (A_j - B_j) C_j under equality of
// the two cross-covariances; depends on sigma only.  Requires 1 - sigma^2 > 0.
double diff_density(double sigma, int n, double x);

// Characteristic function of the pair, three algebraically equal routes.
std::complex<double> cf_closed(const CfQuery& q);
std::complex<double> cf_reduced(const CfQuery& q);
std::complex<double> cf_determinant(const CfQuery& q);

// Characteristic function of the full triple (AB, AC, BC); evaluation only.
std::complex<double> cf_triple(const CovarianceStructure& s, double u, double v, double w);

// Large-n limit of the standardized pair: centered bivariate normal with
// covariance [[rho^2+1, rho^2+sigma], [rho^2+sigma, rho^2+1]].
std::array<std::array<double, 2>, 2> clt_limit_covariance(const CovarianceStructure& s) noexcept;
double clt_limit_density(const CovarianceStructure& s, double z1, double z2);

}  // namespace covpair
