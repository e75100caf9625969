#include "covpair/special_functions.hpp"

#include <cmath>
#include <limits>
#include <string>
#include <vector>

namespace covpair {

namespace {

constexpr double kEulerGamma = 0.57721566490153286060651209008;
constexpr double kPi = 3.14159265358979323846264338328;
constexpr double kInf = std::numeric_limits<double>::infinity();

// Ascending series for K0, K1 on x <= 2 (Abramowitz & Stegun 9.6.11/9.6.13).
// Returns scaled values e^x * K0, e^x * K1.
void k01_series_scaled(double x, double& k0s, double& k1s) {
  const double q = 0.25 * x * x;
  const double lg = std::log(0.5 * x);

  double term = 1.0;  // q^k / (k!)^2
  double i0 = 1.0;
  double hk = 0.0;
  double s0 = 0.0;
  // I1(x) = (x/2) * sum q^k / (k! (k+1)!); the K1 sum carries psi weights.
  double term1 = 1.0;  // q^k / (k! (k+1)!)
  double i1sum = 1.0;
  double s1 = -2.0 * kEulerGamma + 1.0;  // [psi(1) + psi(2)] weight at k = 0
  for (int k = 1; k < 40; ++k) {
    term *= q / (static_cast<double>(k) * k);
    hk += 1.0 / k;
    i0 += term;
    s0 += term * hk;
    term1 *= q / (static_cast<double>(k) * (k + 1));
    i1sum += term1;
    s1 += term1 * (-2.0 * kEulerGamma + 2.0 * hk + 1.0 / (k + 1.0));
    if (term < 1e-19 * i0 && term1 < 1e-19 * i1sum) break;
  }
  const double i1 = 0.5 * x * i1sum;
  const double k0 = -(lg + kEulerGamma) * i0 + s0;
  const double k1 = 1.0 / x + lg * i1 - 0.25 * x * s1;
  const double ex = std::exp(x);
  k0s = k0 * ex;
  k1s = k1 * ex;
}

// Steed continued fraction (Thompson & Barnett 1986) for x > 2 at order 0;
// yields scaled e^x K0 and e^x K1 to near machine precision.
void k01_cf2_scaled(double x, double& k0s, double& k1s) {
  constexpr double eps = 1e-17;
  double b = 2.0 * (1.0 + x);
  double d = 1.0 / b;
  double h = d;
  double delh = d;
  double q1 = 0.0;
  double q2 = 1.0;
  const double a1 = 0.25;  // 1/4 - nu^2 with nu = 0
  double q = a1;
  double c = a1;
  double a = -a1;
  double s = 1.0 + q * delh;
  for (int i = 2; i <= 2000; ++i) {
    a -= 2.0 * (i - 1);
    c = -a * c / i;
    const double qnew = (q1 - b * q2) / a;
    q1 = q2;
    q2 = qnew;
    q += c * qnew;
    b += 2.0;
    d = 1.0 / (b + a * d);
    delh = (b * d - 1.0) * delh;
    h += delh;
    const double dels = q * delh;
    s += dels;
    if (std::abs(dels / s) < eps) break;
  }
  h = a1 * h;
  k0s = std::sqrt(kPi / (2.0 * x)) / s;
  k1s = k0s * (x + 0.5 - h) / x;
}

void k01_scaled(double x, double& k0s, double& k1s) {
  if (x <= 2.0) {
    k01_series_scaled(x, k0s, k1s);
  } else {
    k01_cf2_scaled(x, k0s, k1s);
  }
}

// Integer order m >= 0 by upward recurrence from K0, K1 (stable: K grows
// with order).
double k_integer_scaled(int m, double x) {
  double k0s, k1s;
  k01_scaled(x, k0s, k1s);
  if (m == 0) return k0s;
  if (m == 1) return k1s;
  double km1 = k0s;
  double km = k1s;
  for (int j = 1; j < m; ++j) {
    const double knext = km1 + (2.0 * j / x) * km;
    km1 = km;
    km = knext;
  }
  return km;
}

// Half-integer order m + 1/2:
//   K_{m+1/2}(x) = sqrt(pi/(2x)) e^{-x} sum_{k=0..m} (m+k)!/(k!(m-k)!) (2x)^{-k}.
// The sum has positive terms only; exact to rounding.
double k_half_scaled(int m, double x) {
  double coeff = 1.0;  // (m+k)!/(k!(m-k)!) at k = 0
  double term = 1.0;
  double sum = 1.0;
  for (int k = 1; k <= m; ++k) {
    coeff *= static_cast<double>(m + k) * (m - k + 1) / k;
    term = coeff / std::pow(2.0 * x, k);
    sum += term;
  }
  return std::sqrt(kPi / (2.0 * x)) * sum;
}

double k_scaled_abs_order(int twice_nu_abs, double x) {
  if (twice_nu_abs % 2 == 0) return k_integer_scaled(twice_nu_abs / 2, x);
  return k_half_scaled((twice_nu_abs - 1) / 2, x);
}

}  // namespace

double bessel_k_scaled(BesselOrder order, double x) {
  if (!(x > 0.0)) throw DomainError("bessel_k requires x > 0 (got " + std::to_string(x) + ")");
  const int tn = order.twice_nu < 0 ? -order.twice_nu : order.twice_nu;
  return k_scaled_abs_order(tn, x);
}

double bessel_k(BesselOrder order, double x) {
  const double scaled = bessel_k_scaled(order, x);
  const double v = scaled * std::exp(-x);
  // Flush subnormals to an exact zero; callers treat 0 as signaled underflow.
  if (v != 0.0 && v < std::numeric_limits<double>::min()) return 0.0;
  return v;
}

double bessel_k_power_scaled(BesselOrder order, double z) {
  if (z < 0.0 || !std::isfinite(z)) throw DomainError("bessel_k_power_scaled requires z >= 0");
  const double nu = order.nu();
  const int tn_abs = order.twice_nu < 0 ? -order.twice_nu : order.twice_nu;

  if (tn_abs % 2 == 1) {
    // Half-integer |nu| = m + 1/2: z^nu K_{|nu|}(z) e^z = sqrt(pi/2) *
    // sum_k c_k z^{nu - 1/2 - k}, c_k = (m+k)!/(k!(m-k)! 2^k).  Term-wise
    // evaluation keeps z = 0 exact (pow(0,0) = 1 carries the limit).
    const int m = (tn_abs - 1) / 2;
    double coeff = 1.0;
    double sum = std::pow(z, nu - 0.5);
    for (int k = 1; k <= m; ++k) {
      coeff *= static_cast<double>(m + k) * (m - k + 1) / (2.0 * k);
      sum += coeff * std::pow(z, nu - 0.5 - k);
    }
    return std::sqrt(kPi / 2.0) * sum;
  }

  const int m = tn_abs / 2;
  if (z == 0.0) {
    if (order.twice_nu <= 0) return kInf;  // K0 log-divergence / negative power
    return std::pow(2.0, nu - 1.0) * std::tgamma(nu);
  }
  if (order.twice_nu > 0 && z < 1e-8) {
    // z^nu K_nu(z) -> 2^{nu-1} Gamma(nu); correction O(z^2 log z) at nu = 1,
    // O(z^2) beyond, below rounding at this threshold.
    return std::pow(2.0, nu - 1.0) * std::tgamma(nu);
  }
  return std::pow(z, nu) * k_integer_scaled(m, z);
}

double log_gamma(double x) {
  if (!(x > 0.0)) throw DomainError("log_gamma requires x > 0");
  return std::lgamma(x);
}

}  // namespace covpair
