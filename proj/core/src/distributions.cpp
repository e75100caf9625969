#include "covpair/distributions.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace covpair {

namespace {

constexpr double kPi = 3.14159265358979323846264338328;
constexpr double kTwoPi = 2.0 * kPi;
constexpr double kInf = std::numeric_limits<double>::infinity();

void require_n(int n) {
  if (n < 1) throw DomainError("sample size n must be >= 1 (got " + std::to_string(n) + ")");
}

struct Kernel {
  double z;        // (alpha / (2 lambda kappa)) sqrt(Q)
  double exp_arg;  // delta (x+y)/2 - z
};

Kernel kernel_at(const DerivedConstants& c, double x, double y) {
  const double sp = x + y;
  const double sm = x - y;
  const double q = c.kappa * c.kappa * sp * sp + c.lambda * c.lambda * sm * sm;
  const double z = c.alpha / (2.0 * c.lambda * c.kappa) * std::sqrt(q);
  return {z, 0.5 * c.delta * sp - z};
}

using complexd = std::complex<double>;

complexd principal_pow(complexd base, double p) { return std::exp(p * std::log(base)); }

using CMat3 = std::array<std::array<complexd, 3>, 3>;

complexd det3(const CMat3& m) {
  return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
         m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
         m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
}

// det(I - 2i Sigma Theta)^{-n/2} for a symmetric real Theta.
complexd det_cf(const Matrix3& sigma, const Matrix3& theta, int n) {
  const complexd neg2i(0.0, -2.0);
  CMat3 m;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      double p = 0.0;
      for (int k = 0; k < 3; ++k) p += sigma[i][k] * theta[k][j];
      m[i][j] = (i == j ? 1.0 : 0.0) + neg2i * p;
    }
  }
  return principal_pow(det3(m), -0.5 * n);
}

}  // namespace

double density_n1(const DensityQuery& q) {
  require_n(q.n);
  const CovarianceStructure& s = q.structure;
  const DerivedConstants c = derive_constants(s);
  // grouped so the value is exactly symmetric under x <-> y
  const double q0 = c.a * (q.x * q.x + q.y * q.y) - 2.0 * c.b * (q.x * q.y);
  if (q0 == 0.0) return kInf;
  const double root = std::sqrt(q0);
  const double arg = (s.rho() * (q.x + q.y) - std::sqrt(c.eta) * root) / c.xi;
  return std::exp(arg) / (kTwoPi * root);
}

double density_general(const DensityQuery& q) {
  require_n(q.n);
  const DerivedConstants c = derive_constants(q.structure);
  const int n = q.n;
  const Kernel k = kernel_at(c, q.x, q.y);
  const double lk = c.lambda * c.kappa;
  const double pref =
      std::pow(lk, n - 1) / (kTwoPi * std::exp(log_gamma(0.5 * n)) * std::pow(c.alpha, n - 2));
  const double w = bessel_k_power_scaled(BesselOrder{n - 2}, k.z);
  if (std::isinf(w)) return kInf;  // integrable singularity at the origin (n <= 2)
  return pref * std::exp(k.exp_arg) * w;
}

double density_n2(const DensityQuery& q) {
  const DerivedConstants c = derive_constants(q.structure);
  const Kernel k = kernel_at(c, q.x, q.y);
  if (k.z == 0.0) return kInf;
  return c.lambda * c.kappa / kTwoPi * std::exp(k.exp_arg) *
         bessel_k_scaled(BesselOrder::integer(0), k.z);
}

double density_n3(const DensityQuery& q) {
  const CovarianceStructure& s = q.structure;
  const DerivedConstants c = derive_constants(s);
  const double q0 = c.a * (q.x * q.x + q.y * q.y) - 2.0 * c.b * (q.x * q.y);
  const double arg = (s.rho() * (q.x + q.y) - std::sqrt(c.eta) * std::sqrt(q0)) / c.xi;
  return std::exp(arg) / (kTwoPi * std::sqrt(1.0 - s.sigma() * s.sigma()));
}

double density_n3_reduced(const DensityQuery& q) {
  const DerivedConstants c = derive_constants(q.structure);
  const Kernel k = kernel_at(c, q.x, q.y);
  const double lk = c.lambda * c.kappa;
  return lk * lk / (std::sqrt(2.0) * kPi * c.alpha) * std::exp(k.exp_arg);
}

double density_n4(const DensityQuery& q) {
  const DerivedConstants c = derive_constants(q.structure);
  const Kernel k = kernel_at(c, q.x, q.y);
  const double lk = c.lambda * c.kappa;
  // sqrt(Q) K_1(z) = (2 lambda kappa / alpha) z K_1(z); z K_1 -> 1 at the origin.
  return lk * lk * lk / (kTwoPi * c.alpha * c.alpha) * std::exp(k.exp_arg) *
         bessel_k_power_scaled(BesselOrder::integer(1), k.z);
}

double marginal_density(const CovarianceStructure& s, int n, double x) {
  require_n(n);
  const double a = 1.0 - s.rho() * s.rho();
  const double mu = 0.5 * (n - 1);
  const double zeta = std::abs(x) / a;
  const double w = bessel_k_power_scaled(BesselOrder{n - 1}, zeta);
  if (std::isinf(w)) return kInf;  // n = 1 at x = 0
  const double pref =
      std::pow(0.5 * a, mu) / (std::sqrt(kPi * a) * std::exp(log_gamma(0.5 * n)));
  return pref * std::exp(s.rho() * x / a - zeta) * w;
}

double diff_density(double sigma, int n, double x) {
  require_n(n);
  if (!(1.0 - sigma * sigma > 0.0)) {
    throw DomainError("diff_density requires 1 - sigma^2 > 0 (sigma = " + std::to_string(sigma) +
                      ")");
  }
  const double scale = std::sqrt(2.0 - 2.0 * sigma);
  const double mu = 0.5 * (n - 1);
  const double zeta = std::abs(x) / scale;
  const double w = bessel_k_power_scaled(BesselOrder{n - 1}, zeta);
  if (std::isinf(w)) return kInf;
  return std::exp(-zeta) * w /
         (std::pow(2.0, mu) * scale * std::sqrt(kPi) * std::exp(log_gamma(0.5 * n)));
}

std::complex<double> cf_closed(const CfQuery& q) {
  require_n(q.n);
  const double rho = q.structure.rho();
  const double sigma = q.structure.sigma();
  const double a = 1.0 - rho * rho;
  const double b = sigma - rho * rho;
  const complexd radicand(1.0 + a * (q.u * q.u + q.v * q.v) + 2.0 * b * q.u * q.v,
                          -2.0 * rho * (q.u + q.v));
  return principal_pow(radicand, -0.5 * q.n);
}

std::complex<double> cf_reduced(const CfQuery& q) {
  require_n(q.n);
  const DerivedConstants c = derive_constants(q.structure);
  const complexd w(q.u + q.v, -c.delta);
  const double dv = q.v - q.u;
  const complexd radicand =
      c.lambda * c.lambda * w * w + complexd(c.kappa * c.kappa * dv * dv + c.alpha * c.alpha, 0.0);
  const double num = std::sqrt(2.0) * c.lambda * c.kappa;
  return std::exp(static_cast<double>(q.n) * (std::log(num) - 0.5 * std::log(radicand)));
}

std::complex<double> cf_determinant(const CfQuery& q) {
  require_n(q.n);
  const Matrix3 theta = {{{0.0, 0.0, 0.5 * q.u}, {0.0, 0.0, 0.5 * q.v}, {0.5 * q.u, 0.5 * q.v, 0.0}}};
  return det_cf(q.structure.matrix(), theta, q.n);
}

std::complex<double> cf_triple(const CovarianceStructure& s, double u, double v, double w) {
  const Matrix3 theta = {{{0.0, 0.5 * u, 0.5 * v}, {0.5 * u, 0.0, 0.5 * w}, {0.5 * v, 0.5 * w, 0.0}}};
  return det_cf(s.matrix(), theta, 1);
}

std::array<std::array<double, 2>, 2> clt_limit_covariance(const CovarianceStructure& s) noexcept {
  const double r2 = s.rho() * s.rho();
  return {{{r2 + 1.0, r2 + s.sigma()}, {r2 + s.sigma(), r2 + 1.0}}};
}

double clt_limit_density(const CovarianceStructure& s, double z1, double z2) {
  const auto cov = clt_limit_covariance(s);
  const double det = cov[0][0] * cov[1][1] - cov[0][1] * cov[1][0];
  const double quad =
      (cov[1][1] * z1 * z1 - 2.0 * cov[0][1] * z1 * z2 + cov[0][0] * z2 * z2) / det;
  return std::exp(-0.5 * quad) / (kTwoPi * std::sqrt(det));
}

}  // namespace covpair
