#include "covpair/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "covpair/errors.hpp"
#include "covpair/special_functions.hpp"

namespace covpair {

namespace {

constexpr double kPi = 3.14159265358979323846264338328;
constexpr double kInf = std::numeric_limits<double>::infinity();
using complexd = std::complex<double>;

void require_n(int n) {
  if (n < 1) throw DomainError("sample size n must be >= 1 (got " + std::to_string(n) + ")");
}

// --------------------------------------------------------------------------
// Rigorous tail bound.
//
// The density is P * exp(delta*w1/2 - z) * z^nu K_nu(z) e^z with
// w1 = x+y, w2 = x-y, z = (alpha/(2 lambda kappa)) sqrt(kappa^2 w1^2 +
// lambda^2 w2^2), nu = (n-2)/2, P = (lambda kappa)^{n-1} /
// (2 pi Gamma(n/2) alpha^{n-2}).  Using
//   K_nu(z) <= sqrt(pi/(2z)) e^{-z} (1 - (2nu-1)/(4z))^{-(nu+1/2)}   (nu >= 1/2)
//   K_nu(z) <= sqrt(pi/(2z)) e^{-z}                                  (|nu| <= 1/2)
// gives f <= P sqrt(pi/2) G(z) z^{nu-1/2} e^{delta*w1/2 - z}.  A fraction
// (1-c) of the exponential absorbs the polynomial factor; the remaining
// exp(delta*w1/2 - c z) integrates in closed form radially after the
// rescaling (w1', w2') = (kappa w1, lambda w2).

struct BoundCtx {
  DerivedConstants c;
  int n;
  double nu;          // (n-2)/2
  double beta;        // nu - 1/2
  double pref;        // P * sqrt(pi/2)
  double zmin_coeff;  // z >= zmin_coeff * R on max(|x|,|y|) >= R
  double zmin_floor;  // smallest z at which the bound machinery is valid
};

BoundCtx make_bound_ctx(const CovarianceStructure& s, int n) {
  BoundCtx b;
  b.c = derive_constants(s);
  b.n = n;
  b.nu = 0.5 * (n - 2);
  b.beta = b.nu - 0.5;
  const double lk = b.c.lambda * b.c.kappa;
  b.pref = std::pow(lk, n - 1) /
           (2.0 * kPi * std::exp(log_gamma(0.5 * n)) * std::pow(b.c.alpha, n - 2)) *
           std::sqrt(kPi / 2.0);
  b.zmin_coeff =
      b.c.alpha / std::sqrt(b.c.lambda * b.c.lambda + b.c.kappa * b.c.kappa);
  double floor = std::max(1.0, b.nu);
  if (b.beta > 0.0) {
    const double margin = b.c.alpha - b.c.lambda * std::abs(b.c.delta);  // > 0 for valid structures
    floor = std::max(floor, 2.0 * b.beta * b.c.alpha / margin);
  }
  b.zmin_floor = floor;
  return b;
}

// Split fraction c and the absorbed polynomial supremum S * G at a given zmin.
void poly_absorb(const BoundCtx& b, double zmin, double& c_split, double& sg) {
  double s;
  if (b.beta > 0.0) {
    c_split = 1.0 - b.beta / zmin;               // puts the sup of z^beta e^{-(1-c)z} at zmin
    s = std::pow(zmin, b.beta) * std::exp(-b.beta);
  } else {
    c_split = 1.0;
    s = std::pow(zmin, b.beta);  // decreasing for beta <= 0
  }
  double g = 1.0;
  if (b.nu >= 0.5) {
    g = std::pow(1.0 - (2.0 * b.nu - 1.0) / (4.0 * zmin), -(b.nu + 0.5));
  }
  sg = s * g;
}

// Closed-form radial integral of exp(delta*w1/2 - c z) over |w1|+|w2| >= 2R,
// in (x, y) measure.
double radial_tail(const BoundCtx& b, double r, double c_split) {
  const DerivedConstants& c = b.c;
  const double base = c_split * c.alpha / (2.0 * c.lambda * c.kappa);
  auto integrand = [&](double phi) {
    const double g = base - 0.5 * c.delta / c.kappa * std::cos(phi);
    const double rp =
        2.0 * r / (std::abs(std::cos(phi)) / c.kappa + std::abs(std::sin(phi)) / c.lambda);
    const double e = std::exp(-g * rp);
    return e * (rp / g + 1.0 / (g * g));
  };
  QuadratureConfig cfg;
  cfg.abs_tol = 1e-300;  // pure relative control; the scale varies wildly with R
  cfg.rel_tol = 1e-8;
  cfg.max_subdivisions = 2000;
  std::vector<double> breaks;
  for (int k = 1; k < 8; ++k) breaks.push_back(k * kPi / 4.0);
  auto res = integrate_1d(integrand, 0.0, 2.0 * kPi, cfg, breaks);
  return res.value / (2.0 * c.lambda * c.kappa);
}

double outside_square_bound(const BoundCtx& b, double r) {
  const double zmin = b.zmin_coeff * r;
  if (zmin < b.zmin_floor) return kInf;
  double c_split, sg;
  poly_absorb(b, zmin, c_split, sg);
  return b.pref * sg * radial_tail(b, r, c_split);
}

double resolve_radius(const CovarianceStructure& s, int n, const TruncationPolicy& policy) {
  if (policy.kind == TruncationPolicy::Kind::Fixed) return policy.value;
  return truncation_radius(s, n, policy.value);
}

std::function<double(double, double)> density_fn(const CovarianceStructure& s, int n) {
  return [s, n](double x, double y) { return density_general({s, n, x, y}); };
}

}  // namespace

double tail_mass_bound(const CovarianceStructure& s, int n, double radius) {
  require_n(n);
  return outside_square_bound(make_bound_ctx(s, n), radius);
}

double truncation_radius(const CovarianceStructure& s, int n, double epsilon) {
  require_n(n);
  if (!(epsilon > 0.0 && epsilon < 1.0)) {
    throw DomainError("truncation_radius requires 0 < epsilon < 1");
  }
  const BoundCtx b = make_bound_ctx(s, n);
  double hi = std::max(1.0, b.zmin_floor / b.zmin_coeff);
  int guard = 0;
  while (outside_square_bound(b, hi) > epsilon) {
    hi *= 2.0;
    if (++guard > 200) throw DomainError("truncation_radius failed to bracket the tail");
  }
  double lo = 0.5 * hi;
  for (int i = 0; i < 60; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (outside_square_bound(b, mid) > epsilon) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return hi;
}

ProbabilityResult quadrant_probability(const CovarianceStructure& s, int n, double x0, double y0,
                                       const QuadratureConfig& cfg) {
  require_n(n);
  const double r = resolve_radius(s, n, cfg.truncation);
  const double tail_eps =
      cfg.truncation.kind == TruncationPolicy::Kind::Auto ? cfg.truncation.value : 0.0;

  ProbabilityResult out;
  const Rect region{std::max(x0, -r), r, std::max(y0, -r), r};
  if (!(region.x1 > region.x0) || !(region.y1 > region.y0)) {
    out.value = 0.0;
    out.raw_value = 0.0;
    out.error_estimate = tail_eps;
    return out;
  }

  std::vector<Point2> singular;
  if (n <= 2) singular.push_back({0.0, 0.0});
  const auto res = integrate_2d(density_fn(s, n), region, cfg, singular);

  out.raw_value = res.value;
  out.value = std::clamp(res.value, 0.0, 1.0);
  out.error_estimate = res.error_estimate + tail_eps;
  out.subdivisions_used = res.subdivisions;
  out.converged = res.converged;
  return out;
}

IntegralResult normalization_integral(const CovarianceStructure& s, int n,
                                      const QuadratureConfig& cfg) {
  require_n(n);
  const double r = resolve_radius(s, n, cfg.truncation);
  std::vector<Point2> singular;
  if (n <= 2) singular.push_back({0.0, 0.0});
  auto res = integrate_2d(density_fn(s, n), Rect{-r, r, -r, r}, cfg, singular);
  if (cfg.truncation.kind == TruncationPolicy::Kind::Auto) {
    res.error_estimate += cfg.truncation.value;
  }
  return res;
}

IntegralResult marginalize(const CovarianceStructure& s, int n, double x,
                           const QuadratureConfig& cfg) {
  require_n(n);
  if (n == 1 && x == 0.0) return {kInf, kInf, 0, false};

  // Truncate |y| > Y using the pointwise bound with z >= r_z (|y| - |x|) for
  // |y| >= |x| (both |x+y| and |x-y| exceed |y| - |x|, so the quadratic form
  // dominates the isotropic one):
  //   f(x, y) <= pref * SG * exp(|delta|(|x|+|y|)/2 - c r_z (|y|-|x|)).
  const BoundCtx b = make_bound_ctx(s, n);
  const double eps =
      cfg.truncation.kind == TruncationPolicy::Kind::Auto ? cfg.truncation.value : 1e-10;
  const double r_z = 0.5 * b.c.alpha *
                     std::sqrt(b.c.lambda * b.c.lambda + b.c.kappa * b.c.kappa) /
                     (b.c.lambda * b.c.kappa);
  const double abs_delta = std::abs(b.c.delta);
  double y_span = std::abs(x) + b.zmin_floor / r_z + 1.0;
  for (int iter = 0; iter < 60; ++iter) {
    double c_split, sg;
    poly_absorb(b, r_z * (y_span - std::abs(x)), c_split, sg);
    const double rate = c_split * r_z - 0.5 * abs_delta;  // > 0: c r_z > c alpha/(2 lambda)
    const double log_tail = std::log(2.0 * b.pref * sg / rate) +
                            (c_split * r_z + 0.5 * abs_delta) * std::abs(x) - rate * y_span;
    if (log_tail <= std::log(eps)) break;
    y_span += std::max(1.0, (log_tail - std::log(eps)) / rate);
  }

  std::vector<double> breaks;
  if (n <= 2 && x == 0.0) breaks.push_back(0.0);
  auto f = [&s, n, x](double y) { return density_general({s, n, x, y}); };
  auto res = integrate_1d(f, -y_span, y_span, cfg, breaks);
  res.error_estimate += eps;
  return res;
}

// --------------------------------------------------------------------------
// Characteristic function inversion

namespace {

struct RotatedCf {
  double lambda, kappa, delta, alpha2, norm_log;  // norm_log = n log(sqrt(2) lambda kappa)
  int n;

  complexd operator()(double sv, double tv) const {
    const complexd w(sv, -delta);
    const complexd rad = lambda * lambda * w * w + kappa * kappa * tv * tv + alpha2;
    return std::exp(norm_log - 0.5 * static_cast<double>(n) * std::log(rad));
  }
};

struct SemiAxisSpec {
  double freq;         // oscillation frequency, 0 => monotone decay
  double head;         // size of the non-asymptotic region
  double decay_block;  // first block length for the decaying integrator
};

ComplexIntegralResult run_semiaxis(const std::function<complexd(double)>& f,
                                   const SemiAxisSpec& spec, double tol) {
  if (spec.freq > 1e-9) {
    return integrate_oscillatory_semiaxis(f, spec.freq, spec.head, tol);
  }
  // The first block must cover the integrand's scale: the smallness stop is
  // only meaningful once the mass has been passed.
  return integrate_decaying_semiaxis(f, std::max({spec.decay_block, spec.head, 1e-3}), tol);
}

}  // namespace

InversionResult invert_cf(const CovarianceStructure& s, int n, double x, double y,
                          const QuadratureConfig& cfg) {
  require_n(n);
  if (n <= 2 && std::max(std::abs(x), std::abs(y)) < 1e-8) {
    // At (and numerically indistinguishable from) the origin the n <= 2
    // density is singular; both iterated tails lose their oscillation there.
    throw DomainError("density is singular at the origin for n <= 2; inversion undefined there");
  }
  const DerivedConstants c = derive_constants(s);
  const RotatedCf cf{c.lambda, c.kappa, c.delta, c.alpha * c.alpha,
                     n * std::log(std::sqrt(2.0) * c.lambda * c.kappa), n};

  const double p = 0.5 * (x + y);
  const double q = 0.5 * (y - x);
  const double tol = std::max(cfg.abs_tol, n <= 2 ? 1e-6 : 1e-8);
  const double inner_tol = tol / 16.0;
  const double outer_tol = tol / 4.0;

  // Scales of the non-asymptotic region of the rotated CF.
  const double s_scale = (c.alpha + c.lambda * std::abs(c.delta)) / c.lambda + 1.0;
  const double t_scale = (c.alpha + c.lambda * std::abs(c.delta)) / c.kappa + 1.0;

  double inner_err = 0.0;
  bool inner_ok = true;

  const bool t_inner = std::abs(q) >= std::abs(p);
  std::function<complexd(double)> outer_fn;
  SemiAxisSpec outer_spec{};

  // Once one inner integral fails to converge the result is flagged anyway;
  // short-circuit the remaining inner work instead of integrating noise.
  if (t_inner) {
    // inner over t with cos(q t); outer over s decays like exp(-|q| (lambda/kappa) s)
    auto inner = [&, cf](double sv) -> complexd {
      if (!inner_ok) return complexd(0.0, 0.0);
      auto g = [&, sv](double tv) { return cf(sv, tv) * std::cos(q * tv); };
      SemiAxisSpec spec{std::abs(q), 4.0 * t_scale + std::abs(sv) * c.lambda / c.kappa,
                        4.0 * t_scale};
      auto res = run_semiaxis(g, spec, inner_tol);
      inner_err = std::max(inner_err, res.error_estimate);
      inner_ok = inner_ok && res.converged;
      return res.value;
    };
    outer_fn = [inner, p](double sv) -> complexd {
      const complexd e(std::cos(p * sv), -std::sin(p * sv));
      return complexd((e * inner(sv)).real(), 0.0);
    };
    const double rate = std::abs(q) * c.lambda / c.kappa;
    outer_spec = {std::abs(p), 4.0 * s_scale,
                  std::max(4.0 * s_scale, rate > 0.0 ? 3.0 / rate : 4.0 * s_scale)};
  } else {
    // inner over s with e^{-i p s}; outer over t decays like exp(-|p| (kappa/lambda) t)
    auto inner = [&, cf](double tv) -> complexd {
      if (!inner_ok) return complexd(0.0, 0.0);
      auto g = [&, tv](double sv) {
        const complexd e(std::cos(p * sv), -std::sin(p * sv));
        return complexd((e * cf(sv, tv)).real(), 0.0);
      };
      SemiAxisSpec spec{std::abs(p), 4.0 * s_scale + std::abs(tv) * c.kappa / c.lambda,
                        4.0 * s_scale};
      auto res = run_semiaxis(g, spec, inner_tol);
      inner_err = std::max(inner_err, res.error_estimate);
      inner_ok = inner_ok && res.converged;
      return res.value;
    };
    outer_fn = [inner, q](double tv) -> complexd { return inner(tv) * std::cos(q * tv); };
    const double rate = std::abs(p) * c.kappa / c.lambda;
    outer_spec = {std::abs(q), 4.0 * t_scale,
                  std::max(4.0 * t_scale, rate > 0.0 ? 3.0 / rate : 4.0 * t_scale)};
  }

  auto outer = run_semiaxis(outer_fn, outer_spec, outer_tol);

  InversionResult out;
  const double scale = 1.0 / (2.0 * kPi * kPi);
  out.value = outer.value.real() * scale;
  // Truncation biases of the nested semi-axis integrals share a sign and can
  // compound up to the working tolerance; fold that into the estimate.
  out.error_estimate = (outer.error_estimate + 4.0 * inner_err) * scale + 0.5 * tol;
  out.slow_convergence = !outer.converged || !inner_ok;
  return out;
}

}  // namespace covpair
