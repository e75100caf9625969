#include "covpair/inference.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "covpair/distributions.hpp"
#include "covpair/errors.hpp"

namespace covpair {

namespace {

void require_sigma(double sigma) {
  if (!(1.0 - sigma * sigma > 0.0)) {
    throw SigmaOutOfRange("sigma must satisfy 1 - sigma^2 > 0 (got " + std::to_string(sigma) +
                          ")");
  }
}

}  // namespace

double diff_tail(double sigma, int n, double threshold, const QuadratureConfig& cfg) {
  require_sigma(sigma);
  if (n < 1) throw DomainError("diff_tail requires n >= 1");
  if (threshold < 0.0 || !std::isfinite(threshold)) {
    throw DomainError("diff_tail requires a finite threshold >= 0");
  }
  if (threshold == 0.0) return 0.5;  // symmetric null density

  // Exponential tail: the density decays like x^{(n-2)/2} e^{-x/s},
  // s = sqrt(2 - 2 sigma).  March the upper limit until the bound
  // s * d_n(T) * (1 + mu s/T + ...) <= s * d_n(T) * 2 is negligible.
  const double s = std::sqrt(2.0 - 2.0 * sigma);
  const double eps =
      cfg.truncation.kind == TruncationPolicy::Kind::Auto ? cfg.truncation.value : 1e-12;
  double upper = threshold + s * (10.0 + 2.0 * n);
  for (int i = 0; i < 60; ++i) {
    const double edge = diff_density(sigma, n, upper);
    if (2.0 * s * edge <= eps || !(edge > 0.0)) break;
    upper += s * std::max(2.0, std::log(2.0 * s * edge / eps));
  }

  auto f = [sigma, n](double x) { return diff_density(sigma, n, x); };
  auto res = integrate_1d(f, threshold, upper, cfg);
  return std::clamp(res.value, 0.0, 1.0);
}

TestResult equality_test(const TestInput& input, const QuadratureConfig& cfg) {
  if (input.observations.empty()) throw EmptyInput("equality_test requires observations");
  for (const auto& obs : input.observations) {
    for (double v : obs) {
      if (!std::isfinite(v)) throw DomainError("equality_test requires finite observations");
    }
  }

  TestResult result;
  result.n = static_cast<int>(input.observations.size());

  double stat = 0.0;
  for (const auto& obs : input.observations) stat += (obs[0] - obs[1]) * obs[2];
  result.statistic = stat;

  if (input.sigma) {
    require_sigma(*input.sigma);
    result.sigma_used = *input.sigma;
    result.sigma_source = SigmaSource::Supplied;
  } else {
    double sab = 0.0;
    for (const auto& obs : input.observations) sab += obs[0] * obs[1];
    const double est = sab / result.n;
    if (!(1.0 - est * est > 0.0)) {
      throw SigmaOutOfRange("estimated sigma = " + std::to_string(est) +
                            " is outside (-1, 1); supply sigma explicitly");
    }
    result.sigma_used = est;
    result.sigma_source = SigmaSource::Estimated;
  }

  // Upper tail from the sampled statistic; symmetry handles the other side.
  auto upper_tail = [&](double t) {
    return t >= 0.0 ? diff_tail(result.sigma_used, result.n, t, cfg)
                    : 1.0 - diff_tail(result.sigma_used, result.n, -t, cfg);
  };
  switch (input.alternative) {
    case Alternative::TwoSided:
      result.p_value = std::clamp(2.0 * upper_tail(std::abs(stat)), 0.0, 1.0);
      break;
    case Alternative::Greater:
      result.p_value = std::clamp(upper_tail(stat), 0.0, 1.0);
      break;
    case Alternative::Less:
      result.p_value = std::clamp(upper_tail(-stat), 0.0, 1.0);
      break;
  }
  return result;
}

}  // namespace covpair
