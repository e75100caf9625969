#pragma once

#include <array>
#include <optional>
#include <vector>

#include "covpair/quadrature.hpp"

namespace covpair {

enum class Alternative { TwoSided, Greater, Less };
enum class SigmaSource { Supplied, Estimated };

// Observations (a_j, b_j, c_j) for the test of equal cross-covariances
// gamma_AC = gamma_BC.  sigma is the A-B covariance; when absent it is
// estimated by the zero-mean plug-in (1/n) sum a_j b_j.
struct TestInput {
  std::vector<std::array<double, 3>> observations;
  std::optional<double> sigma;
  Alternative alternative = Alternative::TwoSided;
};

struct TestResult {
  double statistic = 0.0;  // sum_j (a_j - b_j) c_j
  int n = 0;
  double sigma_used = 0.0;
  SigmaSource sigma_source = SigmaSource::Supplied;
  double p_value = 1.0;
};

// P(X >= threshold) under the null law of the difference statistic
// (threshold >= 0; the null density depends on sigma only, never rho).
double diff_tail(double sigma, int n, double threshold, const QuadratureConfig& cfg = {});

TestResult equality_test(const TestInput& input, const QuadratureConfig& cfg = {});

}  // namespace covpair
