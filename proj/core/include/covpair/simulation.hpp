#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "covpair/params.hpp"
#include "covpair/rng.hpp"

namespace covpair {

struct SimulationPlan {
  CovarianceStructure structure;
  int n = 1;               // observations per replication
  std::uint64_t reps = 1;  // number of replications
  std::uint64_t seed = 0;
};

struct CholeskyFactor {
  Matrix3 lower;  // L with L * L^T = Sigma, strictly positive diagonal
};

CholeskyFactor cholesky(const CovarianceStructure& s);

// Per-replication pair (sum_j A_j C_j, sum_j B_j C_j).  Replication r draws
// its normals from substream r of the plan seed, so output is byte-identical
// for any worker count and any rerun of the same plan.
std::vector<std::array<double, 2>> sample_cov_pairs(const SimulationPlan& plan);

struct QuadrantEstimate {
  double estimate = 0.0;
  double std_error = 0.0;
  std::uint64_t hits = 0;
  std::uint64_t reps = 0;
};

// Fraction of replications with g_ac > x0 and g_bc > y0, binomial SE.
QuadrantEstimate empirical_quadrant(const SimulationPlan& plan, double x0, double y0);

// First/second moments of the raw (A, B, C) stream across all n*reps triples;
// sampler health probe.
struct MomentSummary {
  std::array<double, 3> mean{};
  std::array<double, 3> variance{};
  double cov_ab = 0.0, cov_ac = 0.0, cov_bc = 0.0;
  std::uint64_t count = 0;
};

MomentSummary component_moments(const SimulationPlan& plan);

// Covariance of the standardized pair (g - n rho)/sqrt(n) against the
// large-n limit.  Zero-mean convention for the empirical covariance; SEs
// estimated from empirical fourth moments.
struct CltReport {
  int n = 0;
  std::array<std::array<double, 2>, 2> empirical{};
  std::array<std::array<double, 2>, 2> limit{};
  std::array<std::array<double, 2>, 2> std_error{};
  double max_abs_dev = 0.0;
};

CltReport clt_check_single(const CovarianceStructure& s, int n, std::uint64_t reps,
                           std::uint64_t seed);
std::vector<CltReport> clt_check(const CovarianceStructure& s, std::span<const int> n_list,
                                 std::uint64_t reps, std::uint64_t seed);

// Worker count for replication-parallel runs: COVPAIR_THREADS, 0/unset = all
// hardware threads.  The determinism contract holds for every value.
unsigned simulation_workers();

}  // namespace covpair
