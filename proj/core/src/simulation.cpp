#include "covpair/simulation.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <thread>

#include "covpair/errors.hpp"

namespace covpair {

namespace {

constexpr std::uint64_t kBlockReps = 1u << 16;

void require_plan(const SimulationPlan& plan) {
  if (plan.n < 1) throw DomainError("simulation requires n >= 1");
  if (plan.reps < 1) throw DomainError("simulation requires reps >= 1");
}

// Runs `task(block_index, rep_begin, rep_end)` over fixed-size blocks of the
// replication range.  Blocks are claimed by an atomic counter but identified
// by index, so any per-block outputs can be folded in index order afterward;
// that is what keeps results independent of the worker count.
void run_blocks(std::uint64_t reps,
                const std::function<void(std::size_t, std::uint64_t, std::uint64_t)>& task) {
  const std::size_t num_blocks = static_cast<std::size_t>((reps + kBlockReps - 1) / kBlockReps);
  unsigned workers = std::min<unsigned>(simulation_workers(),
                                        static_cast<unsigned>(std::min<std::size_t>(num_blocks, 64)));
  if (workers <= 1) {
    for (std::size_t b = 0; b < num_blocks; ++b) {
      const std::uint64_t lo = b * kBlockReps;
      task(b, lo, std::min(reps, lo + kBlockReps));
    }
    return;
  }
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (;;) {
      const std::size_t b = next.fetch_add(1);
      if (b >= num_blocks) return;
      const std::uint64_t lo = b * kBlockReps;
      task(b, lo, std::min(reps, lo + kBlockReps));
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
}

inline std::array<double, 2> one_rep(const Matrix3& l, int n, std::uint64_t seed,
                                     std::uint64_t rep) {
  SubstreamRng rng(seed, rep);
  double gac = 0.0, gbc = 0.0;
  for (int j = 0; j < n; ++j) {
    const double z1 = rng.next_normal();
    const double z2 = rng.next_normal();
    const double z3 = rng.next_normal();
    const double a = l[0][0] * z1;
    const double b = l[1][0] * z1 + l[1][1] * z2;
    const double c = l[2][0] * z1 + l[2][1] * z2 + l[2][2] * z3;
    gac += a * c;
    gbc += b * c;
  }
  return {gac, gbc};
}

}  // namespace

unsigned simulation_workers() {
  unsigned hw = std::thread::hardware_concurrency();
  if (hw == 0) hw = 1;
  if (const char* env = std::getenv("COVPAIR_THREADS")) {
    char* end = nullptr;
    const unsigned long v = std::strtoul(env, &end, 10);
    if (end != env && v > 0) return static_cast<unsigned>(std::min<unsigned long>(v, 64));
  }
  return hw;
}

CholeskyFactor cholesky(const CovarianceStructure& s) {
  const double rho = s.rho();
  const double sigma = s.sigma();
  Matrix3 l{};
  l[0][0] = 1.0;
  l[1][0] = sigma;
  l[1][1] = std::sqrt(1.0 - sigma * sigma);
  l[2][0] = rho;
  l[2][1] = rho * (1.0 - sigma) / l[1][1];
  const double d = 1.0 - rho * rho - l[2][1] * l[2][1];
  if (!(d > 0.0) || !(l[1][1] > 0.0)) {
    // The admissibility constraints guarantee positive definiteness; landing
    // here means the structure validation is broken.
    throw Error("internal error: Cholesky failed for a validated structure");
  }
  l[2][2] = std::sqrt(d);
  return {l};
}

std::vector<std::array<double, 2>> sample_cov_pairs(const SimulationPlan& plan) {
  require_plan(plan);
  const Matrix3 l = cholesky(plan.structure).lower;
  std::vector<std::array<double, 2>> out(plan.reps);
  run_blocks(plan.reps, [&](std::size_t, std::uint64_t lo, std::uint64_t hi) {
    for (std::uint64_t r = lo; r < hi; ++r) out[r] = one_rep(l, plan.n, plan.seed, r);
  });
  return out;
}

QuadrantEstimate empirical_quadrant(const SimulationPlan& plan, double x0, double y0) {
  require_plan(plan);
  const Matrix3 l = cholesky(plan.structure).lower;
  const std::size_t num_blocks = static_cast<std::size_t>((plan.reps + kBlockReps - 1) / kBlockReps);
  std::vector<std::uint64_t> hits(num_blocks, 0);
  run_blocks(plan.reps, [&](std::size_t b, std::uint64_t lo, std::uint64_t hi) {
    std::uint64_t h = 0;
    for (std::uint64_t r = lo; r < hi; ++r) {
      const auto g = one_rep(l, plan.n, plan.seed, r);
      if (g[0] > x0 && g[1] > y0) ++h;
    }
    hits[b] = h;
  });
  std::uint64_t total = 0;
  for (std::uint64_t h : hits) total += h;
  QuadrantEstimate est;
  est.hits = total;
  est.reps = plan.reps;
  est.estimate = static_cast<double>(total) / static_cast<double>(plan.reps);
  est.std_error = std::sqrt(est.estimate * (1.0 - est.estimate) / static_cast<double>(plan.reps));
  return est;
}

MomentSummary component_moments(const SimulationPlan& plan) {
  require_plan(plan);
  const Matrix3 l = cholesky(plan.structure).lower;
  struct Acc {
    double s[3] = {0, 0, 0};
    double ss[3] = {0, 0, 0};
    double sab = 0, sac = 0, sbc = 0;
  };
  const std::size_t num_blocks = static_cast<std::size_t>((plan.reps + kBlockReps - 1) / kBlockReps);
  std::vector<Acc> accs(num_blocks);
  run_blocks(plan.reps, [&](std::size_t bi, std::uint64_t lo, std::uint64_t hi) {
    Acc a;
    for (std::uint64_t r = lo; r < hi; ++r) {
      SubstreamRng rng(plan.seed, r);
      for (int j = 0; j < plan.n; ++j) {
        const double z1 = rng.next_normal();
        const double z2 = rng.next_normal();
        const double z3 = rng.next_normal();
        const double av = l[0][0] * z1;
        const double bv = l[1][0] * z1 + l[1][1] * z2;
        const double cv = l[2][0] * z1 + l[2][1] * z2 + l[2][2] * z3;
        a.s[0] += av;
        a.s[1] += bv;
        a.s[2] += cv;
        a.ss[0] += av * av;
        a.ss[1] += bv * bv;
        a.ss[2] += cv * cv;
        a.sab += av * bv;
        a.sac += av * cv;
        a.sbc += bv * cv;
      }
    }
    accs[bi] = a;
  });
  Acc t;
  for (const Acc& a : accs) {
    for (int i = 0; i < 3; ++i) {
      t.s[i] += a.s[i];
      t.ss[i] += a.ss[i];
    }
    t.sab += a.sab;
    t.sac += a.sac;
    t.sbc += a.sbc;
  }
  MomentSummary m;
  m.count = plan.reps * static_cast<std::uint64_t>(plan.n);
  const double inv = 1.0 / static_cast<double>(m.count);
  for (int i = 0; i < 3; ++i) {
    m.mean[i] = t.s[i] * inv;
    m.variance[i] = t.ss[i] * inv - m.mean[i] * m.mean[i];
  }
  m.cov_ab = t.sab * inv - m.mean[0] * m.mean[1];
  m.cov_ac = t.sac * inv - m.mean[0] * m.mean[2];
  m.cov_bc = t.sbc * inv - m.mean[1] * m.mean[2];
  return m;
}

CltReport clt_check_single(const CovarianceStructure& s, int n, std::uint64_t reps,
                           std::uint64_t seed) {
  const SimulationPlan plan{s, n, reps, seed};
  require_plan(plan);
  const Matrix3 l = cholesky(s).lower;
  const double shift = n * s.rho();
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));

  struct Acc {
    double s11 = 0, s22 = 0, s12 = 0;
    double q11 = 0, q22 = 0, q12 = 0;  // fourth moments of the products
  };
  const std::size_t num_blocks = static_cast<std::size_t>((reps + kBlockReps - 1) / kBlockReps);
  std::vector<Acc> accs(num_blocks);
  run_blocks(reps, [&](std::size_t bi, std::uint64_t lo, std::uint64_t hi) {
    Acc a;
    for (std::uint64_t r = lo; r < hi; ++r) {
      const auto g = one_rep(l, n, seed, r);
      const double u = (g[0] - shift) * scale;
      const double v = (g[1] - shift) * scale;
      a.s11 += u * u;
      a.s22 += v * v;
      a.s12 += u * v;
      a.q11 += u * u * u * u;
      a.q22 += v * v * v * v;
      a.q12 += u * v * u * v;
    }
    accs[bi] = a;
  });
  Acc t;
  for (const Acc& a : accs) {
    t.s11 += a.s11;
    t.s22 += a.s22;
    t.s12 += a.s12;
    t.q11 += a.q11;
    t.q22 += a.q22;
    t.q12 += a.q12;
  }

  const double inv = 1.0 / static_cast<double>(reps);
  CltReport rep;
  rep.n = n;
  rep.empirical = {{{t.s11 * inv, t.s12 * inv}, {t.s12 * inv, t.s22 * inv}}};
  const double r2 = s.rho() * s.rho();
  rep.limit = {{{r2 + 1.0, r2 + s.sigma()}, {r2 + s.sigma(), r2 + 1.0}}};
  auto se = [inv](double fourth, double second) {
    return std::sqrt(std::max(0.0, fourth * inv - second * second) * inv);
  };
  rep.std_error = {{{se(t.q11, rep.empirical[0][0]), se(t.q12, rep.empirical[0][1])},
                    {se(t.q12, rep.empirical[1][0]), se(t.q22, rep.empirical[1][1])}}};
  rep.max_abs_dev = 0.0;
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      rep.max_abs_dev =
          std::max(rep.max_abs_dev, std::abs(rep.empirical[i][j] - rep.limit[i][j]));
    }
  }
  return rep;
}

std::vector<CltReport> clt_check(const CovarianceStructure& s, std::span<const int> n_list,
                                 std::uint64_t reps, std::uint64_t seed) {
  std::vector<CltReport> out;
  out.reserve(n_list.size());
  for (int n : n_list) out.push_back(clt_check_single(s, n, reps, seed));
  return out;
}

}  // namespace covpair
