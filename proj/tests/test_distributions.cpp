#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>

#include "covpair/distributions.hpp"
#include "covpair/quadrature.hpp"
#include "support/bessel_oracle.hpp"
#include "support/random_structures.hpp"

using namespace covpair;
using complexd = std::complex<double>;

namespace {

double crel(complexd a, complexd b) { return std::abs(a - b) / std::max(std::abs(a), 1e-300); }

// Independent 3x3 complex determinant: permutation expansion.
complexd det3_perm(const complexd m[3][3]) {
  return m[0][0] * m[1][1] * m[2][2] + m[0][1] * m[1][2] * m[2][0] +
         m[0][2] * m[1][0] * m[2][1] - m[0][2] * m[1][1] * m[2][0] -
         m[0][1] * m[1][0] * m[2][2] - m[0][0] * m[1][2] * m[2][1];
}

}  // namespace

TEST_CASE("single-observation density: reference values") {
  const auto s = make_structure(0.5, 0.5);
  CHECK(std::isinf(density_n1({s, 1, 0.0, 0.0})));
  // Q0 = 0.75 - 0.5 + 0.75 = 1 at (1,1), so f = e^{1 - sqrt(3)} / (2 pi)
  const double expect = std::exp(1.0 - std::sqrt(3.0)) / (2.0 * M_PI);
  CHECK(density_n1({s, 1, 1.0, 1.0}) == doctest::Approx(expect).epsilon(1e-14));
}

TEST_CASE("single-observation density: symmetry in (x, y)") {
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> u(-4.0, 4.0);
  const auto s = make_structure(0.4, 0.3);
  for (int i = 0; i < 100; ++i) {
    const double x = u(gen), y = u(gen);
    CHECK(density_n1({s, 1, x, y}) == density_n1({s, 1, y, x}));
  }
}

TEST_CASE("n = 3 closed form at the origin") {
  const auto s = make_structure(0.5, 0.5);
  const double expect = 1.0 / (2.0 * M_PI * std::sqrt(0.75));  // = 1/(pi sqrt(3))
  CHECK(density_n3({s, 3, 0.0, 0.0}) == doctest::Approx(expect).epsilon(1e-14));
  CHECK(density_general({s, 3, 0.0, 0.0}) == doctest::Approx(expect).epsilon(1e-13));
  CHECK(expect == doctest::Approx(0.1837762985).epsilon(1e-9));
}

TEST_CASE("origin singularities for n <= 2") {
  const auto s = make_structure(0.0, 0.0);
  CHECK(std::isinf(density_general({s, 2, 0.0, 0.0})));
  CHECK(std::isinf(density_n2({s, 2, 0.0, 0.0})));
  CHECK(std::isinf(density_general({s, 1, 0.0, 0.0})));
}

TEST_CASE("general density specializes to the hand forms") {
  std::mt19937_64 gen(23);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  for (int i = 0; i < 50; ++i) {
    const auto s = covpair_test::random_structure(gen);
    const double x = u(gen), y = u(gen);
    const double f2 = density_n2({s, 2, x, y});
    const double f3 = density_n3({s, 3, x, y});
    const double f4 = density_n4({s, 4, x, y});
    CHECK(std::abs(density_general({s, 2, x, y}) - f2) <= 1e-12 * f2);
    CHECK(std::abs(density_general({s, 3, x, y}) - f3) <= 1e-12 * f3);
    CHECK(std::abs(density_general({s, 4, x, y}) - f4) <= 1e-12 * f4);
  }
}

TEST_CASE("general density reduces to the single-observation form at n = 1") {
  std::mt19937_64 gen(29);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  for (int i = 0; i < 100; ++i) {
    const auto s = covpair_test::random_structure(gen);
    double x = u(gen), y = u(gen);
    if (x == 0.0 && y == 0.0) x = 0.5;
    const double f1 = density_n1({s, 1, x, y});
    CHECK(std::abs(density_general({s, 1, x, y}) - f1) <= 1e-12 * f1);
  }
}

TEST_CASE("both n = 3 forms agree") {
  std::mt19937_64 gen(31);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  for (int i = 0; i < 200; ++i) {
    const auto s = covpair_test::random_structure(gen);
    const double x = u(gen), y = u(gen);
    const double canonical = density_n3({s, 3, x, y});
    const double reduced = density_n3_reduced({s, 3, x, y});
    CHECK(std::abs(canonical - reduced) <= 1e-12 * canonical);
  }
  // spot value: both forms at (1, 1) for the reference structure
  const auto s = make_structure(0.5, 0.5);
  const double expect = std::exp(1.0 - std::sqrt(3.0)) / (2.0 * M_PI * std::sqrt(0.75));
  CHECK(density_n3({s, 3, 1.0, 1.0}) == doctest::Approx(expect).epsilon(1e-13));
  CHECK(density_n3_reduced({s, 3, 1.0, 1.0}) == doctest::Approx(expect).epsilon(1e-13));
}

TEST_CASE("n = 2 specialization away from the origin") {
  const auto s = make_structure(0.5, 0.5);
  const double f2 = density_n2({s, 2, 2.0, 2.0});
  CHECK(f2 > 0.0);
  CHECK(std::isfinite(f2));
  CHECK(density_general({s, 2, 2.0, 2.0}) == doctest::Approx(f2).epsilon(1e-13));
}

TEST_CASE("n = 4 density is finite at the origin via the z K_1(z) -> 1 limit") {
  const auto s = make_structure(0.5, 0.5);
  const auto c = derive_constants(s);
  const double expect = (c.lambda * c.lambda * c.kappa * c.kappa / (4.0 * M_PI * c.alpha)) *
                        (2.0 * c.lambda * c.kappa / c.alpha);
  CHECK(density_n4({s, 4, 0.0, 0.0}) == doctest::Approx(expect).epsilon(1e-13));
  CHECK(density_general({s, 4, 0.0, 0.0}) == doctest::Approx(expect).epsilon(1e-13));
}

TEST_CASE("density is nonnegative and symmetric under (x,y) swap") {
  std::mt19937_64 gen(37);
  std::uniform_real_distribution<double> u(-6.0, 6.0);
  for (int i = 0; i < 200; ++i) {
    const auto s = covpair_test::random_structure(gen);
    const int n = 1 + static_cast<int>(gen() % 6);
    const double x = u(gen), y = u(gen);
    const double f = density_general({s, n, x, y});
    CHECK(f >= 0.0);
    const double g = density_general({s, n, y, x});
    CHECK(std::abs(f - g) <= 1e-12 * std::max(f, 1e-300));
  }
}

TEST_CASE("marginal density reference values") {
  // rho = 0, n = 1: product-normal density K_0(|x|)/pi
  const auto s0 = make_structure(0.0, 0.0);
  const double k01 = static_cast<double>(bessel_k_oracle(0.0L, 1.0L));
  CHECK(marginal_density(s0, 1, 1.0) == doctest::Approx(k01 / M_PI).epsilon(1e-12));
  CHECK(marginal_density(s0, 1, 1.0) == doctest::Approx(0.134016241017).epsilon(1e-9));
  CHECK(std::isinf(marginal_density(s0, 1, 0.0)));

  // rho = 0, n = 3, x -> 0: |x/2| K_1(|x|) -> 1/2, then / (sqrt(pi) Gamma(3/2)) = 1/pi
  CHECK(marginal_density(s0, 3, 1e-13) == doctest::Approx(1.0 / M_PI).epsilon(1e-10));
  CHECK(marginal_density(s0, 3, 0.0) == doctest::Approx(1.0 / M_PI).epsilon(1e-12));

  // even in x at rho = 0
  for (double x : {0.3, 1.1, 2.7, 5.0}) {
    for (int n : {1, 2, 3, 4}) {
      CHECK(marginal_density(s0, n, x) == marginal_density(s0, n, -x));
    }
  }

  // depends on rho only: sigma must not enter
  const auto sa = make_structure(0.4, 0.0);
  const auto sb = make_structure(0.4, 0.6);
  for (double x : {-2.0, 0.4, 1.7}) {
    CHECK(marginal_density(sa, 2, x) == marginal_density(sb, 2, x));
  }
}

TEST_CASE("difference-statistic density") {
  // 2 - 2 sigma = 1 at sigma = 1/2 reduces to the product-normal marginal
  const double k01 = static_cast<double>(bessel_k_oracle(0.0L, 1.0L));
  CHECK(diff_density(0.5, 1, 1.0) == doctest::Approx(k01 / M_PI).epsilon(1e-12));
  // n = 2, sigma = 1/2 is Laplace(1): e^{-|x|}/2
  for (double x : {0.2, 1.0, 3.5}) {
    CHECK(diff_density(0.5, 2, x) == doctest::Approx(0.5 * std::exp(-x)).epsilon(1e-12));
  }
  // even function of x
  for (double x : {0.3, 1.2, 4.4}) {
    CHECK(diff_density(0.0, 2, x) == diff_density(0.0, 2, -x));
    CHECK(diff_density(-0.4, 3, x) == diff_density(-0.4, 3, -x));
  }
  CHECK_THROWS_AS(diff_density(1.0, 1, 0.5), DomainError);
  CHECK_THROWS_AS(diff_density(-1.2, 1, 0.5), DomainError);
}

TEST_CASE("difference-statistic density integrates to one") {
  QuadratureConfig cfg;
  cfg.abs_tol = 1e-10;
  for (double sigma : {-0.5, 0.0, 0.5, 0.9}) {
    const double scale = std::sqrt(2.0 - 2.0 * sigma);
    for (int n = 1; n <= 6; ++n) {
      const double upper = scale * (80.0 + 10.0 * n);
      std::vector<double> breaks{0.0};
      auto res = integrate_1d([sigma, n](double x) { return diff_density(sigma, n, x); }, -upper,
                              upper, cfg, breaks);
      CHECK(res.value == doctest::Approx(1.0).epsilon(1e-8));
    }
  }
}

TEST_CASE("characteristic function: normalization and symmetry") {
  std::mt19937_64 gen(41);
  std::uniform_real_distribution<double> u(-8.0, 8.0);
  for (int i = 0; i < 100; ++i) {
    const auto s = covpair_test::random_structure(gen);
    const int n = 1 + static_cast<int>(gen() % 6);
    CHECK(cf_closed({s, n, 0.0, 0.0}) == complexd(1.0, 0.0));
    const double uu = u(gen), vv = u(gen);
    CHECK(crel(cf_closed({s, n, uu, vv}), cf_closed({s, n, vv, uu})) < 1e-14);
    // modulus bound, strict away from the origin
    CHECK(std::abs(cf_closed({s, n, uu, vv})) <= 1.0);
    if (std::abs(uu) + std::abs(vv) > 1e-6) CHECK(std::abs(cf_closed({s, n, uu, vv})) < 1.0);
  }
}

TEST_CASE("characteristic function at the worked example") {
  const auto s = make_structure(0.5, 0.5);
  const CfQuery q{s, 1, 1.0, 1.0};
  // radicand 1 + 0.75 - i + 0.75 - i + 0.5 = 3 - 2i
  const complexd expect = std::pow(complexd(3.0, -2.0), -0.5);
  CHECK(crel(cf_closed(q), expect) < 1e-14);
  CHECK(crel(cf_reduced(q), expect) < 1e-13);
  CHECK(crel(cf_determinant(q), expect) < 1e-13);
}

TEST_CASE("reduced form matches its special-case display") {
  const auto s = make_structure(0.5, 0.5);
  std::mt19937_64 gen(43);
  std::uniform_real_distribution<double> dis(-6.0, 6.0);
  for (int i = 0; i < 100; ++i) {
    const double uu = dis(gen), vv = dis(gen);
    const complexd w(uu + vv, -1.0);
    const complexd direct = 2.0 / std::sqrt(2.0 * w * w + (vv - uu) * (vv - uu) + 6.0);
    CHECK(crel(cf_reduced({s, 1, uu, vv}), direct) < 1e-13);
  }
}

TEST_CASE("reduced form is exactly normalized at the origin") {
  std::mt19937_64 gen(47);
  for (int i = 0; i < 100; ++i) {
    const auto s = covpair_test::random_structure(gen);
    const int n = 1 + static_cast<int>(gen() % 5);
    CHECK(std::abs(cf_reduced({s, n, 0.0, 0.0}) - complexd(1.0, 0.0)) < 1e-12);
  }
}

TEST_CASE("three characteristic-function routes agree") {
  std::mt19937_64 gen(53);
  std::uniform_real_distribution<double> dis(-10.0, 10.0);
  for (int i = 0; i < 1000; ++i) {
    const auto s = covpair_test::random_structure(gen);
    const int n = 1 + static_cast<int>(gen() % 8);
    const CfQuery q{s, n, dis(gen), dis(gen)};
    const complexd closed = cf_closed(q);
    CHECK(crel(closed, cf_reduced(q)) < 1e-12);
    CHECK(crel(closed, cf_determinant(q)) < 1e-12);
  }
}

TEST_CASE("branch safety: radicand real part stays >= 1") {
  std::mt19937_64 gen(59);
  std::uniform_real_distribution<double> dis(-20.0, 20.0);
  for (int i = 0; i < 1000; ++i) {
    const auto s = covpair_test::random_structure(gen);
    const double uu = dis(gen), vv = dis(gen);
    const double a = 1.0 - s.rho() * s.rho();
    const double b = s.sigma() - s.rho() * s.rho();
    const double re = 1.0 + a * (uu * uu + vv * vv) + 2.0 * b * uu * vv;
    CHECK(re >= 1.0 - 1e-12);
  }
}

TEST_CASE("triple characteristic function") {
  const auto s = make_structure(0.5, 0.5);
  CHECK(cf_triple(s, 0.0, 0.0, 0.0) == complexd(1.0, 0.0));

  // swapping A and B swaps the AC/BC slots and leaves Sigma invariant
  std::mt19937_64 gen(61);
  std::uniform_real_distribution<double> dis(-5.0, 5.0);
  for (int i = 0; i < 100; ++i) {
    const auto st = covpair_test::random_structure(gen);
    const double uu = dis(gen), vv = dis(gen), ww = dis(gen);
    CHECK(crel(cf_triple(st, uu, vv, ww), cf_triple(st, uu, ww, vv)) < 1e-13);
  }

  // independent determinant expansion at (1, 0, 0)
  const double uu = 1.0;
  const complexd i2(0.0, -2.0);
  const Matrix3 sg = s.matrix();
  const double th[3][3] = {{0.0, uu / 2, 0.0}, {uu / 2, 0.0, 0.0}, {0.0, 0.0, 0.0}};
  complexd m[3][3];
  for (int r = 0; r < 3; ++r) {
    for (int cc = 0; cc < 3; ++cc) {
      double p = 0.0;
      for (int k = 0; k < 3; ++k) p += sg[r][k] * th[k][cc];
      m[r][cc] = (r == cc ? 1.0 : 0.0) + i2 * p;
    }
  }
  const complexd expect = std::pow(det3_perm(m), -0.5);
  CHECK(crel(cf_triple(s, 1.0, 0.0, 0.0), expect) < 1e-13);
}

TEST_CASE("limit covariance and density") {
  const auto s = make_structure(0.5, 0.5);
  const auto cov = clt_limit_covariance(s);
  CHECK(cov[0][0] == doctest::Approx(1.25).epsilon(1e-15));
  CHECK(cov[0][1] == doctest::Approx(0.75).epsilon(1e-15));
  CHECK(cov[1][0] == doctest::Approx(0.75).epsilon(1e-15));
  CHECK(cov[1][1] == doctest::Approx(1.25).epsilon(1e-15));

  const auto s0 = make_structure(0.0, 0.0);
  CHECK(clt_limit_density(s0, 0.0, 0.0) == doctest::Approx(1.0 / (2.0 * M_PI)).epsilon(1e-14));

  // integrates to 1 over a generous box
  QuadratureConfig cfg;
  cfg.abs_tol = 1e-9;
  auto res = integrate_2d([&s](double a, double b) { return clt_limit_density(s, a, b); },
                          Rect{-12.0, 12.0, -12.0, 12.0}, cfg);
  CHECK(res.value == doctest::Approx(1.0).epsilon(1e-7));

  // positive definiteness margin of the limit covariance across structures
  std::mt19937_64 gen(67);
  for (int i = 0; i < 200; ++i) {
    const auto st = covpair_test::random_structure(gen);
    const auto cv = clt_limit_covariance(st);
    CHECK(cv[0][0] * cv[1][1] - cv[0][1] * cv[1][0] > 0.0);
  }
}

TEST_CASE("invalid sample sizes are rejected") {
  const auto s = make_structure(0.2, 0.1);
  CHECK_THROWS_AS(density_general({s, 0, 1.0, 1.0}), DomainError);
  CHECK_THROWS_AS(marginal_density(s, -3, 1.0), DomainError);
  CHECK_THROWS_AS(cf_closed({s, 0, 0.0, 0.0}), DomainError);
}
