#pragma once

#include <complex>
#include <functional>
#include <span>

namespace covpair {

// How infinite regions are clipped: a fixed radius, or a radius derived from
// a tail-mass bound epsilon (computed per density by truncation_radius).
struct TruncationPolicy {
  enum class Kind { Fixed, Auto };
  Kind kind = Kind::Auto;
  double value = 1e-10;

  static constexpr TruncationPolicy fixed(double radius) { return {Kind::Fixed, radius}; }
  static constexpr TruncationPolicy auto_tail(double epsilon) { return {Kind::Auto, epsilon}; }
};

struct QuadratureConfig {
  double abs_tol = 1e-9;
  double rel_tol = 1e-8;
  long max_subdivisions = 20000;
  TruncationPolicy truncation{};
  double singularity_exclusion_radius = 1e-3;
};

struct IntegralResult {
  double value = 0.0;
  double error_estimate = 0.0;
  long subdivisions = 0;
  bool converged = true;
};

struct Rect {
  double x0, x1, y0, y1;
};

struct Point2 {
  double x, y;
};

// Adaptive Gauss(7)/Kronrod(15) over [a, b].  Breakpoints pre-split the
// interval (use them to park integrable endpoint singularities on panel
// edges, where no node lands).
IntegralResult integrate_1d(const std::function<double(double)>& f, double a, double b,
                            const QuadratureConfig& cfg,
                            std::span<const double> breakpoints = {});

// Adaptive tensor G7K15 over a rectangle with bisection along the longer
// side.  Declared point singularities inside the region are excised by a
// small square that is integrated in local polar coordinates (the r dr
// Jacobian bounds 1/r and log singularities); the complement stays
// rectangular.  Throws NonFiniteSample if f is non-finite elsewhere.
IntegralResult integrate_2d(const std::function<double(double, double)>& f, const Rect& region,
                            const QuadratureConfig& cfg,
                            std::span<const Point2> singularities = {});

struct ComplexIntegralResult {
  std::complex<double> value{0.0, 0.0};
  double error_estimate = 0.0;
  bool converged = true;
};

// integral_0^inf f(t) dt where the tail of f oscillates with angular
// frequency omega (factors like cos(omega t) or e^{-i omega t}).  A head
// region [0, ~head] is integrated adaptively; the remainder is summed over
// half-period segments and the partial sums are extrapolated with the Wynn
// epsilon algorithm, which converges even for conditionally convergent
// tails decaying as slowly as 1/t.
ComplexIntegralResult integrate_oscillatory_semiaxis(
    const std::function<std::complex<double>(double)>& f, double omega, double head, double tol,
    int max_segments = 96);

// integral_0^inf f(t) dt for a non-oscillatory tail decaying exponentially or
// algebraically with order > 1: doubling blocks summed until two consecutive
// blocks are negligible.
ComplexIntegralResult integrate_decaying_semiaxis(
    const std::function<std::complex<double>(double)>& f, double first_block, double tol,
    int max_blocks = 64);

}  // namespace covpair
