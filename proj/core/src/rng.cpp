#include "covpair/rng.hpp"

#include <cmath>

namespace covpair {

namespace {

constexpr std::uint32_t kPhiloxW32A = 0x9E3779B9u;
constexpr std::uint32_t kPhiloxW32B = 0xBB67AE85u;
constexpr std::uint32_t kPhiloxM4x32A = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM4x32B = 0xCD9E8D57u;

inline void mul_hi_lo(std::uint32_t a, std::uint32_t b, std::uint32_t& lo, std::uint32_t& hi) {
  const std::uint64_t prod = static_cast<std::uint64_t>(a) * b;
  lo = static_cast<std::uint32_t>(prod);
  hi = static_cast<std::uint32_t>(prod >> 32);
}

inline void philox_round(std::array<std::uint32_t, 4>& ctr, const std::array<std::uint32_t, 2>& key) {
  std::uint32_t lo0, hi0, lo1, hi1;
  mul_hi_lo(kPhiloxM4x32A, ctr[0], lo0, hi0);
  mul_hi_lo(kPhiloxM4x32B, ctr[2], lo1, hi1);
  ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
}

}  // namespace

std::array<std::uint32_t, 4> philox4x32(std::uint64_t seed, std::uint64_t substream,
                                        std::uint64_t block) {
  std::array<std::uint32_t, 4> ctr = {
      static_cast<std::uint32_t>(block), static_cast<std::uint32_t>(block >> 32),
      static_cast<std::uint32_t>(substream), static_cast<std::uint32_t>(substream >> 32)};
  std::array<std::uint32_t, 2> key = {static_cast<std::uint32_t>(seed),
                                      static_cast<std::uint32_t>(seed >> 32)};
  for (int round = 0; round < 10; ++round) {
    philox_round(ctr, key);
    key[0] += kPhiloxW32A;
    key[1] += kPhiloxW32B;
  }
  return ctr;
}

double normal_quantile(double p) {
  // Work with the upper-tail probability r <= 1/2, flip the sign at the end.
  const bool upper = p > 0.5;
  const double r = upper ? 1.0 - p : p;

  // Hastings start: x ~ t - (c0 + c1 t + c2 t^2)/(1 + d1 t + d2 t^2 + d3 t^3),
  // t = sqrt(-2 ln r); absolute error < 4.5e-4.
  const double t = std::sqrt(-2.0 * std::log(r));
  double xx = t - (2.515517 + t * (0.802853 + t * 0.010328)) /
                      (1.0 + t * (1.432788 + t * (0.189269 + t * 0.001308)));

  // Two Halley steps on Q(x) - r with Q the upper-tail cdf.  Q and r share a
  // scale, so the correction stays relatively accurate deep into the tail.
  constexpr double kInvSqrt2 = 0.70710678118654752440;
  constexpr double kInvSqrt2Pi = 0.39894228040143267794;
  for (int i = 0; i < 2; ++i) {
    const double qx = 0.5 * std::erfc(xx * kInvSqrt2);
    const double pdf = kInvSqrt2Pi * std::exp(-0.5 * xx * xx);
    const double f = qx - r;
    const double step = f / pdf;  // Newton step (note dQ/dx = -pdf)
    xx += step / (1.0 - 0.5 * xx * step);
  }
  return upper ? xx : -xx;
}

}  // namespace covpair
