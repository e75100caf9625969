#pragma once

#include <array>
#include <cstdint>

namespace covpair {

// Philox4x32-10 counter-based generator (Salmon, Moraes, Dror, Shaw 2011).
// Stateless block function: the 128-bit counter is (substream << 64) | block,
// the 64-bit key is the user seed.  Every (seed, substream, block) triple maps
// to the same four words on every platform and thread schedule, which is what
// the reproducibility contract of the simulation module rests on.
std::array<std::uint32_t, 4> philox4x32(std::uint64_t seed, std::uint64_t substream,
                                        std::uint64_t block);

// Standard normal quantile.  Hastings rational start (A&S 26.2.23) followed
// by two Halley refinements against erfc; fixed iteration count, one uniform
// consumed per deviate, accurate to ~1e-15 over p in (0, 1).
double normal_quantile(double p);

// Buffered per-substream stream of uniforms / normals.
class SubstreamRng {
 public:
  SubstreamRng(std::uint64_t seed, std::uint64_t substream)
      : seed_(seed), substream_(substream) {}

  std::uint64_t next_u64() {
    if (have_ == 0) {
      const auto w = philox4x32(seed_, substream_, block_++);
      buf_[0] = (static_cast<std::uint64_t>(w[1]) << 32) | w[0];
      buf_[1] = (static_cast<std::uint64_t>(w[3]) << 32) | w[2];
      have_ = 2;
    }
    return buf_[--have_];
  }

  // Uniform in the open interval (0, 1), 53-bit grid centered off the ends.
  double next_u01() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53 + 0x1.0p-54;
  }

  double next_normal() { return normal_quantile(next_u01()); }

 private:
  std::uint64_t seed_;
  std::uint64_t substream_;
  std::uint64_t block_ = 0;
  std::array<std::uint64_t, 2> buf_{};
  int have_ = 0;
};

}  // namespace covpair
