#pragma once
#include <cmath>
#include <cstdint>
#include <numbers>

// xoshiro256++ seeded through splitmix64.  Gaussian variates use an explicit
// Box-Muller so a stream's output is identical across platforms and compilers
// (std::normal_distribution is not pinned by the standard).

namespace pinlab {

inline std::uint64_t splitmix64(std::uint64_t& s) {
  std::uint64_t z = (s += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

class Rng {
 public:
  // `stream` selects an independent substream of the same master seed; replica
  // i of a run uses stream i, which is what makes worker counts irrelevant to
  // the output.
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0) {
    std::uint64_t m = seed ^ (0x632be59bd9b4e019ULL * (stream + 1));
    for (auto& w : s_) w = splitmix64(m);
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  // uniform on (0,1): 53-bit mantissa, never exactly 0
  double next_uniform() {
    return ((next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  double next_gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = next_uniform();
    double u2 = next_uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

  // +1 / -1 with equal probability
  double next_sign() { return (next_u64() >> 63) ? 1.0 : -1.0; }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }
  std::uint64_t s_[4];
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace pinlab
