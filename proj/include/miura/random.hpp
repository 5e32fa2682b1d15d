#pragma once

// Seeded fixture generation. The generator is xoshiro256** (Blackman and
// Vigna) seeded through splitmix64, and normal variates use the Box-Muller
// transform, so a seed reproduces the same fixtures on any platform.

#include <cmath>
#include <cstdint>
#include <numbers>

#include "miura/matfun.hpp"

namespace miura {

class Xoshiro256 {
 public:
  using result_type = std::uint64_t;

  explicit Xoshiro256(std::uint64_t seed) {
    std::uint64_t sm = seed;
    for (auto& word : state_) word = splitmix64(sm);
  }

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }

  result_type operator()() {
    const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  /// Uniform double in [0, 1) from the top 53 bits.
  double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Standard normal variate (Box-Muller, both outputs used in turn).
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = 0.0;
    do u1 = uniform(); while (u1 == 0.0);
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    spare_ = radius * std::sin(2.0 * std::numbers::pi * u2);
    has_spare_ = true;
    return radius * std::cos(2.0 * std::numbers::pi * u2);
  }

  /// Circular complex normal with E|z|^2 = 1.
  cplx complex_normal() {
    const double re = normal();
    return cplx{re, normal()} * std::numbers::sqrt2 * 0.5;
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

  static std::uint64_t splitmix64(std::uint64_t& x) {
    std::uint64_t z = (x += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::uint64_t state_[4]{};
  double spare_ = 0.0;
  bool has_spare_ = false;
};

inline ComplexMatrix random_complex_normal(Xoshiro256& rng, Eigen::Index n) {
  ComplexMatrix m(n, n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < n; ++i) m(i, j) = rng.complex_normal();
  return m;
}

inline ComplexVector random_complex_vector(Xoshiro256& rng, Eigen::Index n) {
  ComplexVector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = rng.complex_normal();
  return v;
}

/// Random matrix whose spectrum lies in the disk |z - center| <= radius:
/// a complex normal matrix rescaled to spectral radius `radius`, then shifted.
inline ComplexMatrix random_with_spectrum_in_disk(Xoshiro256& rng, Eigen::Index n, cplx center,
                                                  double radius) {
  ComplexMatrix b = random_complex_normal(rng, n);
  double rho = 0.0;
  for (auto lambda : spectrum(b).eigenvalues) rho = std::max(rho, std::abs(lambda));
  if (rho > 0.0) b *= radius / rho;
  return b + center * identity(n);
}

}  // namespace miura
