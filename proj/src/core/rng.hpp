// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace vf {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Standard-normal sampler with a pinned algorithm (Box-Muller over mt19937_64)
/// so seeded outputs are reproducible independent of the standard library.
class GaussianSampler {
public:
  explicit GaussianSampler(std::uint64_t seed) : gen_(seed) {}

  double next() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u1 = uniform_open();
    const double u2 = uniform_open();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(angle);
    have_spare_ = true;
    return r * std::cos(angle);
  }

  /// Uniform draw in (0, 1].
  double uniform_open() {
    return (static_cast<double>(gen_() >> 11) + 1.0) * 0x1.0p-53;
  }

private:
  std::mt19937_64 gen_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

/// Low-discrepancy Halton point set; dimension d uses the d-th prime base.
class HaltonSequence {
public:
  explicit HaltonSequence(std::size_t dimensions, std::uint64_t index_offset = 0)
      : dimensions_(dimensions), next_index_(index_offset + 1) {}

  /// Radical-inverse coordinates of the next point, each in (0, 1).
  std::vector<double> next() {
    std::vector<double> u(dimensions_);
    for (std::size_t d = 0; d < dimensions_; ++d) {
      u[d] = radical_inverse(next_index_, prime(d));
    }
    ++next_index_;
    return u;
  }

  static double radical_inverse(std::uint64_t index, std::uint64_t base) {
    double value = 0.0;
    double inv = 1.0 / static_cast<double>(base);
    double scale = inv;
    while (index > 0) {
      value += static_cast<double>(index % base) * scale;
      index /= base;
      scale *= inv;
    }
    return value;
  }

  static std::uint64_t prime(std::size_t i);

private:
  std::size_t dimensions_;
  std::uint64_t next_index_;
};

inline std::uint64_t HaltonSequence::prime(std::size_t i) {
  static constexpr std::uint64_t primes[] = {
      2,   3,   5,   7,   11,  13,  17,  19,  23,  29,  31,  37,  41,  43,  47,  53,
      59,  61,  67,  71,  73,  79,  83,  89,  97,  101, 103, 107, 109, 113, 127, 131,
      137, 139, 149, 151, 157, 163, 167, 173, 179, 181, 191, 193, 197, 199, 211, 223};
  constexpr std::size_t count = sizeof(primes) / sizeof(primes[0]);
  return primes[i < count ? i : count - 1];
}

}  // namespace vf
