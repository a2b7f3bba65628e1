// SPDX-License-Identifier: MIT
#pragma once

#include <cmath>
#include <cstdint>

#include "nv0/constants.hpp"

// Counter-based pseudorandom generator.
//
// Every stochastic output in this library must be bit-reproducible given
// (seed, shot_index), on any platform and standard library. std::mt19937 is
// portable but the std:: distributions on top of it are not (the standard
// leaves their algorithms unspecified), so both the generator and the
// distributions live here, frozen.
//
// Scheme: a per-stream 64-bit key derived from (seed, stream) by the
// SplitMix64 finalizer; draw k is finalize(key + (k+1) * golden_gamma).
// Streams are independent for distinct (seed, stream) pairs and support
// out-of-order evaluation, which keeps per-shot noise realizations
// order-independent under concurrent shot loops.

namespace nv0 {

namespace rng_detail {

inline constexpr std::uint64_t golden_gamma = 0x9E3779B97F4A7C15ull;

inline constexpr std::uint64_t mix64(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xBF58476D1CE4E5B9ull;
  z ^= z >> 27;
  z *= 0x94D049BB133111EBull;
  z ^= z >> 31;
  return z;
}

} // namespace rng_detail

class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream)
      : key_(rng_detail::mix64(rng_detail::mix64(seed + rng_detail::golden_gamma) ^
                               rng_detail::mix64(stream * 0xD1B54A32D192ED03ull +
                                                 0x2545F4914F6CDD1Dull))) {}

  std::uint64_t next_u64() {
    counter_ += 1;
    return rng_detail::mix64(key_ + counter_ * rng_detail::golden_gamma);
  }

  // Uniform on [0, 1) with 53-bit mantissa resolution.
  double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Standard normal via the trigonometric Box-Muller transform; the second
  // member of each pair is cached.
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u1 = 1.0 - uniform();  // (0, 1], keeps the log finite
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = two_pi * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

  // Poisson deviate: Knuth's product method below mean 30 (exp(-30) is still
  // comfortably inside double range), Hormann's PTRS transformed rejection
  // above it.
  std::uint64_t poisson(double mean) {
    if (!(mean > 0)) {
      return 0;
    }
    if (mean < 30.0) {
      const double limit = std::exp(-mean);
      std::uint64_t k = 0;
      double p = 1.0;
      do {
        k += 1;
        p *= uniform();
      } while (p > limit);
      return k - 1;
    }
    return poisson_ptrs(mean);
  }

 private:
  std::uint64_t poisson_ptrs(double mu) {
    const double b = 0.931 + 2.53 * std::sqrt(mu);
    const double a = -0.059 + 0.02483 * b;
    const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
    const double v_r = 0.9277 - 3.6224 / (b - 2.0);
    const double log_mu = std::log(mu);
    for (;;) {
      double u = uniform() - 0.5;
      double v = uniform();
      const double us = 0.5 - std::abs(u);
      const double k = std::floor((2.0 * a / us + b) * u + mu + 0.43);
      if (us >= 0.07 && v <= v_r) {
        return static_cast<std::uint64_t>(k);
      }
      if (k < 0.0 || (us < 0.013 && v > us)) {
        continue;
      }
      const double log_accept = std::log(v * inv_alpha / (a / (us * us) + b));
      if (log_accept <= k * log_mu - mu - std::lgamma(k + 1.0)) {
        return static_cast<std::uint64_t>(k);
      }
    }
  }

  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

} // namespace nv0
