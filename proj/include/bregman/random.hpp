// SPDX-License-Identifier: Apache-2.0
//
// Deterministic sampling. All distributions are generated from explicit
// algorithms on top of mt19937_64 uniforms, so a (seed, replicate) pair
// reproduces the same stream on any platform and under any scheduling.

#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>

#include "bregman/families.hpp"

namespace bregman {

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace detail

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(detail::splitmix64(seed)) {}

  // Counter-based replicate splitting: replicate r of a master seed is
  // reproducible in isolation.
  static Rng for_replicate(std::uint64_t master_seed, std::uint64_t replicate) {
    return Rng(detail::splitmix64(master_seed) ^
               detail::splitmix64(0x5851f42d4c957f2dULL + replicate));
  }

  // Uniform on (0, 1), both endpoints excluded.
  double uniform() {
    for (;;) {
      const double u = (eng_() >> 11) * 0x1.0p-53;
      if (u > 0.0 && u < 1.0) return u;
    }
  }

  double normal(double mean = 0.0, double sd = 1.0) {
    // Box-Muller; the second coordinate is discarded to keep the stream
    // position independent of call history.
    const double u1 = uniform();
    const double u2 = uniform();
    return mean + sd * std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
  }

  double exponential(double mean) { return -mean * std::log(uniform()); }

  double bernoulli(double p) { return uniform() < p ? 1.0 : 0.0; }

  double pareto(double alpha) { return std::pow(uniform(), -1.0 / alpha); }

  double weibull(double lambda, double k) {
    return lambda * std::pow(-std::log(uniform()), 1.0 / k);
  }

  double gamma(double shape, double scale) {
    if (shape < 1.0) {
      const double u = uniform();
      return gamma(shape + 1.0, scale) * std::pow(u, 1.0 / shape);
    }
    // Marsaglia-Tsang squeeze
    const double d = shape - 1.0 / 3.0;
    const double cc = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
      double x = normal();
      double v = 1.0 + cc * x;
      if (v <= 0.0) continue;
      v = v * v * v;
      const double u = uniform();
      if (u < 1.0 - 0.0331 * x * x * x * x) return scale * d * v;
      if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return scale * d * v;
    }
  }

  double chi_square(double k) { return gamma(0.5 * k, 2.0); }

  double poisson(double lambda) {
    if (lambda <= 0.0) throw std::invalid_argument("poisson: lambda must be positive");
    if (lambda > 60.0) return poisson(0.5 * lambda) + poisson(lambda - 0.5 * lambda);
    // inversion by sequential search
    double p = std::exp(-lambda);
    double cdf = p;
    const double u = uniform();
    double k = 0.0;
    while (u > cdf && k < 10000.0) {
      k += 1.0;
      p *= lambda / k;
      cdf += p;
    }
    return k;
  }

 private:
  std::mt19937_64 eng_;
};

// True-parameter bundle for simulation: p1 is the tracked parameter, p2 an
// auxiliary one (gaussian_2d sigma; ignored elsewhere).
struct TrueParams {
  double p1 = 0.0;
  double p2 = 1.0;
};

inline double sample_observation(Rng& rng, const FamilyKind& kind, const TrueParams& p) {
  switch (kind.family) {
    case Family::gaussian_mean: return rng.normal(p.p1, kind.sigma);
    case Family::gaussian_variance: return rng.normal(kind.mu, p.p1);
    case Family::gaussian_2d: return rng.normal(p.p1, p.p2);
    case Family::bernoulli: return rng.bernoulli(p.p1);
    case Family::exponential: return rng.exponential(p.p1);
    case Family::gamma_fixed_shape: return rng.gamma(kind.shape, p.p1);
    case Family::weibull_fixed_shape: return rng.weibull(p.p1, kind.shape);
    case Family::pareto: return rng.pareto(p.p1);
    case Family::poisson: return rng.poisson(p.p1);
    case Family::chi_square: return rng.chi_square(p.p1);
  }
  throw std::logic_error("sample_observation: unreachable");
}

}  // namespace bregman
