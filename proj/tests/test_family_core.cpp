// SPDX-License-Identifier: Apache-2.0

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <utility>

#include "bregman/families.hpp"
#include "bregman/family.hpp"
#include "bregman/random.hpp"

using namespace bregman;
using Catch::Matchers::WithinAbs;

namespace {

// Random in-domain natural parameter, kept away from domain edges.
double random_theta(Rng& rng, const FamilySpec& spec) {
  const double lo = spec.domain_lo[0];
  const double hi = spec.domain_hi[0];
  const double u = rng.uniform();
  if (std::isfinite(lo) && std::isfinite(hi)) return lo + (0.05 + 0.9 * u) * (hi - lo);
  if (std::isfinite(hi)) return hi - std::exp(rng.normal(0.0, 1.0));
  if (std::isfinite(lo)) return lo + std::exp(rng.normal(0.0, 1.0));
  return rng.normal(0.0, 1.5);
}

}  // namespace

TEST_CASE("gradient matches finite differences; inverse round-trips") {
  Rng rng(101);
  for (const FamilyKind& kind : registered_kinds()) {
    if (kind.family == Family::gaussian_2d) continue;
    const FamilySpec spec = family_spec(kind);
    for (int i = 0; i < 100; ++i) {
      const double theta = random_theta(rng, spec);
      double h = 1e-6 * std::max(1.0, std::abs(theta));
      if (std::isfinite(spec.domain_hi[0])) {
        h = std::min(h, 0.25 * (spec.domain_hi[0] - theta));
      }
      if (std::isfinite(spec.domain_lo[0])) {
        h = std::min(h, 0.25 * (theta - spec.domain_lo[0]));
      }
      const double fd = (spec.log_partition(vec1(theta + h)) -
                         spec.log_partition(vec1(theta - h))) / (2.0 * h);
      const double g = spec.grad(vec1(theta))[0];
      INFO(spec.name << " theta=" << theta);
      CHECK_THAT(g, WithinAbs(fd, 1e-5 * std::max(1.0, std::abs(g))));
      const double back = spec.grad_inverse(spec.grad(vec1(theta)))[0];
      CHECK_THAT(back, WithinAbs(theta, 1e-8 * std::max(1.0, std::abs(theta))));
    }
  }
}

TEST_CASE("gaussian_2d gradient and inverse") {
  const FamilySpec spec = family_spec(FamilyKind::gaussian_2d());
  Rng rng(11);
  for (int i = 0; i < 100; ++i) {
    const Vec2 theta{rng.normal(0.0, 1.0), -std::exp(rng.normal(0.0, 0.7))};
    const Vec2 m = spec.grad(theta);
    const Vec2 back = spec.grad_inverse(m);
    CHECK_THAT(back[0], WithinAbs(theta[0], 1e-8 * std::max(1.0, std::abs(theta[0]))));
    CHECK_THAT(back[1], WithinAbs(theta[1], 1e-8 * std::max(1.0, std::abs(theta[1]))));
    for (int axis = 0; axis < 2; ++axis) {
      Vec2 tp = theta, tm = theta;
      const double h = 1e-6 * std::max(1.0, std::abs(theta[axis]));
      tp[axis] += h;
      tm[axis] -= h;
      const double fd = (spec.log_partition(tp) - spec.log_partition(tm)) / (2.0 * h);
      CHECK_THAT(m[axis], WithinAbs(fd, 1e-5 * std::max(1.0, std::abs(m[axis]))));
    }
  }
}

TEST_CASE("bregman divergence examples") {
  const FamilySpec gauss = family_spec(FamilyKind::gaussian_mean(1.0));
  CHECK_THAT(bregman_divergence(gauss, 1.0, 0.0), WithinAbs(0.5, 1e-12));
  CHECK_THAT(bregman_divergence(gauss, 0.7, 0.7), WithinAbs(0.0, 1e-14));

  const FamilySpec bern = family_spec(FamilyKind::bernoulli());
  const double kl = bregman_divergence(bern, natural_of(FamilyKind::bernoulli(), 0.25),
                                       natural_of(FamilyKind::bernoulli(), 0.5));
  // kl(0.5, 0.25) = 0.5 log 2 + 0.5 log(0.5/0.75)
  CHECK_THAT(kl, WithinAbs(0.14384103622589046, 1e-10));
}

TEST_CASE("bregman divergence nonnegative, zero iff equal") {
  Rng rng(57);
  for (const FamilyKind& kind : registered_kinds()) {
    if (kind.family == Family::gaussian_2d) continue;
    const FamilySpec spec = family_spec(kind);
    for (int i = 0; i < 100; ++i) {
      const double a = random_theta(rng, spec);
      const double b = random_theta(rng, spec);
      const double d = bregman_divergence(spec, a, b);
      INFO(spec.name << " a=" << a << " b=" << b);
      CHECK(d >= 0.0);
      if (std::abs(a - b) > 1e-4 * std::max(1.0, std::abs(a))) CHECK(d > 1e-10);
      CHECK_THAT(bregman_divergence(spec, a, a), WithinAbs(0.0, 1e-10));
    }
  }
}

TEST_CASE("log_mgf examples") {
  const FamilySpec bern = family_spec(FamilyKind::bernoulli());
  const double mu = 0.3, lambda = 0.7;
  const double theta = std::log(mu / (1.0 - mu));
  CHECK_THAT(log_mgf(bern, theta, 0.0), WithinAbs(0.0, 1e-15));
  // exact two-point expectation
  const double direct =
      std::log(mu * std::exp(lambda * (1.0 - mu)) + (1.0 - mu) * std::exp(-lambda * mu));
  CHECK_THAT(log_mgf(bern, theta, lambda), WithinAbs(direct, 1e-12));

  const FamilySpec gauss2 = family_spec(FamilyKind::gaussian_mean(2.0));
  CHECK_THAT(log_mgf(gauss2, 0.4, 0.25), WithinAbs(0.125, 1e-12));

  const FamilySpec expf = family_spec(FamilyKind::exponential());
  CHECK_THROWS_AS(log_mgf(expf, -1.0, 2.0), std::domain_error);
}

TEST_CASE("regularized estimate") {
  const FamilySpec gauss = family_spec(FamilyKind::gaussian_mean(1.0));
  // n = 0 returns theta0 exactly
  const auto prior = regularized_estimate(gauss, vec1(123.0), 0, 1.0, vec1(0.25));
  CHECK(prior.theta[0] == 0.25);
  // Gaussian: (S + c mu0)/(n + c)
  const auto post = regularized_estimate(gauss, vec1(2.0), 3, 1.0, vec1(0.0));
  CHECK_THAT(post.theta[0], WithinAbs(1.5, 1e-12));

  // Chi-square: digamma round-trip of the defining equation
  const FamilyKind chi = FamilyKind::chi_square(Chi2Mixture::continuous);
  const FamilySpec spec = family_spec(chi);
  SuffStats stats;
  stats = update_stats(chi, stats, 3.0);
  stats = update_stats(chi, stats, 7.5);
  const double theta0 = natural_of(chi, 5.0);
  const auto est = regularized_estimate(spec, vec1(mean_statistic(chi, stats)), stats.n,
                                        1.0, vec1(theta0));
  const double k_est = 2.0 * (est.theta[0] + 1.0);
  const double target = (stats.kk + 1.0 * digamma(2.5)) / (2.0 + 1.0);
  CHECK_THAT(digamma(0.5 * k_est), WithinAbs(target, 1e-9));
}

TEST_CASE("dual gap agreement (Lemma duality, executable form)") {
  Rng rng(4242);
  const auto kinds = registered_kinds();
  int checked = 0;
  while (checked < 100) {
    const FamilyKind& kind = kinds[static_cast<std::size_t>(
        std::floor(rng.uniform() * static_cast<double>(kinds.size())))];
    if (kind.family == Family::gaussian_2d) continue;
    const FamilySpec spec = family_spec(kind);
    const double theta = random_theta(rng, spec);
    const double theta_prime = random_theta(rng, spec);
    const double alpha = rng.uniform();
    const auto [dual, primal] = dual_gap(spec, theta, theta_prime, alpha);
    INFO(spec.name << " theta=" << theta << " theta'=" << theta_prime
                   << " alpha=" << alpha);
    CHECK_THAT(dual, WithinAbs(primal, 1e-6 * std::max(1.0, std::abs(primal))));
    ++checked;
  }
}

TEST_CASE("dual gap endpoint cases") {
  const FamilySpec gauss = family_spec(FamilyKind::gaussian_mean(1.0));
  const auto zero = dual_gap(gauss, 2.0, 0.0, 0.0);
  CHECK_THAT(zero.first, WithinAbs(0.0, 1e-10));
  CHECK_THAT(zero.second, WithinAbs(0.0, 1e-10));
  const auto full = dual_gap(gauss, 2.0, 0.0, 1.0);
  CHECK_THAT(full.first, WithinAbs(2.0, 1e-8));
  CHECK_THAT(full.second, WithinAbs(2.0, 1e-12));

  const FamilySpec bern = family_spec(FamilyKind::bernoulli());
  const auto mid = dual_gap(bern, natural_of(FamilyKind::bernoulli(), 0.8),
                            natural_of(FamilyKind::bernoulli(), 0.3), 0.5);
  CHECK_THAT(mid.first, WithinAbs(mid.second, 1e-6));
}

TEST_CASE("dual gap for the 2-D Gaussian family") {
  const FamilySpec spec = family_spec(FamilyKind::gaussian_2d());
  Rng rng(99);
  for (int i = 0; i < 20; ++i) {
    const Vec2 theta{rng.normal(0.5, 0.8), -std::exp(rng.normal(0.0, 0.5))};
    const Vec2 theta_prime{rng.normal(0.5, 0.8), -std::exp(rng.normal(0.0, 0.5))};
    const double alpha = rng.uniform();
    const auto [dual, primal] = dual_gap(spec, theta, theta_prime, alpha);
    CHECK_THAT(dual, WithinAbs(primal, 1e-5 * std::max(1.0, std::abs(primal))));
  }
}

TEST_CASE("numeric information gain: zero at n = 0") {
  Rng rng(3);
  for (const FamilyKind& kind : registered_kinds()) {
    if (kind.family == Family::gaussian_2d) continue;
    const FamilySpec spec = family_spec(kind);
    const double theta0 = random_theta(rng, spec);
    const double gain = information_gain_numeric(spec, 0.0, 0, 1.0, theta0);
    INFO(spec.name);
    CHECK_THAT(gain, WithinAbs(0.0, 1e-9));
  }
}

TEST_CASE("numeric information gain: Gaussian closed form") {
  const FamilySpec gauss = family_spec(FamilyKind::gaussian_mean(1.0));
  const double gain = information_gain_numeric(gauss, 2.0, 3, 1.0, 0.0);
  CHECK_THAT(gain, WithinAbs(std::log(2.0), 1e-10));
}

TEST_CASE("numeric information gain: Exponential closed form") {
  const FamilyKind kind = FamilyKind::exponential();
  const FamilySpec spec = family_spec(kind);
  SuffStats stats;
  stats.n = 5;
  stats.s = 5.0;
  const double closed = information_gain_closed(kind, stats, 1.0, 1.0);
  CHECK_THAT(closed, WithinAbs(0.9630650725862840, 1e-10));
  const double numeric = information_gain_numeric(spec, mean_statistic(kind, stats), 5,
                                                  1.0, natural_of(kind, 1.0));
  CHECK_THAT(numeric, WithinAbs(closed, 1e-3));
}

TEST_CASE("numeric information gain reports boundary mass") {
  const FamilySpec spec = family_spec(FamilyKind::exponential());
  QuadratureDiag ok_diag;
  information_gain_numeric(spec, 1.2, 8, 1.0, -1.0, LogGrid{}, 30.0, &ok_diag);
  CHECK_FALSE(ok_diag.boundary_mass_warning);

  // a grid truncated at one standard deviation leaves visible edge mass
  QuadratureDiag tight_diag;
  information_gain_numeric(spec, 1.2, 8, 1.0, -1.0, LogGrid{}, 1.0, &tight_diag);
  CHECK(tight_diag.boundary_mass_warning);
}

TEST_CASE("numeric information gain tracks (d/2) log(1 + n)") {
  // With c = 1 and data held at the family mean, the gap to
  // (1/2) log(1 + n) stays bounded across n.
  struct Case {
    FamilyKind kind;
    double mean_user;
  };
  const Case cases[] = {
      {FamilyKind::gaussian_mean(1.0), 0.0},
      {FamilyKind::gaussian_variance(0.0), 1.0},
      {FamilyKind::exponential(), 1.0},
      {FamilyKind::gamma_fixed_shape(3.0), 0.8},
      {FamilyKind::weibull_fixed_shape(2.0), 1.2},
      {FamilyKind::pareto(), 0.5},
      {FamilyKind::bernoulli(), 0.4},
      {FamilyKind::poisson(), 3.0},
      {FamilyKind::chi_square(Chi2Mixture::continuous), 5.0},
      {FamilyKind::chi_square(Chi2Mixture::discrete), 5.0},
  };
  for (const auto& c : cases) {
    const FamilySpec spec = family_spec(c.kind);
    const double theta0 = natural_of(c.kind, c.mean_user);
    const double mean_stat = spec.grad(vec1(theta0))[0];
    for (std::int64_t n : {10, 50, 200, 1000}) {
      const double gain = information_gain_numeric(spec, mean_stat, n, 1.0, theta0);
      const double ref = 0.5 * std::log(1.0 + static_cast<double>(n));
      INFO(spec.name << " n=" << n << " gain=" << gain << " ref=" << ref);
      CHECK(std::abs(gain - ref) <= 2.0);
    }
  }
}
