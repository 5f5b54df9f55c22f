// SPDX-License-Identifier: Apache-2.0

#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "bregman/glr.hpp"
#include "bregman/montecarlo.hpp"
#include "bregman/random.hpp"

using namespace bregman;
using Catch::Matchers::WithinAbs;

TEST_CASE("kappa: pinned value and tail behaviour") {
  CHECK_THAT(kappa(100, 1.0), WithinAbs(2.10974, 1e-4));
  CHECK(kappa(1000, 1.0) <= kappa(100, 1.0));
  // partial sums lower-bound any valid upper bound on the series
  double partial = 0.0;
  for (int t = 1; t <= 1000; ++t) {
    partial += 1.0 / ((1.0 + t) * std::pow(std::log(1.0 + t), 2.0));
  }
  CHECK(kappa(100, 1.0) >= partial);
  CHECK_THROWS_AS(kappa(0, 1.0), std::invalid_argument);
}

TEST_CASE("g(t): sum of inverses stays below one") {
  GlrConfig config;
  config.eta = 1.0;
  const double k = config.resolved_kappa();
  CHECK_THAT(k, WithinAbs(kappa(100, 1.0), 1e-15));
  double sum = 0.0;
  for (std::int64_t t = 1; t <= 1000000; ++t) {
    sum += std::exp(-log_g(config, t));
  }
  CHECK(sum <= 1.0);

  // direct evaluation at t = 2 with kappa pinned to 2.10974
  GlrConfig pinned;
  pinned.kappa_value = 2.10974;
  const double g2 = std::exp(log_g(pinned, 2));
  CHECK_THAT(g2, WithinAbs(2.10974 * 3.0 * std::pow(std::log(3.0), 2.0), 1e-10));
  CHECK_THAT(g2, WithinAbs(7.639, 1e-2));
}

TEST_CASE("horizon-aware kappa makes the inflation sum exactly one") {
  const std::int64_t horizon = 100;
  GlrConfig config;
  config.horizon = horizon;
  double sum = 0.0;
  for (std::int64_t t = 1; t <= horizon; ++t) sum += std::exp(-log_g(config, t));
  CHECK_THAT(sum, WithinAbs(1.0, 1e-12));
  CHECK(config.resolved_kappa() < kappa(100, 1.0));
}

TEST_CASE("doubly uniform level widens the plain set") {
  Rng rng(31);
  const FamilyKind kind = FamilyKind::gaussian_variance(0.0);
  SuffStats window;
  for (int i = 0; i < 20; ++i) window = update_stats(kind, window, rng.normal(0.0, 1.0));
  GlrConfig config;
  const std::int64_t t = 40;
  const double delta = 0.05;
  // the inflated set contains the plain one: F_inflated <= F_plain pointwise
  for (double sigma : {0.6, 0.8, 1.0, 1.3, 1.9}) {
    const double plain = level_function(kind, window, 1.0, delta, sigma);
    const double inflated = doubly_uniform_level(kind, window, t, 1.0, delta, config, sigma);
    CHECK(inflated <= plain);
    CHECK_THAT(plain - inflated, WithinAbs(log_g(config, t), 1e-9));
  }

  // window of size 1 with a large factor: nearly everything accepted
  SuffStats tiny;
  tiny = update_stats(kind, tiny, 1.1);
  int accepted = 0;
  for (double sigma = 0.2; sigma <= 12.0; sigma += 0.2) {
    if (doubly_uniform_level(kind, tiny, 1000, 1.0, delta, config, sigma) <= 0.0) {
      ++accepted;
    }
  }
  CHECK(accepted >= 55);  // of 60 grid points
}

TEST_CASE("detector never fires at t = 1 and is prefix-measurable") {
  GlrConfig config;
  config.horizon = 100;
  GlrState state(FamilyKind::gaussian_variance(0.0), config);
  CHECK_FALSE(state.step(0.3).has_value());

  // a detection depends only on data up to the detection time
  Rng rng(1234);
  std::vector<double> xs;
  for (int t = 1; t <= 50; ++t) xs.push_back(rng.normal(0.0, 1.0));
  for (int t = 51; t <= 100; ++t) xs.push_back(rng.normal(0.0, 4.0));
  GlrState full(FamilyKind::gaussian_variance(0.0), config);
  std::optional<Detection> hit;
  std::size_t consumed = 0;
  for (double x : xs) {
    ++consumed;
    hit = full.step(x);
    if (hit.has_value()) break;
  }
  REQUIRE(hit.has_value());
  CHECK(hit->t == static_cast<std::int64_t>(consumed));
  CHECK(hit->split < hit->t);
  CHECK(hit->t > 50);

  GlrState replay(FamilyKind::gaussian_variance(0.0), config);
  std::optional<Detection> replay_hit;
  for (std::size_t i = 0; i < consumed; ++i) replay_hit = replay.step(xs[i]);
  REQUIRE(replay_hit.has_value());
  CHECK(replay_hit->t == hit->t);
  CHECK(replay_hit->split == hit->split);
}

TEST_CASE("geometric scan is conservative relative to the full scan") {
  Rng rng(9);
  for (int rep = 0; rep < 5; ++rep) {
    std::vector<double> xs;
    for (int t = 1; t <= 40; ++t) xs.push_back(rng.normal(0.0, 1.0));
    for (int t = 41; t <= 90; ++t) xs.push_back(rng.normal(0.0, 3.0));

    GlrConfig full_cfg;
    full_cfg.horizon = 90;
    GlrConfig geo_cfg = full_cfg;
    geo_cfg.scan = ScanGrid::geometric;

    auto run = [&](const GlrConfig& cfg) -> std::int64_t {
      GlrState state(FamilyKind::gaussian_variance(0.0), cfg);
      for (double x : xs) {
        if (auto hit = state.step(x)) return hit->t;
      }
      return 10000;
    };
    const std::int64_t t_full = run(full_cfg);
    const std::int64_t t_geo = run(geo_cfg);
    INFO("full " << t_full << " geometric " << t_geo);
    CHECK(t_full <= t_geo);
  }
}

TEST_CASE("false alarms are rare without a change") {
  GlrConfig config;
  config.horizon = 60;
  const auto alarms = run_replicates<int>(60, 5150, [&](int, Rng& rng) {
    GlrState state(FamilyKind::gaussian_variance(0.0), config);
    for (int t = 1; t <= 60; ++t) {
      if (state.step(rng.normal(0.0, 1.0)).has_value()) return 1;
    }
    return 0;
  });
  int total = 0;
  for (int a : alarms) total += a;
  INFO("alarms " << total << "/60");
  CHECK(total <= 3);
}

TEST_CASE("variance changes are detected, larger jumps earlier") {
  GlrConfig config;
  config.horizon = 100;
  auto median_delay = [&](double sigma1) {
    const auto times = run_replicates<std::int64_t>(40, 31337, [&](int, Rng& rng) {
      GlrState state(FamilyKind::gaussian_variance(0.0), config);
      for (int t = 1; t <= 100; ++t) {
        const double sd = t <= 50 ? 1.0 : sigma1;
        if (auto hit = state.step(rng.normal(0.0, sd))) return hit->t;
      }
      return static_cast<std::int64_t>(100);
    });
    std::vector<std::int64_t> sorted(times);
    std::sort(sorted.begin(), sorted.end());
    return sorted[sorted.size() / 2];
  };
  const auto m4 = median_delay(4.0);
  const auto m2 = median_delay(2.0);
  INFO("median detection: sigma1=4 -> " << m4 << ", sigma1=2 -> " << m2);
  CHECK(m4 > 50);
  CHECK(m4 <= m2);
}

TEST_CASE("gaussian-2d detector uses grid conjunction") {
  GlrConfig config;
  config.horizon = 40;
  config.resolution_2d = 96;
  config.box = Box2D{-3.0, 6.0, 0.1, 5.0};
  Rng rng(606);
  GlrState state(FamilyKind::gaussian_2d(), config);
  std::optional<Detection> hit;
  for (int t = 1; t <= 40 && !hit; ++t) {
    const double mu = t <= 20 ? 0.0 : 3.5;
    hit = state.step(rng.normal(mu, 1.0));
  }
  REQUIRE(hit.has_value());
  CHECK(hit->t > 20);
  CHECK(hit->split < hit->t);
}

TEST_CASE("bernoulli detector runs end to end") {
  GlrConfig config;
  config.horizon = 80;
  Rng rng(2718);
  GlrState state(FamilyKind::bernoulli(), config);
  std::optional<Detection> hit;
  for (int t = 1; t <= 80 && !hit; ++t) {
    hit = state.step(rng.bernoulli(t <= 40 ? 0.1 : 0.9));
  }
  REQUIRE(hit.has_value());
  CHECK(hit->t > 40);
}
