// SPDX-License-Identifier: Apache-2.0
//
// Change-point detection: doubly time-uniform confidence sets, the g(t)
// inflation factor with its kappa constant, and the regularized GLR test
// that flags the first time a prefix set and a scan-window set become
// disjoint.

#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "bregman/confseq.hpp"

namespace bregman {

// Upper bound on sum_{t>=1} 1/((1+t) log^{1+eta}(1+t)): the partial sum to
// p plus a sum-integral comparison tail. Each tail term is bounded by its
// centered integral (1/f is convex there), so the tail integral starts at
// p + 1/2 and evaluates to 1/(eta log^eta(p + 3/2)); at p = 100, eta = 1
// this reproduces 2.10974.
inline double kappa(std::int64_t p, double eta) {
  if (p < 1 || !(eta > 0.0)) throw std::invalid_argument("kappa: requires p >= 1, eta > 0");
  double sum = 0.0;
  for (std::int64_t t = 1; t <= p; ++t) {
    const double u = 1.0 + static_cast<double>(t);
    sum += 1.0 / (u * std::pow(std::log(u), 1.0 + eta));
  }
  return sum + 1.0 / (eta * std::pow(std::log(1.5 + static_cast<double>(p)), eta));
}

// Horizon-aware constant: with kappa = sum_{t<=T} 1/((1+t) log^{1+eta}(1+t)),
// the inflations 1/g(t) sum to exactly 1 over t <= T.
inline double kappa_horizon(std::int64_t horizon, double eta) {
  if (horizon < 1 || !(eta > 0.0)) {
    throw std::invalid_argument("kappa_horizon: requires horizon >= 1, eta > 0");
  }
  double sum = 0.0;
  for (std::int64_t t = 1; t <= horizon; ++t) {
    const double u = 1.0 + static_cast<double>(t);
    sum += 1.0 / (u * std::pow(std::log(u), 1.0 + eta));
  }
  return sum;
}

enum class ScanGrid { full, geometric };

struct GlrConfig {
  double delta = 0.05;
  double c = 1.0;
  double eta = 1.0;
  double kappa_value = 0.0;  // 0 means: derive from horizon or kappa(100, eta)
  std::optional<std::int64_t> horizon;
  ScanGrid scan = ScanGrid::full;
  double geometric_ratio = 1.1;
  double delta_split = 0.5;  // share of delta spent on the prefix set
  // gaussian_2d only: grid used for the set-intersection test
  Box2D box;
  int resolution_2d = 128;

  double resolved_kappa() const {
    if (kappa_value > 0.0) return kappa_value;
    if (horizon.has_value()) return kappa_horizon(*horizon, eta);
    return kappa(100, eta);
  }
};

// g(t) = kappa (1+t) log^{1+eta}(1+t)
inline double log_g(const GlrConfig& config, std::int64_t t) {
  if (t < 1) throw std::invalid_argument("log_g: requires t >= 1");
  const double u = 1.0 + static_cast<double>(t);
  return std::log(config.resolved_kappa()) + std::log(u) +
         (1.0 + config.eta) * std::log(std::log(u));
}

// Level function of the doubly time-uniform set on a window (s, t]: the
// per-family level function with confidence budget delta / g(t).
inline double doubly_uniform_level(const FamilyKind& kind, const SuffStats& window_stats,
                                   std::int64_t t, double c, double delta,
                                   const GlrConfig& config, double theta0) {
  const double delta_eff = delta / std::exp(log_g(config, t));
  return level_function(kind, window_stats, c, delta_eff, theta0);
}

struct Detection {
  std::int64_t t = 0;
  std::int64_t split = 0;
};

// Streaming regularized GLR detector. Observations arrive one at a time;
// step() returns the detection (t, s) as soon as the prefix set over
// (0, s] and the window set over (s, t] are disjoint for some s < t.
class GlrState {
 public:
  GlrState(FamilyKind kind, GlrConfig config)
      : kind_(kind), config_(config) {
    prefix_.push_back(SuffStats{});
    if (kind.family == Family::gaussian_2d) {
      prefix_sets_2d_.emplace_back();  // placeholder for s = 0
    } else {
      prefix_intervals_.push_back(Interval{});
    }
  }

  std::int64_t time() const { return t_; }
  const SuffStats& prefix_stats(std::int64_t s) const {
    return prefix_[static_cast<std::size_t>(s)];
  }
  SuffStats window_stats(std::int64_t s, std::int64_t t) const {
    return prefix_[static_cast<std::size_t>(t)] - prefix_[static_cast<std::size_t>(s)];
  }

  std::optional<Detection> step(double x) {
    t_ += 1;
    prefix_.push_back(update_stats(kind_, prefix_.back(), x));
    const double delta_prefix = config_.delta * config_.delta_split;
    const double delta_window = config_.delta * (1.0 - config_.delta_split);
    if (kind_.family == Family::gaussian_2d) {
      prefix_sets_2d_.push_back(confset_2d(kind_, prefix_.back(), config_.c, delta_prefix,
                                           config_.box, config_.resolution_2d,
                                           config_.resolution_2d));
    } else {
      prefix_intervals_.push_back(
          boundary_1d(kind_, prefix_.back(), config_.c, delta_prefix));
    }
    if (t_ < 2) return std::nullopt;
    const double delta_eff = delta_window / std::exp(log_g(config_, t_));
    for (std::int64_t s : scan_candidates()) {
      const SuffStats window = window_stats(s, t_);
      if (kind_.family == Family::gaussian_2d) {
        const ConfSet2D window_set = confset_2d(kind_, window, config_.c, delta_eff,
                                                config_.box, config_.resolution_2d,
                                                config_.resolution_2d);
        if (grids_disjoint(prefix_sets_2d_[static_cast<std::size_t>(s)], window_set)) {
          return Detection{t_, s};
        }
      } else {
        const Interval window_iv = boundary_1d(kind_, window, config_.c, delta_eff);
        if (prefix_intervals_[static_cast<std::size_t>(s)].disjoint(window_iv)) {
          return Detection{t_, s};
        }
      }
    }
    return std::nullopt;
  }

 private:
  std::vector<std::int64_t> scan_candidates() const {
    std::vector<std::int64_t> out;
    if (config_.scan == ScanGrid::full) {
      out.reserve(static_cast<std::size_t>(t_ - 1));
      for (std::int64_t s = 1; s < t_; ++s) out.push_back(s);
      return out;
    }
    // Geometric window lengths w = ceil(ratio^j), scanned as s = t - w.
    double w = 1.0;
    std::int64_t prev = 0;
    while (true) {
      const std::int64_t len = static_cast<std::int64_t>(std::ceil(w));
      if (len >= t_) break;
      if (len != prev) out.push_back(t_ - len);
      prev = len;
      w *= config_.geometric_ratio;
    }
    std::sort(out.begin(), out.end());
    return out;
  }

  static bool grids_disjoint(const ConfSet2D& a, const ConfSet2D& b) {
    for (std::size_t i = 0; i < a.member.size(); ++i) {
      if (a.member[i] != 0 && b.member[i] != 0) return false;
    }
    return true;
  }

  FamilyKind kind_;
  GlrConfig config_;
  std::int64_t t_ = 0;
  std::vector<SuffStats> prefix_;
  std::vector<Interval> prefix_intervals_;
  std::vector<ConfSet2D> prefix_sets_2d_;
};

inline std::optional<Detection> detect_step(GlrState& state, double x) {
  return state.step(x);
}

}  // namespace bregman
