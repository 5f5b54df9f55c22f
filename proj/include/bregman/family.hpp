// SPDX-License-Identifier: Apache-2.0
//
// Exponential-family abstraction: log-partition, gradient maps, Bregman
// divergence, the regularized estimate, and a quadrature-based information
// gain that serves as the oracle for every closed form in families.hpp.

#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "bregman/specfun.hpp"

namespace bregman {

inline constexpr double inf = std::numeric_limits<double>::infinity();

// Natural or mean parameter; coords beyond dim are ignored.
using Vec2 = std::array<double, 2>;

inline Vec2 vec1(double x) { return {x, 0.0}; }

// An exponential family through its log-partition function. The feature
// map and base function live with the sufficient statistics in
// families.hpp; everything here depends on data only through mean
// statistics (1/n) sum F(X_t).
struct FamilySpec {
  int dim = 1;
  std::string name;
  std::function<double(const Vec2&)> log_partition;
  std::function<Vec2(const Vec2&)> grad;
  std::function<Vec2(const Vec2&)> grad_inverse;
  std::function<bool(const Vec2&)> in_domain;
  // Open box containing the natural-parameter domain, used by quadrature.
  Vec2 domain_lo{-inf, -inf};
  Vec2 domain_hi{inf, inf};
  // Counting-measure mixture (discrete Chi-square): atom(i) is the natural
  // parameter of the i-th atom, i = 1, 2, ...
  bool discrete_mixture = false;
  std::function<Vec2(int)> atom;
};

struct RegularizedEstimate {
  Vec2 theta{0.0, 0.0};
  std::int64_t n = 0;
  double c = 1.0;
};

// Diagnostics filled by the numeric information gain.
struct QuadratureDiag {
  bool boundary_mass_warning = false;
  double boundary_mass_log_ratio = -inf;
};

namespace detail {

inline void check_domain(const FamilySpec& family, const Vec2& theta,
                         const char* where) {
  if (!family.in_domain(theta)) {
    std::ostringstream msg;
    msg << where << ": parameter (" << theta[0] << ", " << theta[1]
        << ") outside the natural domain of " << family.name;
    throw std::domain_error(msg.str());
  }
}

inline double dot(const FamilySpec& family, const Vec2& a, const Vec2& b) {
  double out = a[0] * b[0];
  if (family.dim == 2) out += a[1] * b[1];
  return out;
}

}  // namespace detail

// B_L(theta', theta) = L(theta') - L(theta) - <theta' - theta, grad L(theta)>.
inline double bregman_divergence(const FamilySpec& family, const Vec2& theta_prime,
                                 const Vec2& theta) {
  detail::check_domain(family, theta_prime, "bregman_divergence");
  detail::check_domain(family, theta, "bregman_divergence");
  const Vec2 g = family.grad(theta);
  const Vec2 diff{theta_prime[0] - theta[0], theta_prime[1] - theta[1]};
  double value = family.log_partition(theta_prime) - family.log_partition(theta)
      - detail::dot(family, diff, g);
  if (value < 0.0 && value > -1e-10) value = 0.0;
  return value;
}

inline double bregman_divergence(const FamilySpec& family, double theta_prime,
                                 double theta) {
  return bregman_divergence(family, vec1(theta_prime), vec1(theta));
}

// log E_theta[exp(<lambda, F(X) - E_theta F(X)>)] = B_{L,theta}(lambda).
inline double log_mgf(const FamilySpec& family, const Vec2& theta, const Vec2& lambda) {
  detail::check_domain(family, theta, "log_mgf");
  const Vec2 shifted{theta[0] + lambda[0], theta[1] + lambda[1]};
  detail::check_domain(family, shifted, "log_mgf (theta + lambda)");
  const Vec2 g = family.grad(theta);
  return family.log_partition(shifted) - family.log_partition(theta)
      - detail::dot(family, lambda, g);
}

inline double log_mgf(const FamilySpec& family, double theta, double lambda) {
  return log_mgf(family, vec1(theta), vec1(lambda));
}

// theta_{n,c}(theta0): grad(result) = (n mean_stat + c grad(theta0)) / (n+c).
inline RegularizedEstimate regularized_estimate(const FamilySpec& family,
                                                const Vec2& mean_stat,
                                                std::int64_t n, double c,
                                                const Vec2& theta0) {
  if (n < 0 || !(c > 0.0)) {
    throw std::invalid_argument("regularized_estimate: requires n >= 0 and c > 0");
  }
  detail::check_domain(family, theta0, "regularized_estimate");
  if (n == 0) return RegularizedEstimate{theta0, 0, c};
  const Vec2 g0 = family.grad(theta0);
  const double w = static_cast<double>(n) + c;
  const Vec2 blended{(static_cast<double>(n) * mean_stat[0] + c * g0[0]) / w,
                     (static_cast<double>(n) * mean_stat[1] + c * g0[1]) / w};
  const Vec2 theta = family.grad_inverse(blended);
  if (!family.in_domain(theta)) {
    std::ostringstream msg;
    msg << "regularized_estimate: gradient inversion left the domain of "
        << family.name << " (blended mean " << blended[0] << ", " << blended[1]
        << ")";
    throw std::runtime_error(msg.str());
  }
  return RegularizedEstimate{theta, n, c};
}

namespace detail {

// Hessian of the log-partition by central differences of the gradient;
// only used to size quadrature boxes, so modest accuracy suffices.
inline double curvature_1d(const FamilySpec& family, double theta) {
  double h = 1e-5 * std::max(1.0, std::abs(theta));
  const double lo = family.domain_lo[0];
  const double hi = family.domain_hi[0];
  if (std::isfinite(lo)) h = std::min(h, 0.25 * (theta - lo));
  if (std::isfinite(hi)) h = std::min(h, 0.25 * (hi - theta));
  const Vec2 gp = family.grad(vec1(theta + h));
  const Vec2 gm = family.grad(vec1(theta - h));
  return (gp[0] - gm[0]) / (2.0 * h);
}

inline std::array<double, 3> hessian_2d(const FamilySpec& family, const Vec2& theta) {
  std::array<double, 3> h_out{};  // [L_00, L_01, L_11]
  for (int axis = 0; axis < 2; ++axis) {
    double h = 1e-5 * std::max(1.0, std::abs(theta[axis]));
    const double lo = family.domain_lo[axis];
    const double hi = family.domain_hi[axis];
    if (std::isfinite(lo)) h = std::min(h, 0.25 * (theta[axis] - lo));
    if (std::isfinite(hi)) h = std::min(h, 0.25 * (hi - theta[axis]));
    Vec2 tp = theta, tm = theta;
    tp[axis] += h;
    tm[axis] -= h;
    const Vec2 gp = family.grad(tp);
    const Vec2 gm = family.grad(tm);
    if (axis == 0) {
      h_out[0] = (gp[0] - gm[0]) / (2.0 * h);
      h_out[1] = (gp[1] - gm[1]) / (2.0 * h);
    } else {
      h_out[2] = (gp[1] - gm[1]) / (2.0 * h);
    }
  }
  return h_out;
}

// log of int exp(-weight * B_L(theta', center)) dtheta' over the 1-D
// domain, on a uniform grid centered at the integrand mode. The grid is
// symmetric whenever the domain allows, so the right-rectangle rule
// inherits trapezoidal superconvergence for smooth decayed integrands.
inline double log_mixture_integral_1d(const FamilySpec& family, double weight,
                                      double center, int steps, double spread,
                                      QuadratureDiag* diag) {
  const double curv = std::max(curvature_1d(family, center), 1e-300);
  const double sd = 1.0 / std::sqrt(weight * curv);
  double a = center - spread * sd;
  double b = center + spread * sd;
  const double edge = 1e-9 * sd;
  if (std::isfinite(family.domain_lo[0])) a = std::max(a, family.domain_lo[0] + edge);
  if (std::isfinite(family.domain_hi[0])) b = std::min(b, family.domain_hi[0] - edge);
  const double delta = (b - a) / static_cast<double>(steps);
  const double log_delta = std::log(delta);
  std::vector<double> terms(static_cast<std::size_t>(steps));
  const Vec2 vcenter = vec1(center);
  for (int k = 1; k <= steps; ++k) {
    const double x = a + delta * static_cast<double>(k);
    terms[static_cast<std::size_t>(k - 1)] =
        -weight * bregman_divergence(family, vec1(x), vcenter) + log_delta;
  }
  const double total = log_sum_exp(terms);
  if (diag != nullptr) {
    const double edge_mass = std::max(terms.front(), terms.back());
    diag->boundary_mass_log_ratio =
        std::max(diag->boundary_mass_log_ratio, edge_mass - total);
    if (edge_mass - total > std::log(1e-8)) diag->boundary_mass_warning = true;
  }
  return total;
}

// Counting-measure analogue: log sum over atoms 1..count.
inline double log_mixture_sum(const FamilySpec& family, double weight,
                              const Vec2& center, int count) {
  std::vector<double> terms(static_cast<std::size_t>(count));
  for (int i = 1; i <= count; ++i) {
    terms[static_cast<std::size_t>(i - 1)] =
        -weight * bregman_divergence(family, family.atom(i), center);
  }
  return log_sum_exp(terms);
}

}  // namespace detail

// Bregman information gain, evaluated numerically from its definition:
// log of the ratio of the prior mixture integral at theta0 to the
// posterior mixture integral at theta_{n,c}(theta0). Serves as the oracle
// for every closed-form gain.
inline double information_gain_numeric(const FamilySpec& family, const Vec2& mean_stat,
                                       std::int64_t n, double c, const Vec2& theta0,
                                       const LogGrid& grid, double spread = 30.0,
                                       QuadratureDiag* diag = nullptr) {
  if (family.dim != 1) {
    throw std::invalid_argument(
        "information_gain_numeric: 1-D families only; use the _2d variant");
  }
  validate(grid);
  const RegularizedEstimate post = regularized_estimate(family, mean_stat, n, c, theta0);
  const double w_post = static_cast<double>(n) + c;
  if (family.discrete_mixture) {
    const int count = grid.steps;
    const double log_prior = detail::log_mixture_sum(family, c, theta0, count);
    const double log_post = detail::log_mixture_sum(family, w_post, post.theta, count);
    return log_prior - log_post;
  }
  const double log_prior = detail::log_mixture_integral_1d(
      family, c, theta0[0], grid.steps, spread, diag);
  const double log_post = detail::log_mixture_integral_1d(
      family, w_post, post.theta[0], grid.steps, spread, diag);
  return log_prior - log_post;
}

inline double information_gain_numeric(const FamilySpec& family, double mean_stat,
                                       std::int64_t n, double c, double theta0,
                                       const LogGrid& grid = LogGrid{},
                                       double spread = 30.0,
                                       QuadratureDiag* diag = nullptr) {
  return information_gain_numeric(family, vec1(mean_stat), n, c, vec1(theta0), grid,
                                  spread, diag);
}

namespace detail {

// Tensor-product grid over a box covering +-spread posterior standard
// deviations per axis, clipped to the domain.
inline double log_mixture_integral_2d(const FamilySpec& family, double weight,
                                      const Vec2& center, int steps_per_axis,
                                      double spread, QuadratureDiag* diag) {
  const auto h = hessian_2d(family, center);
  const double det = h[0] * h[2] - h[1] * h[1];
  if (!(det > 0.0)) {
    throw std::runtime_error("information_gain_numeric_2d: Hessian not positive definite");
  }
  // Diagonal of the inverse Hessian gives per-axis marginal variances.
  const double var0 = h[2] / det / weight;
  const double var1 = h[0] / det / weight;
  Vec2 lo{center[0] - spread * std::sqrt(var0), center[1] - spread * std::sqrt(var1)};
  Vec2 hi{center[0] + spread * std::sqrt(var0), center[1] + spread * std::sqrt(var1)};
  for (int axis = 0; axis < 2; ++axis) {
    const double edge = 1e-9 * (hi[axis] - lo[axis]);
    if (std::isfinite(family.domain_lo[axis]))
      lo[axis] = std::max(lo[axis], family.domain_lo[axis] + edge);
    if (std::isfinite(family.domain_hi[axis]))
      hi[axis] = std::min(hi[axis], family.domain_hi[axis] - edge);
  }
  const double d0 = (hi[0] - lo[0]) / steps_per_axis;
  const double d1 = (hi[1] - lo[1]) / steps_per_axis;
  const double log_cell = std::log(d0) + std::log(d1);
  std::vector<double> terms;
  terms.reserve(static_cast<std::size_t>(steps_per_axis) * steps_per_axis);
  double edge_max = -inf;
  for (int i = 1; i <= steps_per_axis; ++i) {
    const double x = lo[0] + d0 * static_cast<double>(i);
    for (int j = 1; j <= steps_per_axis; ++j) {
      const double y = lo[1] + d1 * static_cast<double>(j);
      const double v = -weight * bregman_divergence(family, Vec2{x, y}, center) + log_cell;
      terms.push_back(v);
      if (i == 1 || i == steps_per_axis || j == 1 || j == steps_per_axis) {
        edge_max = std::max(edge_max, v);
      }
    }
  }
  const double total = log_sum_exp(terms);
  if (diag != nullptr) {
    diag->boundary_mass_log_ratio =
        std::max(diag->boundary_mass_log_ratio, edge_max - total);
    if (edge_max - total > std::log(1e-8)) diag->boundary_mass_warning = true;
  }
  return total;
}

}  // namespace detail

inline double information_gain_numeric_2d(const FamilySpec& family, const Vec2& mean_stat,
                                          std::int64_t n, double c, const Vec2& theta0,
                                          int steps_per_axis = 400, double spread = 16.0,
                                          QuadratureDiag* diag = nullptr) {
  if (family.dim != 2) {
    throw std::invalid_argument("information_gain_numeric_2d: requires a 2-D family");
  }
  const RegularizedEstimate post = regularized_estimate(family, mean_stat, n, c, theta0);
  const double log_prior =
      detail::log_mixture_integral_2d(family, c, theta0, steps_per_axis, spread, diag);
  const double log_post = detail::log_mixture_integral_2d(
      family, static_cast<double>(n) + c, post.theta, steps_per_axis, spread, diag);
  return log_prior - log_post;
}

namespace detail {

// Golden-section maximization of a unimodal function on [a, b].
template <typename F>
double golden_max(F&& f, double a, double b, double tol, int max_iter = 200) {
  constexpr double invphi = 0.6180339887498949;
  double x1 = b - invphi * (b - a);
  double x2 = a + invphi * (b - a);
  double f1 = f(x1);
  double f2 = f(x2);
  for (int i = 0; i < max_iter && (b - a) > tol; ++i) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + invphi * (b - a);
      f2 = f(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - invphi * (b - a);
      f1 = f(x1);
    }
  }
  return 0.5 * (a + b);
}

// Expand [0, step] (or the mirrored interval) until the objective starts
// decreasing or the domain edge is reached; returns a bracket for the max.
template <typename F>
std::pair<double, double> expand_bracket(F&& f, double limit_lo, double limit_hi) {
  const double f0 = f(0.0);
  double best_x = 0.0;
  double best_f = f0;
  double lo = limit_lo;
  double hi = limit_hi;
  for (int dir = 0; dir < 2; ++dir) {
    const double limit = (dir == 0) ? limit_hi : limit_lo;
    double step = 0.125 * std::min(1.0, std::abs(limit) > 0.0 ? std::abs(limit) : 1.0);
    double prev = best_f;
    double x = 0.0;
    for (int i = 0; i < 90; ++i) {
      double next = (dir == 0) ? std::min(x + step, limit) : std::max(x - step, limit);
      const double fx = f(next);
      if (fx > best_f) {
        best_f = fx;
        best_x = next;
      }
      if (fx < prev) {
        if (dir == 0) hi = next; else lo = next;
        break;
      }
      prev = fx;
      x = next;
      step *= 2.0;
      if (next == limit) {
        if (dir == 0) hi = limit; else lo = limit;
        break;
      }
    }
  }
  (void)best_x;
  return {lo, hi};
}

}  // namespace detail

// Executable form of the Bregman duality relations: the pair
// (B*_{L,theta'}(alpha (grad L(theta) - grad L(theta'))), B_L(theta', theta_alpha)).
// The dual side is computed by direct maximization so the identity being
// tested is never assumed.
inline std::pair<double, double> dual_gap(const FamilySpec& family, const Vec2& theta,
                                          const Vec2& theta_prime, double alpha) {
  if (!(alpha >= 0.0) || !(alpha <= 1.0)) {
    throw std::invalid_argument("dual_gap: alpha must lie in [0, 1]");
  }
  detail::check_domain(family, theta, "dual_gap");
  detail::check_domain(family, theta_prime, "dual_gap");
  const Vec2 g = family.grad(theta);
  const Vec2 gp = family.grad(theta_prime);
  const Vec2 x{alpha * (g[0] - gp[0]), alpha * (g[1] - gp[1])};

  // Primal side through the mean-space convex combination.
  const Vec2 blend{alpha * g[0] + (1.0 - alpha) * gp[0],
                   alpha * g[1] + (1.0 - alpha) * gp[1]};
  const Vec2 theta_alpha = family.grad_inverse(blend);
  const double primal = bregman_divergence(family, theta_prime, theta_alpha);

  // Dual side: maximize <lambda, x> - B_{L,theta'}(lambda) over admissible
  // lambda, one golden-section pass per coordinate (cyclic for dim 2).
  Vec2 lambda{0.0, 0.0};
  const double margin = 1e-12;
  auto axis_limits = [&](int axis) {
    const double lo = family.domain_lo[axis];
    const double hi = family.domain_hi[axis];
    double rel_lo = std::isfinite(lo)
        ? (lo - theta_prime[axis]) + margin * std::max(1.0, std::abs(lo))
        : -1e8;
    double rel_hi = std::isfinite(hi)
        ? (hi - theta_prime[axis]) - margin * std::max(1.0, std::abs(hi))
        : 1e8;
    return std::pair<double, double>{rel_lo, rel_hi};
  };
  auto objective = [&](const Vec2& lam) {
    const Vec2 shifted{theta_prime[0] + lam[0], theta_prime[1] + lam[1]};
    if (!family.in_domain(shifted)) return -inf;
    return detail::dot(family, lam, x) - log_mgf(family, theta_prime, lam);
  };
  const int sweeps = (family.dim == 2) ? 64 : 1;
  for (int sweep = 0; sweep < sweeps; ++sweep) {
    Vec2 before = lambda;
    for (int axis = 0; axis < family.dim; ++axis) {
      auto [rel_lo, rel_hi] = axis_limits(axis);
      auto f1 = [&](double u) {
        Vec2 lam = lambda;
        lam[axis] = lam[axis] + u;
        return objective(lam);
      };
      auto [blo, bhi] = detail::expand_bracket(f1, rel_lo - lambda[axis],
                                               rel_hi - lambda[axis]);
      const double u = detail::golden_max(f1, blo, bhi, 1e-12);
      lambda[axis] += u;
    }
    if (family.dim == 2) {
      const double moved = std::abs(lambda[0] - before[0]) + std::abs(lambda[1] - before[1]);
      if (moved < 1e-13) break;
    }
  }
  const double dual = objective(lambda);
  if (!std::isfinite(dual)) {
    throw std::runtime_error("dual_gap: inner maximization did not converge");
  }
  return {dual, primal};
}

inline std::pair<double, double> dual_gap(const FamilySpec& family, double theta,
                                          double theta_prime, double alpha) {
  return dual_gap(family, vec1(theta), vec1(theta_prime), alpha);
}

}  // namespace bregman
