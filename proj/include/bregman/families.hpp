// SPDX-License-Identifier: Apache-2.0
//
// Concrete exponential families: sufficient statistics, closed-form
// Bregman information gains, and the level functions whose zero sublevel
// sets are the confidence sets. Candidates and reference points use the
// customary parameterization of each family (mean, scale, shape, ...);
// the natural-parameter view lives behind family_spec().

#pragma once

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstdint>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "bregman/family.hpp"
#include "bregman/specfun.hpp"

namespace bregman {

enum class Family {
  gaussian_mean,      // N(mu, sigma^2), sigma known; parameter mu
  gaussian_variance,  // N(mu, sigma^2), mu known; parameter sigma
  gaussian_2d,        // N(mu, sigma^2), both unknown
  bernoulli,          // parameter mu in (0, 1)
  exponential,        // Exp(1/mu); parameter mu > 0
  gamma_fixed_shape,  // Gamma(scale lambda, shape k fixed); parameter lambda
  weibull_fixed_shape,// Weibull(scale lambda, shape k fixed); parameter lambda
  pareto,             // Pareto(alpha), scale 1; parameter alpha > 0
  poisson,            // Poisson(lambda); parameter lambda > 0
  chi_square,         // chi^2(k); parameter k (integer or positive real)
};

enum class Chi2Mixture { discrete, continuous };

struct FamilyKind {
  Family family = Family::gaussian_mean;
  double sigma = 1.0;   // gaussian_mean: known standard deviation
  double mu = 0.0;      // gaussian_variance: known mean
  double shape = 1.0;   // gamma/weibull fixed shape k
  Chi2Mixture mixture = Chi2Mixture::discrete;

  static FamilyKind gaussian_mean(double sigma) {
    if (!(sigma > 0.0)) throw std::invalid_argument("gaussian_mean: sigma must be positive");
    FamilyKind k;
    k.family = Family::gaussian_mean;
    k.sigma = sigma;
    return k;
  }
  static FamilyKind gaussian_variance(double mu) {
    FamilyKind k;
    k.family = Family::gaussian_variance;
    k.mu = mu;
    return k;
  }
  static FamilyKind gaussian_2d() {
    FamilyKind k;
    k.family = Family::gaussian_2d;
    return k;
  }
  static FamilyKind bernoulli() {
    FamilyKind k;
    k.family = Family::bernoulli;
    return k;
  }
  static FamilyKind exponential() {
    FamilyKind k;
    k.family = Family::exponential;
    return k;
  }
  static FamilyKind gamma_fixed_shape(double shape) {
    if (!(shape > 0.0)) throw std::invalid_argument("gamma_fixed_shape: shape must be positive");
    FamilyKind k;
    k.family = Family::gamma_fixed_shape;
    k.shape = shape;
    return k;
  }
  static FamilyKind weibull_fixed_shape(double shape) {
    if (!(shape > 0.0)) throw std::invalid_argument("weibull_fixed_shape: shape must be positive");
    FamilyKind k;
    k.family = Family::weibull_fixed_shape;
    k.shape = shape;
    return k;
  }
  static FamilyKind pareto() {
    FamilyKind k;
    k.family = Family::pareto;
    return k;
  }
  static FamilyKind poisson() {
    FamilyKind k;
    k.family = Family::poisson;
    return k;
  }
  static FamilyKind chi_square(Chi2Mixture mixture = Chi2Mixture::discrete) {
    FamilyKind k;
    k.family = Family::chi_square;
    k.mixture = mixture;
    return k;
  }
};

inline const char* family_name(Family f) {
  switch (f) {
    case Family::gaussian_mean: return "gaussian_mean";
    case Family::gaussian_variance: return "gaussian_variance";
    case Family::gaussian_2d: return "gaussian_2d";
    case Family::bernoulli: return "bernoulli";
    case Family::exponential: return "exponential";
    case Family::gamma_fixed_shape: return "gamma_fixed_shape";
    case Family::weibull_fixed_shape: return "weibull_fixed_shape";
    case Family::pareto: return "pareto";
    case Family::poisson: return "poisson";
    case Family::chi_square: return "chi_square";
  }
  return "unknown";
}

// Running sufficient statistics. Only the fields the active family needs
// are maintained: s = sum X, q = sum X^2 (gaussian_2d) or sum (X - mu)^2
// (gaussian_variance), l = sum log X, kk = sum log(X/2), sk = sum X^k.
struct SuffStats {
  std::int64_t n = 0;
  double s = 0.0;
  double q = 0.0;
  double l = 0.0;
  double kk = 0.0;
  double sk = 0.0;

  friend SuffStats operator-(const SuffStats& a, const SuffStats& b) {
    return SuffStats{a.n - b.n, a.s - b.s, a.q - b.q, a.l - b.l, a.kk - b.kk,
                     a.sk - b.sk};
  }
};

namespace detail {

[[noreturn]] inline void support_error(const FamilyKind& kind, double x,
                                       const char* requirement) {
  std::ostringstream msg;
  msg << "update_stats(" << family_name(kind.family) << "): observation " << x
      << " violates support (" << requirement << ")";
  throw std::domain_error(msg.str());
}

}  // namespace detail

inline SuffStats update_stats(const FamilyKind& kind, SuffStats stats, double x) {
  if (!std::isfinite(x)) detail::support_error(kind, x, "finite value");
  switch (kind.family) {
    case Family::gaussian_mean:
      stats.s += x;
      break;
    case Family::gaussian_variance:
      stats.q += (x - kind.mu) * (x - kind.mu);
      break;
    case Family::gaussian_2d:
      stats.s += x;
      stats.q += x * x;
      break;
    case Family::bernoulli:
      if (x != 0.0 && x != 1.0) detail::support_error(kind, x, "x in {0,1}");
      stats.s += x;
      break;
    case Family::exponential:
      if (!(x > 0.0)) detail::support_error(kind, x, "x > 0");
      stats.s += x;
      break;
    case Family::gamma_fixed_shape:
      if (!(x > 0.0)) detail::support_error(kind, x, "x > 0");
      stats.s += x;
      break;
    case Family::weibull_fixed_shape:
      if (!(x > 0.0)) detail::support_error(kind, x, "x > 0");
      stats.sk += std::pow(x, kind.shape);
      break;
    case Family::pareto:
      if (!(x >= 1.0)) detail::support_error(kind, x, "x >= 1");
      stats.l += std::log(x);
      break;
    case Family::poisson:
      if (!(x >= 0.0) || x != std::floor(x)) {
        detail::support_error(kind, x, "x a nonnegative integer");
      }
      stats.s += x;
      break;
    case Family::chi_square:
      if (!(x > 0.0)) detail::support_error(kind, x, "x > 0");
      stats.kk += std::log(0.5 * x);
      break;
  }
  stats.n += 1;
  return stats;
}

// ---------------------------------------------------------------------------
// Auxiliary integrals I(a, b) and J(a, b)

// log I(a, b) with I(a, b) = int_R exp(-a e^t + b t) dt. The substitution
// u = a e^t gives Gamma(b) / a^b exactly; the quadrature route below kept
// the original display testable.
inline double poisson_log_I_quadrature(double a, double b, int steps = 4000) {
  if (!(a > 0.0) || !(b > 0.0)) {
    throw std::domain_error("poisson_log_I: requires a > 0 and b > 0");
  }
  const double peak = std::log(b / a);
  const double left = peak - (60.0 / b + 4.0);
  const double right = peak + std::log1p(60.0 / b) + 4.0;
  const double delta = (right - left) / static_cast<double>(steps);
  const double log_delta = std::log(delta);
  std::vector<double> terms(static_cast<std::size_t>(steps));
  for (int k = 1; k <= steps; ++k) {
    const double t = left + delta * static_cast<double>(k);
    terms[static_cast<std::size_t>(k - 1)] = -a * std::exp(t) + b * t + log_delta;
  }
  return log_sum_exp(terms);
}

inline double poisson_log_I(double a, double b) {
  if (!(a > 0.0) || !(b > 0.0)) {
    throw std::domain_error("poisson_log_I: requires a > 0 and b > 0");
  }
  const double analytic = log_gamma(b) - b * std::log(a);
#ifndef NDEBUG
  const double quad = poisson_log_I_quadrature(a, b);
  assert(std::abs(analytic - quad) <=
         1e-6 * std::max(1.0, std::abs(analytic)) &&
         "poisson_log_I: quadrature disagrees with the analytic value");
#endif
  return analytic;
}

struct JDiag {
  bool truncation_warning = false;
  double last_term_log_ratio = -inf;
};

namespace detail {

inline double log_gamma_half_table(int k) {
  // logGamma(k/2) for k = 1..4096, built once.
  static const std::vector<double> table = [] {
    std::vector<double> t(4097, 0.0);
    for (int i = 1; i <= 4096; ++i) t[static_cast<std::size_t>(i)] = log_gamma(0.5 * i);
    return t;
  }();
  if (k <= 4096) return table[static_cast<std::size_t>(k)];
  return log_gamma(0.5 * k);
}

}  // namespace detail

// log J(a, b): discrete mixture sums exp(-a logGamma(k'/2) + b k'/2) over
// k' = 1..k_max; continuous mixture integrates the same integrand in k'
// over (e^lo, e^hi) with the right-rectangle scheme.
inline double chisquare_log_J(double a, double b, Chi2Mixture mixture,
                              const LogGrid& grid = LogGrid{}, int k_max = 2000,
                              JDiag* diag = nullptr) {
  if (!(a > 0.0)) throw std::domain_error("chisquare_log_J: requires a > 0");
  if (mixture == Chi2Mixture::continuous) {
    // Log-spaced abscissas: the grid endpoints are given in log space and
    // the integrand mass sits at k = O(1), far below exp(hi). A linear
    // grid at the default resolution would step right over it.
    return log_integral_logspaced(
        [a, b](double k) { return -a * log_gamma(0.5 * k) + 0.5 * b * k; }, grid);
  }
  if (k_max < 2) throw std::invalid_argument("chisquare_log_J: k_max too small");
  std::vector<double> terms(static_cast<std::size_t>(k_max));
  for (int k = 1; k <= k_max; ++k) {
    terms[static_cast<std::size_t>(k - 1)] =
        -a * detail::log_gamma_half_table(k) + 0.5 * b * static_cast<double>(k);
  }
  const double total = log_sum_exp(terms);
  if (diag != nullptr) {
    diag->last_term_log_ratio = terms.back() - total;
    if (terms.back() - total > std::log(1e-12)) diag->truncation_warning = true;
  }
  return total;
}

// ---------------------------------------------------------------------------
// Mean statistics and point estimates

// (1/n) sum F(X_t) in the family's mean parameterization; n >= 1.
inline double mean_statistic(const FamilyKind& kind, const SuffStats& stats) {
  if (stats.n < 1) throw std::invalid_argument("mean_statistic: requires n >= 1");
  const double n = static_cast<double>(stats.n);
  switch (kind.family) {
    case Family::gaussian_mean: return stats.s / n;
    case Family::gaussian_variance: return stats.q / n;
    case Family::bernoulli: return stats.s / n;
    case Family::exponential: return stats.s / n;
    case Family::gamma_fixed_shape: return stats.s / n;
    case Family::weibull_fixed_shape: return stats.sk / n;
    case Family::pareto: return stats.l / n;
    case Family::poisson: return stats.s / n;
    case Family::chi_square: return stats.kk / n + std::log(2.0);
    case Family::gaussian_2d:
      throw std::invalid_argument("mean_statistic: use mean_statistic_2d");
  }
  throw std::logic_error("mean_statistic: unreachable");
}

inline Vec2 mean_statistic_2d(const FamilyKind& kind, const SuffStats& stats) {
  if (kind.family != Family::gaussian_2d) {
    throw std::invalid_argument("mean_statistic_2d: gaussian_2d only");
  }
  if (stats.n < 1) throw std::invalid_argument("mean_statistic_2d: requires n >= 1");
  const double n = static_cast<double>(stats.n);
  return Vec2{stats.s / n, stats.q / n};
}

// Plug-in point estimate in user parameterization (used for reporting).
inline double point_estimate(const FamilyKind& kind, const SuffStats& stats) {
  if (stats.n < 1) throw std::invalid_argument("point_estimate: requires n >= 1");
  const double n = static_cast<double>(stats.n);
  switch (kind.family) {
    case Family::gaussian_mean: return stats.s / n;
    case Family::gaussian_variance: return std::sqrt(stats.q / n);
    case Family::bernoulli: return stats.s / n;
    case Family::exponential: return stats.s / n;
    case Family::gamma_fixed_shape: return stats.s / (n * kind.shape);
    case Family::weibull_fixed_shape: return std::pow(stats.sk / n, 1.0 / kind.shape);
    case Family::pareto: return stats.l > 0.0 ? n / stats.l : inf;
    case Family::poisson: return stats.s / n;
    case Family::chi_square: return 2.0 * inverse_digamma(stats.kk / n);
    case Family::gaussian_2d: return stats.s / n;
  }
  throw std::logic_error("point_estimate: unreachable");
}

// ---------------------------------------------------------------------------
// Closed-form Bregman information gains (gamma_{n,c}(theta0))

namespace detail {

inline double bernoulli_entropy(double p) {
  return -p * std::log(p) - (1.0 - p) * std::log(1.0 - p);
}

inline double log_beta(double a, double b) {
  return log_gamma(a) + log_gamma(b) - log_gamma(a + b);
}

inline void require_positive(double v, const char* what) {
  if (!(v > 0.0)) {
    std::ostringstream msg;
    msg << what << " must be positive, got " << v;
    throw std::domain_error(msg.str());
  }
}

}  // namespace detail

// theta0 is the reference point in user parameterization; see the class
// comment at the top of this header for the per-family meaning.
inline double information_gain_closed(const FamilyKind& kind, const SuffStats& stats,
                                      double c, double theta0,
                                      const LogGrid& grid = LogGrid{},
                                      int k_max = 2000, JDiag* jdiag = nullptr) {
  detail::require_positive(c, "information_gain_closed: c");
  const double n = static_cast<double>(stats.n);
  const double w = n + c;
  switch (kind.family) {
    case Family::gaussian_mean:
      return 0.5 * std::log(w / c);
    case Family::gaussian_variance: {
      // prior integral = |theta| e^{c/2} Gamma(c/2+1) (2/c)^{c/2+1}
      detail::require_positive(theta0, "gaussian_variance reference sigma");
      const double r = stats.q / (theta0 * theta0) + c;
      return std::log(r / w) - 0.5 * n * (1.0 + std::log(2.0)) -
             (0.5 * c + 1.0) * std::log(c) + (0.5 * w + 1.0) * std::log(w) +
             log_gamma(0.5 * c + 1.0) - log_gamma(0.5 * w + 1.0);
    }
    case Family::bernoulli: {
      if (!(theta0 > 0.0 && theta0 < 1.0)) {
        throw std::domain_error("bernoulli reference mean must lie in (0,1)");
      }
      const double mu_nc = (stats.s + c * theta0) / w;
      return c * detail::bernoulli_entropy(theta0) - w * detail::bernoulli_entropy(mu_nc) +
             detail::log_beta(c * theta0, c * (1.0 - theta0)) -
             detail::log_beta(w * mu_nc, w * (1.0 - mu_nc));
    }
    case Family::exponential: {
      detail::require_positive(theta0, "exponential reference mean");
      return std::log(stats.s / theta0 + c) + log_gamma(c) - log_gamma(w) +
             (w - 1.0) * std::log(w) - c * std::log(c) - n;
    }
    case Family::gamma_fixed_shape: {
      detail::require_positive(theta0, "gamma reference scale");
      const double k = kind.shape;
      return std::log((stats.s + c * k * theta0) / (w * k * theta0)) +
             log_gamma(c * k) + c * k - c * k * std::log(c * k) -
             log_gamma(w * k) - w * k + w * k * std::log(w * k);
    }
    case Family::weibull_fixed_shape: {
      detail::require_positive(theta0, "weibull reference scale");
      const double lk = std::pow(theta0, kind.shape);
      return std::log((stats.sk + c * lk) / (w * lk)) + log_gamma(c) + c -
             c * std::log(c) - log_gamma(w) - w + w * std::log(w);
    }
    case Family::pareto: {
      detail::require_positive(theta0, "pareto reference exponent");
      return std::log(theta0 * stats.l + c) + log_gamma(c) - log_gamma(w) +
             (w - 1.0) * std::log(w) - c * std::log(c) - n;
    }
    case Family::poisson: {
      detail::require_positive(theta0, "poisson reference rate");
      const double m = stats.s + c * theta0;
      return c * theta0 * (1.0 - std::log(theta0)) - m * (1.0 - std::log(m / w)) +
             poisson_log_I(c, c * theta0) - poisson_log_I(w, m);
    }
    case Family::chi_square: {
      detail::require_positive(theta0, "chi-square reference dof");
      const double psi0 = digamma(0.5 * theta0);
      const double b = stats.kk + c * psi0;
      const double k_hat = 2.0 * inverse_digamma(b / w);
      return 0.5 * k_hat * b - w * log_gamma(0.5 * k_hat) + c * log_gamma(0.5 * theta0) -
             0.5 * c * theta0 * psi0 +
             chisquare_log_J(c, c * psi0, kind.mixture, grid, k_max, jdiag) -
             chisquare_log_J(w, b, kind.mixture, grid, k_max, jdiag);
    }
    case Family::gaussian_2d:
      throw std::invalid_argument("information_gain_closed: use the _2d overload");
  }
  throw std::logic_error("information_gain_closed: unreachable");
}

inline double information_gain_closed_2d(const FamilyKind& kind, const SuffStats& stats,
                                         double c, double mu0, double sigma0) {
  if (kind.family != Family::gaussian_2d) {
    throw std::invalid_argument("information_gain_closed_2d: gaussian_2d only");
  }
  detail::require_positive(c, "information_gain_closed_2d: c");
  detail::require_positive(sigma0, "gaussian_2d reference sigma");
  const double n = static_cast<double>(stats.n);
  const double w = n + c;
  const double s2 = sigma0 * sigma0;
  const double z_ref = (stats.q - 2.0 * mu0 * stats.s + n * mu0 * mu0) / s2;
  const double z_hat = (stats.n > 0) ? (stats.q - stats.s * stats.s / n) / s2 : 0.0;
  const double inner = (n / w) * z_hat + (c / w) * z_ref + c;
  return 1.5 * std::log(inner) + 0.5 * (n + c + 1.0) * std::log(w) -
         (0.5 * c + 2.0) * std::log(c) - 0.5 * n * (1.0 + std::log(2.0)) +
         log_gamma(0.5 * (c + 3.0)) - log_gamma(0.5 * (w + 3.0));
}

// ---------------------------------------------------------------------------
// Level functions F with membership theta0 in Theta_{n,c}(delta) iff F <= 0

// Constants of F that depend on (kind, n, c, delta) but not on the
// candidate. Root searches evaluate F thousands of times on fixed stats,
// so these are computed once.
struct LevelTerms {
  double c = 1.0;
  double log_inv_delta = 0.0;
  double rhs = 0.0;   // candidate-independent constant subtracted from the LHS
  double mult = 0.0;  // family-specific multiplier, see level_eval
};

inline LevelTerms level_terms(const FamilyKind& kind, std::int64_t n_obs, double c,
                              double delta) {
  detail::require_positive(c, "level_terms: c");
  if (!(delta > 0.0 && delta <= 1.0)) {
    throw std::invalid_argument("level_terms: delta must lie in (0, 1]");
  }
  const double n = static_cast<double>(n_obs);
  const double w = n + c;
  LevelTerms t;
  t.c = c;
  t.log_inv_delta = std::log(1.0 / delta);
  switch (kind.family) {
    case Family::gaussian_mean:
      t.rhs = t.log_inv_delta + 0.5 * std::log(w / c);
      break;
    case Family::gaussian_variance:
      t.mult = 0.5 * w + 1.0;
      t.rhs = t.log_inv_delta - 0.5 * n * std::log(2.0) -
              (0.5 * c + 1.0) * std::log(c) + log_gamma(0.5 * c + 1.0) -
              log_gamma(0.5 * w + 1.0);
      break;
    case Family::gaussian_2d:
      t.mult = 0.5 * (n + c + 3.0);
      t.rhs = t.log_inv_delta - 0.5 * n * std::log(2.0) -
              (0.5 * c + 2.0) * std::log(c) + 0.5 * std::log(w) +
              log_gamma(0.5 * (c + 3.0)) - log_gamma(0.5 * (w + 3.0));
      break;
    case Family::bernoulli:
      t.rhs = t.log_inv_delta + log_gamma(w) - log_gamma(c);
      break;
    case Family::exponential:
    case Family::weibull_fixed_shape:
    case Family::pareto:
      t.mult = w + 1.0;
      t.rhs = t.log_inv_delta + log_gamma(c) - log_gamma(w) - std::log(w) -
              c * std::log(c);
      break;
    case Family::gamma_fixed_shape: {
      const double k = kind.shape;
      t.mult = w * k + 1.0;
      t.rhs = t.log_inv_delta + log_gamma(c * k) - log_gamma(w * k) -
              std::log(w * k) - c * k * std::log(c * k);
      break;
    }
    case Family::poisson:
    case Family::chi_square:
      t.rhs = t.log_inv_delta;
      break;
  }
  return t;
}

// F(candidate) for 1-D families. Candidates outside the open parameter
// domain raise; Bernoulli candidates are clamped to [1e-12, 1-1e-12]
// (continuous extension at the support boundary).
inline double level_eval(const FamilyKind& kind, const LevelTerms& t,
                         const SuffStats& stats, double candidate,
                         const LogGrid& grid = LogGrid{}, int k_max = 2000) {
  const double n = static_cast<double>(stats.n);
  const double c = t.c;
  const double w = n + c;
  switch (kind.family) {
    case Family::gaussian_mean: {
      const double dev = stats.s - n * candidate;
      return dev * dev / (2.0 * kind.sigma * kind.sigma * w) - t.rhs;
    }
    case Family::gaussian_variance: {
      detail::require_positive(candidate, "gaussian_variance candidate sigma");
      const double r = stats.q / (candidate * candidate);
      return 0.5 * r - t.mult * std::log(r + c) - t.rhs;
    }
    case Family::bernoulli: {
      const double mu = std::clamp(candidate, 1e-12, 1.0 - 1e-12);
      return -stats.s * std::log(mu) - (n - stats.s) * std::log(1.0 - mu) +
             log_gamma(stats.s + c * mu) + log_gamma(n - stats.s + c * (1.0 - mu)) -
             log_gamma(c * mu) - log_gamma(c * (1.0 - mu)) - t.rhs;
    }
    case Family::exponential: {
      detail::require_positive(candidate, "exponential candidate mean");
      const double r = stats.s / candidate;
      return r - t.mult * std::log(r + c) - t.rhs;
    }
    case Family::gamma_fixed_shape: {
      detail::require_positive(candidate, "gamma candidate scale");
      const double r = stats.s / candidate;
      return r - t.mult * std::log(r + c * kind.shape) - t.rhs;
    }
    case Family::weibull_fixed_shape: {
      detail::require_positive(candidate, "weibull candidate scale");
      const double r = stats.sk / std::pow(candidate, kind.shape);
      return r - t.mult * std::log(r + c) - t.rhs;
    }
    case Family::pareto: {
      detail::require_positive(candidate, "pareto candidate exponent");
      const double r = candidate * stats.l;
      return r - t.mult * std::log(r + c) - t.rhs;
    }
    case Family::poisson: {
      detail::require_positive(candidate, "poisson candidate rate");
      const double m = stats.s + c * candidate;
      return n * candidate - stats.s * std::log(candidate) - log_gamma(c * candidate) +
             c * candidate * std::log(c) + log_gamma(m) - m * std::log(w) - t.rhs;
    }
    case Family::chi_square: {
      detail::require_positive(candidate, "chi-square candidate dof");
      const double psi0 = digamma(0.5 * candidate);
      return n * log_gamma(0.5 * candidate) - 0.5 * candidate * stats.kk -
             chisquare_log_J(c, c * psi0, kind.mixture, grid, k_max) +
             chisquare_log_J(w, stats.kk + c * psi0, kind.mixture, grid, k_max) -
             t.rhs;
    }
    case Family::gaussian_2d:
      throw std::invalid_argument("level_eval: use level_eval_2d");
  }
  throw std::logic_error("level_eval: unreachable");
}

inline double level_function(const FamilyKind& kind, const SuffStats& stats, double c,
                             double delta, double candidate,
                             const LogGrid& grid = LogGrid{}, int k_max = 2000) {
  return level_eval(kind, level_terms(kind, stats.n, c, delta), stats, candidate, grid,
                    k_max);
}

inline double level_eval_2d(const FamilyKind& kind, const LevelTerms& t,
                            const SuffStats& stats, double mu, double sigma) {
  if (kind.family != Family::gaussian_2d) {
    throw std::invalid_argument("level_eval_2d: gaussian_2d only");
  }
  detail::require_positive(sigma, "gaussian_2d candidate sigma");
  const double n = static_cast<double>(stats.n);
  const double c = t.c;
  const double w = n + c;
  const double s2 = sigma * sigma;
  const double z = (stats.q - 2.0 * mu * stats.s + n * mu * mu) / s2;
  const double z_hat = (stats.n > 0) ? (stats.q - stats.s * stats.s / n) / s2 : 0.0;
  const double inner = (n / w) * z_hat + (c / w) * z + c;
  return 0.5 * z - t.mult * std::log(inner) - t.rhs;
}

inline double level_function_2d(const FamilyKind& kind, const SuffStats& stats, double c,
                                double delta, double mu, double sigma) {
  return level_eval_2d(kind, level_terms(kind, stats.n, c, delta), stats, mu, sigma);
}

// ---------------------------------------------------------------------------
// Natural-parameter view (FamilySpec) and conversions

// User parameter -> natural parameter theta.
inline double natural_of(const FamilyKind& kind, double user) {
  switch (kind.family) {
    case Family::gaussian_mean: return user / (kind.sigma * kind.sigma);
    case Family::gaussian_variance:
      detail::require_positive(user, "sigma");
      return -0.5 / (user * user);
    case Family::bernoulli:
      if (!(user > 0.0 && user < 1.0)) throw std::domain_error("bernoulli mean in (0,1)");
      return std::log(user / (1.0 - user));
    case Family::exponential:
      detail::require_positive(user, "mean");
      return -1.0 / user;
    case Family::gamma_fixed_shape:
      detail::require_positive(user, "scale");
      return -1.0 / user;
    case Family::weibull_fixed_shape:
      detail::require_positive(user, "scale");
      return -1.0 / std::pow(user, kind.shape);
    case Family::pareto:
      detail::require_positive(user, "exponent");
      return -1.0 - user;
    case Family::poisson:
      detail::require_positive(user, "rate");
      return std::log(user);
    case Family::chi_square:
      detail::require_positive(user, "dof");
      return 0.5 * user - 1.0;
    case Family::gaussian_2d:
      throw std::invalid_argument("natural_of: use natural_of_2d");
  }
  throw std::logic_error("natural_of: unreachable");
}

inline Vec2 natural_of_2d(double mu, double sigma) {
  detail::require_positive(sigma, "sigma");
  const double s2 = sigma * sigma;
  return Vec2{mu / s2, -0.5 / s2};
}

inline FamilySpec family_spec(const FamilyKind& kind) {
  FamilySpec spec;
  spec.name = family_name(kind.family);
  switch (kind.family) {
    case Family::gaussian_mean: {
      // F(x) = x, theta = mu / sigma^2
      const double s2 = kind.sigma * kind.sigma;
      spec.log_partition = [s2](const Vec2& t) { return 0.5 * s2 * t[0] * t[0]; };
      spec.grad = [s2](const Vec2& t) { return vec1(s2 * t[0]); };
      spec.grad_inverse = [s2](const Vec2& m) { return vec1(m[0] / s2); };
      spec.in_domain = [](const Vec2& t) { return std::isfinite(t[0]); };
      break;
    }
    case Family::gaussian_variance: {
      spec.log_partition = [](const Vec2& t) { return -0.5 * std::log(-2.0 * t[0]); };
      spec.grad = [](const Vec2& t) { return vec1(-0.5 / t[0]); };
      spec.grad_inverse = [](const Vec2& m) { return vec1(-0.5 / m[0]); };
      spec.in_domain = [](const Vec2& t) { return t[0] < 0.0; };
      spec.domain_hi[0] = 0.0;
      break;
    }
    case Family::gaussian_2d: {
      spec.dim = 2;
      spec.log_partition = [](const Vec2& t) {
        return -0.5 * std::log(-t[1]) - t[0] * t[0] / (4.0 * t[1]);
      };
      spec.grad = [](const Vec2& t) {
        return Vec2{-0.5 * t[0] / t[1], -0.5 / t[1] + 0.25 * t[0] * t[0] / (t[1] * t[1])};
      };
      spec.grad_inverse = [](const Vec2& m) {
        const double v = m[1] - m[0] * m[0];
        return Vec2{m[0] / v, -0.5 / v};
      };
      spec.in_domain = [](const Vec2& t) { return std::isfinite(t[0]) && t[1] < 0.0; };
      spec.domain_hi[1] = 0.0;
      break;
    }
    case Family::bernoulli: {
      spec.log_partition = [](const Vec2& t) {
        // log(1 + e^t) without overflow
        return t[0] > 0.0 ? t[0] + std::log1p(std::exp(-t[0]))
                          : std::log1p(std::exp(t[0]));
      };
      spec.grad = [](const Vec2& t) { return vec1(1.0 / (1.0 + std::exp(-t[0]))); };
      spec.grad_inverse = [](const Vec2& m) { return vec1(std::log(m[0] / (1.0 - m[0]))); };
      spec.in_domain = [](const Vec2& t) { return std::isfinite(t[0]); };
      break;
    }
    case Family::exponential:
    case Family::weibull_fixed_shape: {
      spec.log_partition = [](const Vec2& t) { return -std::log(-t[0]); };
      spec.grad = [](const Vec2& t) { return vec1(-1.0 / t[0]); };
      spec.grad_inverse = [](const Vec2& m) { return vec1(-1.0 / m[0]); };
      spec.in_domain = [](const Vec2& t) { return t[0] < 0.0; };
      spec.domain_hi[0] = 0.0;
      break;
    }
    case Family::gamma_fixed_shape: {
      const double k = kind.shape;
      spec.log_partition = [k](const Vec2& t) { return -k * std::log(-t[0]); };
      spec.grad = [k](const Vec2& t) { return vec1(-k / t[0]); };
      spec.grad_inverse = [k](const Vec2& m) { return vec1(-k / m[0]); };
      spec.in_domain = [](const Vec2& t) { return t[0] < 0.0; };
      spec.domain_hi[0] = 0.0;
      break;
    }
    case Family::pareto: {
      spec.log_partition = [](const Vec2& t) { return -std::log(-1.0 - t[0]); };
      spec.grad = [](const Vec2& t) { return vec1(-1.0 / (1.0 + t[0])); };
      spec.grad_inverse = [](const Vec2& m) { return vec1(-1.0 - 1.0 / m[0]); };
      spec.in_domain = [](const Vec2& t) { return t[0] < -1.0; };
      spec.domain_hi[0] = -1.0;
      break;
    }
    case Family::poisson: {
      spec.log_partition = [](const Vec2& t) { return std::exp(t[0]); };
      spec.grad = [](const Vec2& t) { return vec1(std::exp(t[0])); };
      spec.grad_inverse = [](const Vec2& m) { return vec1(std::log(m[0])); };
      spec.in_domain = [](const Vec2& t) { return std::isfinite(t[0]); };
      break;
    }
    case Family::chi_square: {
      spec.log_partition = [](const Vec2& t) {
        return (t[0] + 1.0) * std::log(2.0) + log_gamma(t[0] + 1.0);
      };
      spec.grad = [](const Vec2& t) { return vec1(std::log(2.0) + digamma(t[0] + 1.0)); };
      spec.grad_inverse = [](const Vec2& m) {
        return vec1(inverse_digamma(m[0] - std::log(2.0)) - 1.0);
      };
      spec.in_domain = [](const Vec2& t) { return t[0] > -1.0; };
      spec.domain_lo[0] = -1.0;
      if (kind.mixture == Chi2Mixture::discrete) {
        spec.discrete_mixture = true;
        spec.atom = [](int i) { return vec1(0.5 * static_cast<double>(i) - 1.0); };
      }
      break;
    }
  }
  return spec;
}

// All kinds exercised by the generic-family test suites.
inline std::vector<FamilyKind> registered_kinds() {
  return {
      FamilyKind::gaussian_mean(1.0),
      FamilyKind::gaussian_mean(2.0),
      FamilyKind::gaussian_variance(0.0),
      FamilyKind::bernoulli(),
      FamilyKind::exponential(),
      FamilyKind::gamma_fixed_shape(3.0),
      FamilyKind::weibull_fixed_shape(2.0),
      FamilyKind::pareto(),
      FamilyKind::poisson(),
      FamilyKind::chi_square(Chi2Mixture::continuous),
      FamilyKind::chi_square(Chi2Mixture::discrete),
  };
}

}  // namespace bregman
