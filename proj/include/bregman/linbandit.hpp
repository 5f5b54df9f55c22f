// SPDX-License-Identifier: Apache-2.0
//
// Heteroscedastic linear-bandit confidence ellipsoid: weighted design
// matrix, regularized least-squares estimate, log-determinant information
// gain, and the membership test together with its sqrt-form comparison.

#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace bregman {

namespace detail {

inline double logdet_spd(const Eigen::MatrixXd& m) {
  const Eigen::LLT<Eigen::MatrixXd> llt(m);
  if (llt.info() != Eigen::Success) {
    throw std::runtime_error("logdet_spd: matrix is not positive definite");
  }
  return 2.0 * llt.matrixLLT().diagonal().array().log().sum();
}

}  // namespace detail

// Accumulated weighted design: V = sum phi phi^T / sigma^2 and
// b = sum x phi / sigma^2, regularized by a positive-definite V0.
class DesignState {
 public:
  explicit DesignState(Eigen::MatrixXd v0) : v0_(std::move(v0)) {
    if (v0_.rows() != v0_.cols() || v0_.rows() < 1) {
      throw std::invalid_argument("DesignState: V0 must be square");
    }
    if (!v0_.isApprox(v0_.transpose(), 1e-12)) {
      throw std::invalid_argument("DesignState: V0 must be symmetric");
    }
    logdet_v0_ = detail::logdet_spd(v0_);  // also validates positive definiteness
    v_ = Eigen::MatrixXd::Zero(v0_.rows(), v0_.cols());
    b_ = Eigen::VectorXd::Zero(v0_.rows());
  }

  static DesignState identity(int dim) {
    return DesignState(Eigen::MatrixXd::Identity(dim, dim));
  }

  int dim() const { return static_cast<int>(v0_.rows()); }
  std::int64_t count() const { return n_; }
  const Eigen::MatrixXd& v0() const { return v0_; }
  const Eigen::MatrixXd& v() const { return v_; }
  const Eigen::VectorXd& b() const { return b_; }

  void observe(const Eigen::VectorXd& phi, double x, double sigma) {
    if (phi.size() != v0_.rows()) {
      throw std::invalid_argument("DesignState::observe: dimension mismatch");
    }
    if (!(sigma > 0.0)) {
      throw std::invalid_argument("DesignState::observe: sigma must be positive");
    }
    const double w = 1.0 / (sigma * sigma);
    v_.noalias() += w * phi * phi.transpose();
    b_.noalias() += (w * x) * phi;
    n_ += 1;
  }

  // theta_n = (V0 + V)^{-1} b via Cholesky.
  Eigen::VectorXd estimate() const {
    const Eigen::LLT<Eigen::MatrixXd> llt(v0_ + v_);
    if (llt.info() != Eigen::Success) {
      throw std::runtime_error("DesignState::estimate: factorization failed");
    }
    return llt.solve(b_);
  }

  // gamma_n = (logdet(V0 + V) - logdet(V0)) / 2, nonnegative.
  double info_gain() const {
    return 0.5 * (detail::logdet_spd(v0_ + v_) - logdet_v0_);
  }

 private:
  Eigen::MatrixXd v0_;
  Eigen::MatrixXd v_;
  Eigen::VectorXd b_;
  std::int64_t n_ = 0;
  double logdet_v0_ = 0.0;
};

struct EllipsoidCheck {
  bool member = false;      // squared-radius test
  bool member_ay = false;   // sqrt-form comparison test
  double lhs_sq = 0.0;      // ||theta - theta_n||^2_{V0+V}
  double radius_sq = 0.0;   // ||theta||^2_{V0} + 2(gamma + log(1/delta))
  double radius_ay = 0.0;   // ||theta||_{V0} + sqrt(2(gamma + log(1/delta)))
};

// Membership of theta in the ellipsoid, plus the sqrt-form radius used by
// the subset comparison.
inline EllipsoidCheck in_ellipsoid(const DesignState& state, const Eigen::VectorXd& theta,
                                   double delta) {
  if (!(delta > 0.0 && delta <= 1.0)) {
    throw std::invalid_argument("in_ellipsoid: delta must lie in (0, 1]");
  }
  if (theta.size() != state.dim()) {
    throw std::invalid_argument("in_ellipsoid: dimension mismatch");
  }
  const Eigen::VectorXd diff = theta - state.estimate();
  EllipsoidCheck out;
  out.lhs_sq = diff.dot((state.v0() + state.v()) * diff);
  const double reg_norm_sq = theta.dot(state.v0() * theta);
  const double budget = 2.0 * (state.info_gain() + std::log(1.0 / delta));
  out.radius_sq = reg_norm_sq + budget;
  out.radius_ay = std::sqrt(reg_norm_sq) + std::sqrt(budget);
  out.member = out.lhs_sq <= out.radius_sq;
  out.member_ay = std::sqrt(out.lhs_sq) <= out.radius_ay;
  return out;
}

// Spec-style free functions.
inline DesignState update(DesignState state, const Eigen::VectorXd& phi, double x,
                          double sigma) {
  state.observe(phi, x, sigma);
  return state;
}

inline Eigen::VectorXd estimate(const DesignState& state) { return state.estimate(); }
inline double info_gain(const DesignState& state) { return state.info_gain(); }

}  // namespace bregman
