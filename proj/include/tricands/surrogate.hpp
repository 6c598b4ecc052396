// Copyright 2026 The tricands Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// =============================================================================

// Gaussian-process surrogate with a separable squared-exponential kernel
//
//   k(x, x') = tau2 * exp(-sum_k (x_k - x'_k)^2 / theta_k)
//
// on responses standardized to mean 0 and sd 1. The scale tau2 is profiled
// out of the likelihood in closed form; the lengthscales theta are found by
// multistart Nelder-Mead on log(theta) inside a box.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "tricands/candidates.hpp"
#include "tricands/error.hpp"
#include "tricands/nelder_mead.hpp"
#include "tricands/types.hpp"

namespace tricands {

struct DesignState {
  Matrix X;  // n x d in [0,1]^d
  Vector Y;
  double f_min = std::numeric_limits<double>::infinity();
  Index best_index = -1;

  DesignState() = default;
  DesignState(Matrix x, Vector y) : X(std::move(x)), Y(std::move(y)) {
    if (X.rows() != Y.size()) throw Error(ErrorCode::DimensionMismatch, "X rows must match Y length");
    refresh();
  }

  void append(const Vector& x, double y) {
    X.conservativeResize(X.rows() + 1, Eigen::NoChange);
    X.row(X.rows() - 1) = x.transpose();
    Y.conservativeResize(Y.size() + 1);
    Y(Y.size() - 1) = y;
    refresh();
  }

  Index size() const { return X.rows(); }
  Index dim() const { return X.cols(); }

 private:
  void refresh() {
    if (Y.size() == 0) return;
    Y.minCoeff(&best_index);
    f_min = Y(best_index);
  }
};

struct GpFitSettings {
  double theta_lo = 1e-3;
  double theta_hi = 10.0;
  int n_starts = 5;
  double nugget = 1e-8;
  double nugget_max = 1e-4;
  std::size_t max_evals_per_start = 400;
  std::uint64_t seed = 0;
};

/// Smallest profiled scale; keeps constant responses from collapsing the fit.
inline constexpr double kMinScale = 1e-10;

struct GpFit {
  Matrix X;
  double y_mean = 0.0;
  double y_sd = 1.0;
  Vector lengthscales;  // theta
  double scale = 1.0;   // tau2 on the standardized response scale
  double nugget = 1e-8;
  Matrix chol;          // lower factor of C + g I
  Vector alpha;         // (C + g I)^{-1} y_std
  double loglik = -std::numeric_limits<double>::infinity();
  std::vector<double> start_logliks;

  Index dim() const { return X.cols(); }
  /// Signal variance in the units of the original responses.
  double signal_variance() const { return scale * y_sd * y_sd; }
};

namespace detail {

inline double correlation(const Vector& theta, const auto& a, const auto& b) {
  double s = 0.0;
  for (Index k = 0; k < theta.size(); ++k) {
    const double diff = a(k) - b(k);
    s += diff * diff / theta(k);
  }
  return std::exp(-s);
}

inline Matrix correlation_matrix(const Matrix& X, const Vector& theta, double nugget) {
  const Index n = X.rows();
  Matrix K(n, n);
  for (Index i = 0; i < n; ++i) {
    K(i, i) = 1.0 + nugget;
    for (Index j = 0; j < i; ++j) {
      const double c = correlation(theta, X.row(i), X.row(j));
      K(i, j) = c;
      K(j, i) = c;
    }
  }
  return K;
}

inline Matrix cross_correlation(const Matrix& A, const Matrix& B, const Vector& theta) {
  Matrix K(A.rows(), B.rows());
  for (Index i = 0; i < A.rows(); ++i)
    for (Index j = 0; j < B.rows(); ++j) K(i, j) = correlation(theta, A.row(i), B.row(j));
  return K;
}

/// Fills chol/alpha/scale/loglik for fixed theta and nugget on standardized y.
/// Returns false if the kernel matrix is not numerically positive definite.
inline bool factor(GpFit& fit, const Vector& y_std) {
  const Index n = fit.X.rows();
  Eigen::LLT<Matrix> llt(correlation_matrix(fit.X, fit.lengthscales, fit.nugget));
  if (llt.info() != Eigen::Success) return false;
  fit.chol = llt.matrixL();
  fit.alpha = llt.solve(y_std);
  fit.scale = std::max(y_std.dot(fit.alpha) / static_cast<double>(n), kMinScale);
  double logdet = 0.0;
  for (Index i = 0; i < n; ++i) logdet += 2.0 * std::log(fit.chol(i, i));
  const double nn = static_cast<double>(n);
  fit.loglik = -0.5 * nn * std::log(fit.scale) - 0.5 * logdet - 0.5 * nn * (1.0 + std::log(2.0 * M_PI));
  return std::isfinite(fit.loglik);
}

inline void standardize(const DesignState& data, GpFit& fit, Vector& y_std) {
  fit.X = data.X;
  fit.y_mean = data.Y.mean();
  const double var =
      data.Y.size() > 1 ? (data.Y.array() - fit.y_mean).square().sum() / static_cast<double>(data.Y.size() - 1) : 0.0;
  fit.y_sd = var > 0.0 ? std::sqrt(var) : 1.0;
  y_std = (data.Y.array() - fit.y_mean) / fit.y_sd;
}

}  // namespace detail

/// GP with the given lengthscales and nugget; only the scale is estimated.
inline GpFit fit_gp_fixed(const DesignState& data, const Vector& lengthscales, double nugget = 1e-8) {
  if (data.size() < 1) throw Error(ErrorCode::TooFewPoints, "empty design");
  if (lengthscales.size() != data.dim()) throw Error(ErrorCode::DimensionMismatch, "one lengthscale per input");
  GpFit fit;
  Vector y_std;
  detail::standardize(data, fit, y_std);
  fit.lengthscales = lengthscales;
  fit.nugget = nugget;
  if (!detail::factor(fit, y_std)) throw Error(ErrorCode::SingularKernel, "kernel matrix not positive definite");
  return fit;
}

/// Maximum-likelihood GP fit: multistart Nelder-Mead over log(theta) in
/// [theta_lo, theta_hi]^d, starts from a Latin hypercube in log space. When
/// the kernel is numerically singular the nugget is escalated 10x at a time.
inline GpFit fit_gp(const DesignState& data, const GpFitSettings& cfg = {}) {
  const Index n = data.size();
  const Index d = data.dim();
  if (n < 2) throw Error(ErrorCode::TooFewPoints, "GP fit needs at least 2 points");
  GpFit fit;
  Vector y_std;
  detail::standardize(data, fit, y_std);

  const double lo = std::log(cfg.theta_lo);
  const double hi = std::log(cfg.theta_hi);
  Matrix starts = lhs_candidates(cfg.n_starts, d, cfg.seed);
  NelderMeadOptions nm;
  nm.lower = Vector::Constant(d, lo);
  nm.upper = Vector::Constant(d, hi);
  nm.initial_step = 0.1 * (hi - lo);
  nm.ftol = 1e-9;
  nm.xtol = 1e-5;
  nm.max_evals = cfg.max_evals_per_start;

  for (double g = cfg.nugget; g <= cfg.nugget_max * (1.0 + 1e-12); g *= 10.0) {
    GpFit trial = fit;
    trial.nugget = g;
    auto negloglik = [&](const Vector& log_theta) {
      trial.lengthscales = log_theta.array().exp();
      return detail::factor(trial, y_std) ? -trial.loglik : std::numeric_limits<double>::infinity();
    };
    std::vector<double> start_values;
    NelderMeadResult best;
    for (Index s = 0; s < starts.rows(); ++s) {
      Vector x0 = (lo + (hi - lo) * starts.row(s).array()).transpose();
      start_values.push_back(-negloglik(x0));
      NelderMeadResult r = nelder_mead(negloglik, x0, nm);
      if (r.value < best.value) best = r;
    }
    if (!std::isfinite(best.value)) continue;
    trial.lengthscales = best.x.array().exp();
    if (!detail::factor(trial, y_std)) continue;
    trial.start_logliks = std::move(start_values);
    return trial;
  }
  throw Error(ErrorCode::FitFailed, "kernel singular up to nugget " + std::to_string(cfg.nugget_max));
}

struct Prediction {
  Vector mean;
  Vector sd;
  std::optional<Matrix> cov;
};

/// Predictive mean and standard deviation of the latent function at the rows
/// of `Xnew`; with `full_cov` also the joint covariance.
inline Prediction predict(const GpFit& fit, const Matrix& Xnew, bool full_cov = false) {
  if (Xnew.cols() != fit.dim()) throw Error(ErrorCode::DimensionMismatch, "prediction inputs have wrong dimension");
  const Matrix kx = detail::cross_correlation(fit.X, Xnew, fit.lengthscales);  // n x m
  const Matrix v = fit.chol.triangularView<Eigen::Lower>().solve(kx);
  Prediction out;
  out.mean = (kx.transpose() * fit.alpha).array() * fit.y_sd + fit.y_mean;
  const double s2 = fit.scale * fit.y_sd * fit.y_sd;
  out.sd = ((1.0 - v.colwise().squaredNorm().array()).max(0.0) * s2).sqrt().transpose();
  if (full_cov) {
    Matrix c = detail::cross_correlation(Xnew, Xnew, fit.lengthscales);
    c.noalias() -= v.transpose() * v;
    c *= s2;
    out.cov = 0.5 * (c + c.transpose());
  }
  return out;
}

/// Single-point prediction without matrix temporaries for the inner loops.
inline void predict_point(const GpFit& fit, const Vector& x, double& mean, double& sd) {
  const Index n = fit.X.rows();
  Vector k(n);
  for (Index i = 0; i < n; ++i) k(i) = detail::correlation(fit.lengthscales, fit.X.row(i), x);
  mean = fit.y_mean + fit.y_sd * k.dot(fit.alpha);
  fit.chol.triangularView<Eigen::Lower>().solveInPlace(k);
  sd = fit.y_sd * std::sqrt(std::max(0.0, 1.0 - k.squaredNorm()) * fit.scale);
}

/// Lower Cholesky factor of a predictive covariance with diagonal jitter
/// escalating 1e-10, 1e-9, ..., 1e-6 (relative to the signal variance).
inline Matrix factor_covariance(const Matrix& cov, double signal_variance) {
  for (double jitter = 1e-10; jitter <= 1e-6 * (1.0 + 1e-9); jitter *= 10.0) {
    Matrix c = cov;
    c.diagonal().array() += jitter * signal_variance;
    Eigen::LLT<Matrix> llt(c);
    if (llt.info() == Eigen::Success) return llt.matrixL();
  }
  throw Error(ErrorCode::CovNotPSD, "predictive covariance not factorizable with jitter up to 1e-6");
}

/// n_draws joint draws of the latent process at the rows of Xnew (one draw
/// per row of the result).
inline Matrix sample_paths(const GpFit& fit, const Matrix& Xnew, Index n_draws, Rng& rng) {
  const Prediction p = predict(fit, Xnew, true);
  const Matrix L = factor_covariance(*p.cov, fit.signal_variance());
  const Index m = Xnew.rows();
  std::normal_distribution<double> z;
  Matrix out(n_draws, m);
  Vector e(m);
  for (Index r = 0; r < n_draws; ++r) {
    for (Index j = 0; j < m; ++j) e(j) = z(rng);
    out.row(r) = (p.mean + L * e).transpose();
  }
  return out;
}

inline Matrix sample_paths(const GpFit& fit, const Matrix& Xnew, Index n_draws, std::uint64_t seed) {
  Rng rng = make_rng(seed, 0x7473ull);
  return sample_paths(fit, Xnew, n_draws, rng);
}

}  // namespace tricands
