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

// Acquisition criteria (expected improvement, Thompson sampling) and the inner
// searches over them: discrete argmax over a candidate set, multistart local
// ascent, and a hybrid of the two. Every search reports how many times the
// criterion was evaluated.

#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>

#include "tricands/error.hpp"
#include "tricands/nelder_mead.hpp"
#include "tricands/surrogate.hpp"
#include "tricands/types.hpp"

namespace tricands {

/// EI is zero at or below this predictive sd.
inline constexpr double kSdFloor = 1e-12;

inline double normal_pdf(double z) { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * M_PI); }
inline double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

/// Expected improvement below f_min of a normal(mu, sd^2) response:
/// (f_min - mu) Phi(z) + sd phi(z), z = (f_min - mu) / sd.
inline double ei(double mu, double sd, double f_min) {
  if (!(sd > kSdFloor)) return 0.0;
  const double diff = f_min - mu;
  const double z = diff / sd;
  return std::max(0.0, diff * normal_cdf(z) + sd * normal_pdf(z));
}

/// Shared tally of criterion evaluations.
struct EvalCounter {
  std::size_t count = 0;

  double ei(double mu, double sd, double f_min) {
    ++count;
    return tricands::ei(mu, sd, f_min);
  }
};

struct AcqResult {
  Vector x_next;
  double criterion_value = 0.0;
  std::size_t n_criterion_evals = 0;
  std::string method;
  bool converged = true;
  Index candidate_index = -1;  // row of the winning candidate, if any
};

/// Exhaustive EI over the rows of `cands`; ties go to the lower predictive
/// mean, then the lower index.
inline AcqResult argmax_ei_candidates(const GpFit& fit, const DesignState& data, const Matrix& cands) {
  if (cands.rows() < 1) throw Error(ErrorCode::EmptyCandidates, "no candidates");
  const Prediction p = predict(fit, cands);
  EvalCounter counter;
  AcqResult res;
  res.method = "ei-candidates";
  double best_ei = -1.0;
  double best_mu = std::numeric_limits<double>::infinity();
  for (Index i = 0; i < cands.rows(); ++i) {
    const double v = counter.ei(p.mean(i), p.sd(i), data.f_min);
    if (v > best_ei || (v == best_ei && p.mean(i) < best_mu)) {
      best_ei = v;
      best_mu = p.mean(i);
      res.candidate_index = i;
    }
  }
  res.x_next = cands.row(res.candidate_index).transpose();
  res.criterion_value = best_ei;
  res.n_criterion_evals = counter.count;
  return res;
}

inline AcqResult argmax_ei_candidates(const GpFit& fit, const DesignState& data, const CandidateSet& cands) {
  return argmax_ei_candidates(fit, data, cands.points);
}

/// Thompson sampling: one joint predictive draw over the candidates, minimized.
/// The draw counts as one criterion evaluation per candidate.
inline AcqResult ts_candidates(const GpFit& fit, const Matrix& cands, std::uint64_t seed) {
  if (cands.rows() < 1) throw Error(ErrorCode::EmptyCandidates, "no candidates");
  const Matrix draw = sample_paths(fit, cands, 1, seed);
  Index arg = 0;
  draw.row(0).minCoeff(&arg);
  AcqResult res;
  res.method = "ts-candidates";
  res.candidate_index = arg;
  res.x_next = cands.row(arg).transpose();
  res.criterion_value = draw(0, arg);
  res.n_criterion_evals = static_cast<std::size_t>(cands.rows());
  return res;
}

inline AcqResult ts_candidates(const GpFit& fit, const CandidateSet& cands, std::uint64_t seed) {
  return ts_candidates(fit, cands.points, seed);
}

/// Settings of the local EI ascent (box-projected Nelder-Mead on [0,1]^d).
struct LocalSearchOptions {
  double initial_step = 0.1;
  double ftol = 1e-10;
  double xtol = 1e-6;
  std::size_t max_evals_per_dim = 200;
};

namespace detail {

inline NelderMeadOptions local_nm_options(Index d, const LocalSearchOptions& o) {
  NelderMeadOptions nm;
  nm.initial_step = o.initial_step;
  nm.ftol = o.ftol;
  nm.xtol = o.xtol;
  nm.max_evals = o.max_evals_per_dim * static_cast<std::size_t>(d);
  nm.lower = Vector::Zero(d);
  nm.upper = Vector::Ones(d);
  return nm;
}

}  // namespace detail

/// Multistart local maximization of EI. Starts are the rows of `starts` when
/// given, otherwise n_starts uniform points drawn from `seed`.
inline AcqResult multistart_local_ei(const GpFit& fit, const DesignState& data, Index n_starts,
                                     const std::optional<Matrix>& starts, std::uint64_t seed,
                                     const LocalSearchOptions& opts = {}) {
  const Index d = fit.dim();
  Matrix x0;
  if (starts) {
    x0 = *starts;
  } else {
    if (n_starts < 1) throw Error(ErrorCode::ConfigError, "n_starts must be >= 1");
    Rng rng = make_rng(seed, 0x6d73ull);
    x0 = uniform_matrix(n_starts, d, rng);
  }
  EvalCounter counter;
  auto neg_ei = [&](const Vector& x) {
    double mu, sd;
    predict_point(fit, x, mu, sd);
    return -counter.ei(mu, sd, data.f_min);
  };
  const NelderMeadOptions nm = detail::local_nm_options(d, opts);
  AcqResult res;
  res.method = "ei-multistart";
  res.criterion_value = -1.0;
  res.converged = true;
  for (Index s = 0; s < x0.rows(); ++s) {
    NelderMeadResult r = nelder_mead(neg_ei, x0.row(s).transpose(), nm);
    res.converged = res.converged && r.converged;
    if (-r.value > res.criterion_value) {
      res.criterion_value = -r.value;
      res.x_next = r.x;
    }
  }
  res.n_criterion_evals = counter.count;
  return res;
}

/// Candidate argmax followed by one local ascent from the winner; the better
/// point is returned and evaluation counts are summed.
inline AcqResult hybrid_ei(const GpFit& fit, const DesignState& data, const Matrix& cands,
                           std::uint64_t seed, const LocalSearchOptions& opts = {}) {
  AcqResult disc = argmax_ei_candidates(fit, data, cands);
  Matrix start = disc.x_next.transpose();
  AcqResult local = multistart_local_ei(fit, data, 1, start, seed, opts);
  AcqResult res = local.criterion_value > disc.criterion_value ? local : disc;
  res.method = "ei-hybrid";
  res.candidate_index = disc.candidate_index;
  res.converged = local.converged;
  res.n_criterion_evals = disc.n_criterion_evals + local.n_criterion_evals;
  return res;
}

inline AcqResult hybrid_ei(const GpFit& fit, const DesignState& data, const CandidateSet& cands,
                           std::uint64_t seed, const LocalSearchOptions& opts = {}) {
  return hybrid_ei(fit, data, cands.points, seed, opts);
}

}  // namespace tricands
