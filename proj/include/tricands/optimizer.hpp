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

// Bayesian-optimization outer loop (fit, acquire, evaluate, append) and the
// surrogate-free Nelder-Mead baselines.

#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "tricands/acquisition.hpp"
#include "tricands/benchfn.hpp"
#include "tricands/candidates.hpp"
#include "tricands/error.hpp"
#include "tricands/nelder_mead.hpp"
#include "tricands/surrogate.hpp"
#include "tricands/types.hpp"

namespace tricands {

enum class StrategyKind { EiTri, EiLhs, EiMultistart, EiHyb, TsTri, TsLhs, NelderMeadRaw, LbfgsRawEquivalent };

inline const std::vector<std::pair<StrategyKind, std::string>>& strategy_names() {
  static const std::vector<std::pair<StrategyKind, std::string>> names = {
      {StrategyKind::EiTri, "EI-tri"},
      {StrategyKind::EiLhs, "EI-lhs"},
      {StrategyKind::EiMultistart, "EI"},
      {StrategyKind::EiHyb, "EI-hyb"},
      {StrategyKind::TsTri, "TS-tri"},
      {StrategyKind::TsLhs, "TS-lhs"},
      {StrategyKind::NelderMeadRaw, "NelderMead-raw"},
      {StrategyKind::LbfgsRawEquivalent, "LBFGS-raw-equivalent"},
  };
  return names;
}

inline std::string to_string(StrategyKind k) {
  for (const auto& [kind, name] : strategy_names())
    if (kind == k) return name;
  return "unknown";
}

struct Strategy {
  StrategyKind kind = StrategyKind::EiTri;
  Index candidate_cap = 0;  // 0 means 100 * d
  Index n_starts = 5;
  Index n_sub_max = 0;      // tricands-only cap; 0 means candidate_cap

  std::string name() const { return to_string(kind); }

  bool uses_tricands() const {
    return kind == StrategyKind::EiTri || kind == StrategyKind::EiHyb || kind == StrategyKind::TsTri;
  }
  bool uses_lhs() const { return kind == StrategyKind::EiLhs || kind == StrategyKind::TsLhs; }
  bool is_raw() const { return kind == StrategyKind::NelderMeadRaw || kind == StrategyKind::LbfgsRawEquivalent; }

  Index cap(Index d) const { return candidate_cap > 0 ? candidate_cap : 100 * d; }
  Index tricands_cap(Index d) const { return n_sub_max > 0 ? n_sub_max : cap(d); }

  static Strategy parse(const std::string& name, Index candidate_cap = 0, Index n_starts = 5) {
    for (const auto& [kind, n] : strategy_names())
      if (n == name) return Strategy{kind, candidate_cap, n_starts, 0};
    throw Error(ErrorCode::UnknownStrategy, "unknown strategy '" + name + "'");
  }
};

struct RunRecord {
  std::string strategy;
  std::uint64_t seed = 0;
  Index n0 = 0;
  Index n_end = 0;
  std::vector<double> bov_trace;  // f_min after evaluation n0+1 .. n_end
  Matrix X_final;
  Vector Y_final;
  std::vector<std::size_t> per_acq_evals;
  std::size_t criterion_evals_total = 0;
  std::vector<Index> n_candidates;       // per acquisition, 0 when none
  std::vector<Index> fallback_iterations;  // acquisitions that fell back to LHS
  std::vector<double> wall_times;        // seconds per acquisition
};

using Objective = std::function<double(const Vector&)>;

/// Distinct streams so that strategies sharing a seed share the initial design
/// but nothing else.
enum class SeedPurpose : std::uint64_t { Design = 1, Fit = 2, Candidates = 3, Acquire = 4, Jitter = 5, Restart = 6 };

inline std::uint64_t derive_seed(std::uint64_t seed, Index iteration, SeedPurpose purpose) {
  Rng rng = make_rng(seed, (static_cast<std::uint64_t>(iteration) << 8) | static_cast<std::uint64_t>(purpose));
  return rng();
}

/// n0 i.i.d. uniform points in [0,1]^d.
inline Matrix init_design(Index d, Index n0, std::uint64_t seed) {
  if (d < 1) throw Error(ErrorCode::DimensionTooSmall, "dimension must be >= 1");
  if (n0 < d + 1) throw Error(ErrorCode::TooFewPoints, "initial design needs at least d+1 points");
  Rng rng = make_rng(seed, static_cast<std::uint64_t>(SeedPurpose::Design));
  return uniform_matrix(n0, d, rng);
}

/// Distance below which an acquisition counts as a repeat of a design point.
inline constexpr double kDuplicateRadius = 1e-9;
inline constexpr double kDuplicateJitter = 1e-6;

namespace detail {

inline bool is_geometry_failure(const Error& e) {
  switch (e.code()) {
    case ErrorCode::TriangulationFailed:
    case ErrorCode::DegenerateInput:
    case ErrorCode::DegenerateSimplex:
    case ErrorCode::NormalDegenerate:
    case ErrorCode::EmptyCandidates:
      return true;
    default:
      return false;
  }
}

inline Vector dejitter(const Matrix& X, Vector x, std::uint64_t seed) {
  Rng rng = make_rng(seed);
  while (near_any_row(X, x, kDuplicateRadius)) {
    for (Index k = 0; k < x.size(); ++k)
      x(k) = std::clamp(x(k) + kDuplicateJitter * (2.0 * uniform01(rng) - 1.0), 0.0, 1.0);
  }
  return x;
}

inline std::vector<double> bov_from(const Vector& Y, Index n0) {
  std::vector<double> trace;
  double best = Y.head(n0).minCoeff();
  for (Index i = n0; i < Y.size(); ++i) {
    best = std::min(best, Y(i));
    trace.push_back(best);
  }
  return trace;
}

}  // namespace detail

inline RunRecord run_raw_neldermead(const Objective& f, Index d, Index n0, Index n_end, std::uint64_t seed,
                                    bool tight = false);

/// One BO run of `strategy` on `f` over [0,1]^d, n_end - n0 acquisitions.
inline RunRecord run_bo(const Objective& f, Index d, const Strategy& strategy, Index n0, Index n_end,
                        std::uint64_t seed, const GpFitSettings& fit_base = {}) {
  if (n_end < n0) throw Error(ErrorCode::ConfigError, "n_end must be >= n0");
  if (strategy.is_raw())
    return run_raw_neldermead(f, d, n0, n_end, seed, strategy.kind == StrategyKind::LbfgsRawEquivalent);
  if (strategy.candidate_cap < 0 || strategy.n_sub_max < 0) throw Error(ErrorCode::ConfigError, "candidate_cap must be >= 1");

  Matrix X0 = init_design(d, n0, seed);
  Vector Y0(n0);
  for (Index i = 0; i < n0; ++i) Y0(i) = f(X0.row(i).transpose());
  DesignState data(X0, Y0);

  RunRecord rec;
  rec.strategy = strategy.name();
  rec.seed = seed;
  rec.n0 = n0;
  rec.n_end = n_end;
  const Index cap = strategy.cap(d);

  for (Index it = 0; it < n_end - n0; ++it) {
    const auto t0 = std::chrono::steady_clock::now();
    GpFitSettings fs = fit_base;
    fs.seed = derive_seed(seed, it, SeedPurpose::Fit);
    const GpFit fit = fit_gp(data, fs);

    const std::uint64_t cand_seed = derive_seed(seed, it, SeedPurpose::Candidates);
    const std::uint64_t acq_seed = derive_seed(seed, it, SeedPurpose::Acquire);
    Matrix cands;
    if (strategy.uses_tricands()) {
      try {
        SubsampleConfig cfg;
        cfg.n_sub_max = strategy.tricands_cap(d);
        cfg.seed = cand_seed;
        cands = generate_tricands(data.X, cfg, data.best_index).points;
        if (cands.rows() == 0) throw Error(ErrorCode::EmptyCandidates, "no tricands");
      } catch (const Error& e) {
        if (!detail::is_geometry_failure(e)) throw;
        rec.fallback_iterations.push_back(it);
        cands = lhs_candidates(strategy.tricands_cap(d), d, cand_seed);
      }
    } else if (strategy.uses_lhs()) {
      cands = lhs_candidates(cap, d, cand_seed);
    }

    AcqResult acq;
    switch (strategy.kind) {
      case StrategyKind::EiTri:
      case StrategyKind::EiLhs:
        acq = argmax_ei_candidates(fit, data, cands);
        break;
      case StrategyKind::TsTri:
      case StrategyKind::TsLhs:
        acq = ts_candidates(fit, cands, acq_seed);
        break;
      case StrategyKind::EiHyb:
        acq = hybrid_ei(fit, data, cands, acq_seed);
        break;
      case StrategyKind::EiMultistart:
        acq = multistart_local_ei(fit, data, strategy.n_starts, std::nullopt, acq_seed);
        break;
      default:
        throw Error(ErrorCode::UnknownStrategy, "not a BO strategy");
    }

    const Vector x = detail::dejitter(data.X, acq.x_next, derive_seed(seed, it, SeedPurpose::Jitter));
    data.append(x, f(x));
    rec.per_acq_evals.push_back(acq.n_criterion_evals);
    rec.criterion_evals_total += acq.n_criterion_evals;
    rec.n_candidates.push_back(cands.rows());
    rec.wall_times.push_back(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  }
  rec.X_final = data.X;
  rec.Y_final = data.Y;
  rec.bov_trace = detail::bov_from(data.Y, n0);
  return rec;
}

inline RunRecord run_bo(const Benchmark& bench, const Strategy& strategy, Index n0, Index n_end, std::uint64_t seed,
                        const GpFitSettings& fit_base = {}) {
  return run_bo([&](const Vector& x) { return bench(x); }, bench.d, strategy, n0, n_end, seed, fit_base);
}

/// Surrogate-free baseline: evaluate the same initial design as run_bo, then
/// box-projected Nelder-Mead from the best point, restarting from uniform
/// points whenever a local search converges, until exactly n_end objective
/// evaluations are spent. `tight` selects the stricter local tolerances.
inline RunRecord run_raw_neldermead(const Objective& f, Index d, Index n0, Index n_end, std::uint64_t seed, bool tight) {
  if (n_end < n0) throw Error(ErrorCode::ConfigError, "n_end must be >= n0");
  RunRecord rec;
  rec.strategy = tight ? "LBFGS-raw-equivalent" : "NelderMead-raw";
  rec.seed = seed;
  rec.n0 = n0;
  rec.n_end = n_end;

  Matrix X = init_design(d, n0, seed);
  X.conservativeResize(n_end, Eigen::NoChange);
  Vector Y(n_end);
  Index used = 0;
  auto t_last = std::chrono::steady_clock::now();
  auto evaluate = [&](const Vector& x) {
    X.row(used) = x.transpose();
    Y(used) = f(x);
    if (used >= n0) {
      const auto now = std::chrono::steady_clock::now();
      rec.wall_times.push_back(std::chrono::duration<double>(now - t_last).count());
      t_last = now;
      rec.per_acq_evals.push_back(0);
      rec.n_candidates.push_back(0);
    }
    return Y(used++);
  };
  for (Index i = 0; i < n0; ++i) evaluate(X.row(i).transpose());

  NelderMeadOptions nm;
  nm.lower = Vector::Zero(d);
  nm.upper = Vector::Ones(d);
  nm.initial_step = tight ? 0.05 : 0.1;
  nm.ftol = tight ? 1e-12 : 1e-8;
  nm.xtol = tight ? 1e-9 : 1e-6;

  Rng rng = make_rng(seed, static_cast<std::uint64_t>(SeedPurpose::Restart));
  Index best = 0;
  Y.head(n0).minCoeff(&best);
  Vector start = X.row(best).transpose();
  while (used < n_end) {
    nm.max_evals = static_cast<std::size_t>(n_end - used);
    nelder_mead(evaluate, start, nm);
    start = uniform_matrix(1, d, rng).row(0).transpose();
  }
  rec.X_final = X;
  rec.Y_final = Y;
  rec.bov_trace = detail::bov_from(Y, n0);
  return rec;
}

}  // namespace tricands
