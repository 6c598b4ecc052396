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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "tricands/optimizer.hpp"

using namespace tricands;

namespace {

// Kolmogorov-Smirnov statistic of a sample against U(0,1).
double ks_uniform(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const double n = static_cast<double>(v.size());
  double dmax = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    dmax = std::max(dmax, std::max((i + 1) / n - v[i], v[i] - i / n));
  }
  return dmax;
}

void expect_record_invariants(const RunRecord& r, Index n0, Index n_end) {
  ASSERT_EQ(static_cast<Index>(r.bov_trace.size()), n_end - n0);
  ASSERT_EQ(r.X_final.rows(), n_end);
  ASSERT_EQ(r.Y_final.size(), n_end);
  for (std::size_t i = 1; i < r.bov_trace.size(); ++i) EXPECT_LE(r.bov_trace[i], r.bov_trace[i - 1]);
  EXPECT_EQ(r.bov_trace.back(), r.Y_final.minCoeff());
  EXPECT_EQ(r.criterion_evals_total, std::accumulate(r.per_acq_evals.begin(), r.per_acq_evals.end(), std::size_t{0}));
  EXPECT_EQ(static_cast<Index>(r.per_acq_evals.size()), n_end - n0);
  EXPECT_EQ(static_cast<Index>(r.wall_times.size()), n_end - n0);
  EXPECT_TRUE((r.X_final.array() >= 0.0).all() && (r.X_final.array() <= 1.0).all());
}

}  // namespace

TEST(InitDesign, ShapeBoxAndDeterminism) {
  Matrix a = init_design(2, 12, 5);
  EXPECT_EQ(a.rows(), 12);
  EXPECT_EQ(a.cols(), 2);
  EXPECT_TRUE((a.array() >= 0.0).all() && (a.array() <= 1.0).all());
  EXPECT_EQ(a, init_design(2, 12, 5));
  EXPECT_NE(a, init_design(2, 12, 6));
  EXPECT_THROW(init_design(3, 3, 0), Error);
}

TEST(InitDesign, UniformMarginalsKs) {
  std::vector<double> pooled0, pooled1;
  for (std::uint64_t s = 0; s < 1000; ++s) {
    Matrix x = init_design(2, 10, s);
    for (Index i = 0; i < 10; ++i) {
      pooled0.push_back(x(i, 0));
      pooled1.push_back(x(i, 1));
    }
  }
  const double crit = 1.628 / std::sqrt(static_cast<double>(pooled0.size()));  // alpha = 0.01
  EXPECT_LT(ks_uniform(pooled0), crit);
  EXPECT_LT(ks_uniform(pooled1), crit);
}

TEST(Strategy, ParseAndNames) {
  for (const auto& [kind, name] : strategy_names()) {
    Strategy s = Strategy::parse(name, 50);
    EXPECT_EQ(s.kind, kind);
    EXPECT_EQ(s.name(), name);
    EXPECT_EQ(s.cap(2), 50);
  }
  EXPECT_EQ(Strategy::parse("EI-tri").cap(6), 600);
  try {
    Strategy::parse("UCB");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::UnknownStrategy);
  }
}

TEST(RunBo, BudgetAndCandidateCapOnGoldsteinPrice) {
  const Benchmark& gp = get_benchmark("goldstein_price");
  RunRecord r = run_bo(gp, Strategy::parse("EI-tri", 50), 12, 30, 1);
  expect_record_invariants(r, 12, 30);
  for (Index c : r.n_candidates) {
    EXPECT_LE(c, 50);
    EXPECT_GE(c, 1);
  }
  for (std::size_t i = 0; i < r.per_acq_evals.size(); ++i)
    EXPECT_EQ(r.per_acq_evals[i], static_cast<std::size_t>(r.n_candidates[i]));
  for (Index i = 0; i < r.Y_final.size(); ++i) EXPECT_EQ(r.Y_final(i), gp(r.X_final.row(i).transpose()));
}

TEST(RunBo, FullBudgetArithmetic) {
  RunRecord r = run_bo(get_benchmark("goldstein_price"), Strategy::parse("EI-lhs", 50), 12, 50, 2);
  expect_record_invariants(r, 12, 50);
  EXPECT_EQ(r.bov_trace.size(), 38u);
}

TEST(RunBo, AllStrategiesShareInitialDesign) {
  const Benchmark& gp = get_benchmark("goldstein_price");
  Matrix first;
  for (const auto& [kind, name] : strategy_names()) {
    RunRecord r = run_bo(gp, Strategy::parse(name, 50), 12, 16, 77);
    expect_record_invariants(r, 12, 16);
    EXPECT_EQ(r.strategy, name);
    if (first.size() == 0) first = r.X_final.topRows(12);
    EXPECT_EQ(r.X_final.topRows(12), first) << name;
  }
}

TEST(RunBo, DeterministicPerSeed) {
  const Benchmark& gp = get_benchmark("goldstein_price");
  for (const char* name : {"EI-tri", "TS-tri", "EI", "EI-hyb"}) {
    RunRecord a = run_bo(gp, Strategy::parse(name, 50), 12, 18, 3);
    RunRecord b = run_bo(gp, Strategy::parse(name, 50), 12, 18, 3);
    EXPECT_EQ(a.X_final, b.X_final) << name;
    EXPECT_EQ(a.per_acq_evals, b.per_acq_evals) << name;
  }
}

TEST(RunBo, MultistartUsesMoreEvaluations) {
  const Benchmark& gp = get_benchmark("goldstein_price");
  RunRecord tri = run_bo(gp, Strategy::parse("EI-tri", 50), 12, 20, 4);
  RunRecord ms = run_bo(gp, Strategy::parse("EI", 50), 12, 20, 4);
  EXPECT_GT(ms.criterion_evals_total, 2 * tri.criterion_evals_total);
}

TEST(RunBo, HartmannTricandsDefaultCap) {
  RunRecord r = run_bo(get_benchmark("hartmann6"), Strategy::parse("EI-tri"), 12, 16, 8);
  expect_record_invariants(r, 12, 16);
  for (Index c : r.n_candidates) EXPECT_LE(c, 600);
}

TEST(RunBo, DuplicateJitter) {
  Matrix X(2, 2);
  X << 0.2, 0.3, 0.5, 0.5;
  Vector x(2);
  x << 0.5, 0.5;
  Vector y = detail::dejitter(X, x, 1);
  EXPECT_GT((y - x).norm(), 1e-9);
  EXPECT_LE((y - x).cwiseAbs().maxCoeff(), 1e-6);
  Vector z(2);
  z << 0.9, 0.1;
  EXPECT_EQ(detail::dejitter(X, z, 1), z);
  Vector corner(2);
  corner << 1.0, 1.0;
  Matrix Xc = corner.transpose();
  Vector w = detail::dejitter(Xc, corner, 2);
  EXPECT_TRUE((w.array() <= 1.0).all());
  EXPECT_GT((w - corner).norm(), 1e-9);
}

TEST(RunBo, GeometryFailuresAreRecoverable) {
  EXPECT_TRUE(detail::is_geometry_failure(Error(ErrorCode::TriangulationFailed, "")));
  EXPECT_TRUE(detail::is_geometry_failure(Error(ErrorCode::DegenerateInput, "")));
  EXPECT_FALSE(detail::is_geometry_failure(Error(ErrorCode::FitFailed, "")));
}

TEST(RunBo, BadBudget) {
  EXPECT_THROW(run_bo(get_benchmark("goldstein_price"), Strategy::parse("EI-tri"), 12, 10, 0), Error);
}

TEST(RawNelderMead, ConvexBowl) {
  auto bowl = [](const Vector& x) { return (x.array() - 0.3).square().sum() + 1.5; };
  for (std::uint64_t s = 0; s < 5; ++s) {
    int calls = 0;
    auto counted = [&](const Vector& x) {
      ++calls;
      return bowl(x);
    };
    RunRecord r = run_raw_neldermead(counted, 2, 12, 50, s);
    EXPECT_EQ(calls, 50);
    expect_record_invariants(r, 12, 50);
    EXPECT_LE(r.bov_trace.back() - 1.5, 1e-3) << "seed " << s;
  }
}

TEST(RawNelderMead, DeterministicAndExactBudgetWithRestarts) {
  auto bowl = [](const Vector& x) { return (x.array() - 0.3).square().sum(); };
  for (bool tight : {false, true}) {
    int calls = 0;
    auto counted = [&](const Vector& x) {
      ++calls;
      return bowl(x);
    };
    // Large budget forces converged local searches and restarts.
    RunRecord a = run_raw_neldermead(counted, 2, 12, 400, 9, tight);
    RunRecord b = run_raw_neldermead(bowl, 2, 12, 400, 9, tight);
    EXPECT_EQ(calls, 400);
    EXPECT_EQ(a.X_final, b.X_final);
    EXPECT_EQ(a.criterion_evals_total, 0u);
  }
}
