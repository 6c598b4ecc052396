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
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "oracles.hpp"
#include "tricands/harness.hpp"

using namespace tricands;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path fresh_dir(const std::string& name) {
  fs::path p = fs::temp_directory_path() / ("tricands_harness_" + name);
  fs::remove_all(p);
  return p;
}

ExperimentConfig small_config(const fs::path& out) {
  ExperimentConfig cfg;
  cfg.benchmark = "goldstein_price";
  cfg.strategies = {"EI-tri", "EI-lhs", "TS-tri"};
  cfg.n0 = 12;
  cfg.n_end = 16;
  cfg.candidate_cap = 50;
  cfg.repetitions = 2;
  cfg.base_seed = 100;
  cfg.output_dir = out.string();
  return cfg;
}

std::map<std::string, std::string> snapshot_csvs(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.path().extension() == ".csv") out[e.path().filename().string()] = slurp(e.path());
  return out;
}

RunFile synthetic(const std::string& s, Index rep, std::vector<double> bov, std::vector<std::size_t> evals) {
  RunFile f;
  f.strategy = s;
  f.rep = rep;
  f.bov = std::move(bov);
  f.cumulative_evals = std::move(evals);
  return f;
}

}  // namespace

TEST(Config, ParsesKeysCommentsAndOverrides) {
  std::istringstream in(
      "# experiment\n"
      "benchmark = hartmann6\n"
      "strategies = EI-tri, EI-lhs ,EI   # three\n"
      "\n"
      "n0=12\n n_end = 50\nrepetitions = 20\nn_sub_max = 600\nbase_seed = 7\noutput_dir = /tmp/x\njobs = 2\n");
  ExperimentConfig cfg = parse_config(in);
  EXPECT_EQ(cfg.benchmark, "hartmann6");
  EXPECT_EQ(cfg.strategies, (std::vector<std::string>{"EI-tri", "EI-lhs", "EI"}));
  EXPECT_EQ(cfg.n_end, 50);
  EXPECT_EQ(cfg.repetitions, 20);
  EXPECT_EQ(cfg.n_sub_max, 600);
  EXPECT_EQ(cfg.base_seed, 7u);
  EXPECT_EQ(cfg.jobs, 2);
  EXPECT_NO_THROW(cfg.validate());
  EXPECT_EQ(cfg.strategy("EI-tri").tricands_cap(6), 600);
  apply_setting(cfg, "repetitions", "3");
  EXPECT_EQ(cfg.repetitions, 3);
}

TEST(Config, LineDiagnostics) {
  std::istringstream bad_key("n0 = 12\n\nfoo = 1\n");
  try {
    parse_config(bad_key, "exp.cfg");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ConfigError);
    EXPECT_NE(std::string(e.what()).find("exp.cfg:3"), std::string::npos) << e.what();
  }
  std::istringstream no_eq("n0 12\n");
  EXPECT_THROW(parse_config(no_eq), Error);
  std::istringstream bad_int("n0 = twelve\n");
  EXPECT_THROW(parse_config(bad_int), Error);
}

TEST(Config, Validation) {
  ExperimentConfig cfg;
  cfg.repetitions = 0;
  EXPECT_THROW(cfg.validate(), Error);
  cfg = {};
  cfg.n0 = 50;
  EXPECT_THROW(cfg.validate(), Error);
  cfg = {};
  cfg.strategies = {"EI-tri", "UCB"};
  try {
    cfg.validate();
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ConfigError);
  }
  cfg = {};
  cfg.benchmark = "rosenbrock";
  EXPECT_THROW(cfg.validate(), Error);
  cfg = {};
  cfg.benchmark = "hartmann6";
  cfg.n0 = 6;
  EXPECT_THROW(cfg.validate(), Error);
}

TEST(Experiment, FilesResumeAndDeterminism) {
  const fs::path dir = fresh_dir("resume");
  ExperimentConfig cfg = small_config(dir);
  ExperimentResult r1 = run_experiment(cfg);
  EXPECT_EQ(r1.computed, 6u);
  EXPECT_EQ(r1.skipped, 0u);
  auto first = snapshot_csvs(dir);
  EXPECT_EQ(first.size(), 7u);
  EXPECT_TRUE(first.count("summary.csv"));
  EXPECT_TRUE(first.count("run_EI-lhs_r1.csv"));

  ExperimentResult r2 = run_experiment(cfg);
  EXPECT_EQ(r2.computed, 0u);
  EXPECT_EQ(r2.skipped, 6u);
  EXPECT_EQ(snapshot_csvs(dir), first);

  fs::remove(dir / "run_TS-tri_r0.csv");
  ExperimentResult r3 = run_experiment(cfg);
  EXPECT_EQ(r3.computed, 1u);
  EXPECT_EQ(snapshot_csvs(dir), first);

  // A truncated file (no end marker) is recomputed.
  {
    std::string s = first["run_EI-tri_r1.csv"];
    std::ofstream out(dir / "run_EI-tri_r1.csv", std::ios::binary | std::ios::trunc);
    out << s.substr(0, s.size() / 2);
  }
  ExperimentResult r4 = run_experiment(cfg);
  EXPECT_EQ(r4.computed, 1u);
  EXPECT_EQ(snapshot_csvs(dir), first);

  // Fresh directory and a worker pool give identical bytes.
  const fs::path dir2 = fresh_dir("resume2");
  ExperimentConfig cfg2 = cfg;
  cfg2.output_dir = dir2.string();
  cfg2.jobs = 3;
  run_experiment(cfg2);
  EXPECT_EQ(snapshot_csvs(dir2), first);
  fs::remove_all(dir);
  fs::remove_all(dir2);
}

TEST(Experiment, RunFileContentsAndPairedDesign) {
  const fs::path dir = fresh_dir("paired");
  ExperimentConfig cfg = small_config(dir);
  cfg.repetitions = 1;
  run_experiment(cfg);
  const std::string a = slurp(dir / "run_EI-tri_r0.csv");
  const std::string b = slurp(dir / "run_EI-lhs_r0.csv");
  EXPECT_EQ(a.rfind(kRunSchema, 0), 0u);
  EXPECT_NE(a.find("\n# end\n"), std::string::npos);
  auto rows = [](const std::string& s) {
    std::vector<std::string> out;
    std::istringstream in(s);
    std::string line;
    while (std::getline(in, line)) out.push_back(line);
    return out;
  };
  auto ra = rows(a), rb = rows(b);
  ASSERT_EQ(ra.size(), 3u + 16u + 1u);
  EXPECT_EQ(ra[2], "n,y,bov,criterion_evals,cumulative_evals,n_candidates,fallback,x1,x2");
  for (int i = 3; i < 3 + 12; ++i) EXPECT_EQ(ra[static_cast<std::size_t>(i)], rb[static_cast<std::size_t>(i)]);
  RunFile f;
  ASSERT_TRUE(read_run_csv(dir / "run_EI-tri_r0.csv", f));
  EXPECT_EQ(f.strategy, "EI-tri");
  EXPECT_EQ(f.seed, 100u);
  EXPECT_EQ(f.bov.size(), 16u);
  for (std::size_t i = 1; i < f.bov.size(); ++i) EXPECT_LE(f.bov[i], f.bov[i - 1]);
  EXPECT_EQ(f.cumulative_evals[11], 0u);
  EXPECT_GT(f.cumulative_evals[15], 0u);
  fs::remove_all(dir);
}

TEST(Summary, SingleRepetitionIsTheTrace) {
  std::vector<RunFile> recs = {synthetic("A", 0, {3, 2, 2, 1}, {0, 5, 10, 15})};
  auto rows = summarize(recs, {"A"});
  ASSERT_EQ(rows.size(), 4u);
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_EQ(rows[i].median, recs[0].bov[i]);
    EXPECT_EQ(rows[i].q1, recs[0].bov[i]);
    EXPECT_EQ(rows[i].whisker_hi, recs[0].bov[i]);
    EXPECT_EQ(rows[i].mean_cumulative_evals, static_cast<double>(recs[0].cumulative_evals[i]));
  }
}

TEST(Summary, QuartilesMatchSortOracleAndOrderFree) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> z;
  std::vector<RunFile> recs;
  for (Index rep = 0; rep < 17; ++rep) {
    for (const char* s : {"B", "A"}) {
      std::vector<double> bov;
      std::vector<std::size_t> ev;
      double b = 10.0;
      for (int n = 0; n < 8; ++n) {
        b = std::min(b, z(rng));
        bov.push_back(b);
        ev.push_back(static_cast<std::size_t>(n * (rep + 1)));
      }
      recs.push_back(synthetic(s, rep, bov, ev));
    }
  }
  recs.push_back(synthetic("A", 17, std::vector<double>(8, 50.0), std::vector<std::size_t>(8, 0)));  // outlier
  auto rows = summarize(recs, {"A", "B"});
  for (const auto& row : rows) {
    std::vector<double> v;
    for (const auto& r : recs)
      if (r.strategy == row.strategy) v.push_back(r.bov[static_cast<std::size_t>(row.n - 1)]);
    EXPECT_DOUBLE_EQ(row.median, oracle::quantile7(v, 0.5));
    EXPECT_DOUBLE_EQ(row.q1, oracle::quantile7(v, 0.25));
    EXPECT_DOUBLE_EQ(row.q3, oracle::quantile7(v, 0.75));
    const double iqr = row.q3 - row.q1;
    double hi = -1e300;
    for (double x : v)
      if (x <= row.q3 + 1.5 * iqr) hi = std::max(hi, x);
    EXPECT_EQ(row.whisker_hi, hi);
    if (row.strategy == "A") EXPECT_LT(row.whisker_hi, 50.0);
  }
  std::ostringstream s1, s2;
  write_summary_csv(s1, rows);
  std::shuffle(recs.begin(), recs.end(), rng);
  write_summary_csv(s2, summarize(recs, {"A", "B"}));
  EXPECT_EQ(s1.str(), s2.str());
}

TEST(Summary, MissingStrategy) {
  std::vector<RunFile> recs = {synthetic("A", 0, {1}, {0})};
  try {
    summarize(recs, {"A", "C"});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::MissingStrategy);
  }
  EXPECT_THROW(summarize({}), Error);
}

TEST(Measure, EulerCountAndColumns) {
  auto rows = measure_candidates({2, 3}, {10, 30, 60}, 2, 11);
  EXPECT_EQ(rows.size(), 12u);
  for (const auto& r : rows) {
    EXPECT_EQ(r.N, r.n_T + r.n_F);
    EXPECT_GE(r.millis, 0.0);
    if (r.d == 2) {
      // Rebuild the same design to count hull vertices.
      const std::uint64_t stream = (std::uint64_t{2} << 40) ^ (static_cast<std::uint64_t>(r.n) << 20) ^
                                   static_cast<std::uint64_t>(r.rep);
      Rng rng = make_rng(11, stream);
      const Matrix X = uniform_matrix(r.n, 2, rng);
      const Index h = static_cast<Index>(convex_hull(X).hull_vertices.size());
      EXPECT_EQ(r.n_T, 2 * r.n - 2 - h);
      EXPECT_EQ(r.n_F, h);
    }
  }
  std::ostringstream os;
  write_measure_csv(os, rows);
  EXPECT_NE(os.str().find("d,n,rep,n_T,n_F,N,millis\n"), std::string::npos);
  EXPECT_THROW(measure_candidates({}, {10}, 1, 0), Error);
}
