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

// tricands_cli: experiments, summaries, candidate sweeps and dumps.
// Exit codes: 0 ok, 2 configuration/usage error, 3 runtime failure.

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tricands/harness.hpp"

namespace {

using namespace tricands;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

bool is_config_error(ErrorCode c) {
  switch (c) {
    case ErrorCode::ConfigError:
    case ErrorCode::UnknownBenchmark:
    case ErrorCode::UnknownStrategy:
      return true;
    default:
      return false;
  }
}

/// Numeric rows of a CSV file; a non-numeric first line is taken as a header.
Matrix read_numeric_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open '" + path + "'");
  std::vector<std::vector<double>> rows;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string field;
    bool ok = true;
    while (std::getline(ss, field, ',')) {
      try {
        std::size_t used = 0;
        row.push_back(std::stod(field, &used));
        if (detail::trim(field.substr(used)).size() != 0) ok = false;
      } catch (const std::exception&) {
        ok = false;
      }
    }
    if (!ok) {
      if (rows.empty()) continue;  // header
      throw Error(ErrorCode::IoError, path + ":" + std::to_string(lineno) + ": non-numeric field");
    }
    if (!rows.empty() && row.size() != rows.front().size())
      throw Error(ErrorCode::IoError, path + ":" + std::to_string(lineno) + ": inconsistent column count");
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw Error(ErrorCode::IoError, "no data rows in '" + path + "'");
  Matrix m(static_cast<Index>(rows.size()), static_cast<Index>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t k = 0; k < rows[i].size(); ++k) m(static_cast<Index>(i), static_cast<Index>(k)) = rows[i][k];
  return m;
}

template <class Write>
void emit(const std::string& out_path, Write write) {
  if (out_path.empty() || out_path == "-") {
    write(std::cout);
    return;
  }
  std::ofstream out(out_path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot write '" + out_path + "'");
  write(out);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Triangulation candidates for Bayesian optimization"};
  app.require_subcommand(1);

  // run
  auto* run = app.add_subcommand("run", "Run a Monte Carlo experiment from a config file");
  std::string config_path;
  std::optional<Index> reps;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  std::optional<Index> jobs;
  std::vector<std::string> overrides;
  bool quiet = false;
  run->add_option("config", config_path, "key = value experiment file")->required();
  run->add_option("--reps", reps, "Number of repetitions");
  run->add_option("--seed", seed, "Base seed (repetition r uses seed + r)");
  run->add_option("--out", out_dir, "Output directory");
  run->add_option("--jobs", jobs, "Worker threads");
  run->add_option("--set", overrides, "Override any config key (key=value)");
  run->add_flag("--quiet", quiet, "No per-run progress on stderr");

  // measure
  auto* measure = app.add_subcommand("measure", "Tricands counts and timing over d and n");
  std::vector<Index> d_list{2, 3, 4, 5, 6};
  std::vector<Index> n_list{10, 25, 50, 100, 150, 200};
  Index measure_reps = 3;
  std::uint64_t measure_seed = 0;
  std::string measure_out;
  measure->add_option("--d", d_list, "Input dimensions")->delimiter(',');
  measure->add_option("--n", n_list, "Design sizes")->delimiter(',');
  measure->add_option("--reps", measure_reps, "Designs per (d, n)");
  measure->add_option("--seed", measure_seed, "Seed");
  measure->add_option("--out", measure_out, "Output CSV (default stdout)");

  // summarize
  auto* summarize_cmd = app.add_subcommand("summarize", "Summarize run files in a directory");
  std::string sum_dir;
  std::vector<std::string> sum_strategies;
  std::string sum_out;
  summarize_cmd->add_option("dir", sum_dir, "Directory holding run_*.csv")->required();
  summarize_cmd->add_option("--strategies", sum_strategies, "Strategies, in output order")->delimiter(',');
  summarize_cmd->add_option("--out", sum_out, "Output CSV (default stdout)");

  // list-benchmarks
  auto* list = app.add_subcommand("list-benchmarks", "List registered objectives");

  // candidates
  auto* cands = app.add_subcommand("candidates", "Tricands for a design CSV");
  std::string design_path;
  Index nsub = 0;
  std::uint64_t cand_seed = 0;
  std::optional<Index> best;
  bool y_column = false;
  std::string cand_out;
  cands->add_option("design", design_path, "CSV of design rows in [0,1]^d")->required();
  cands->add_option("--nsub", nsub, "Subsample cap (default 100 d)");
  cands->add_option("--seed", cand_seed, "Seed");
  cands->add_option("--best", best, "Row index of the best design point (0-based)");
  cands->add_flag("--y-column", y_column, "Last column is the response; best = its argmin");
  cands->add_option("--out", cand_out, "Output CSV (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*run) {
      ExperimentConfig cfg = load_config(config_path);
      for (const auto& kv : overrides) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw Error(ErrorCode::ConfigError, "--set expects key=value, got '" + kv + "'");
        apply_setting(cfg, kv.substr(0, eq), kv.substr(eq + 1));
      }
      if (reps) cfg.repetitions = *reps;
      if (seed) cfg.base_seed = *seed;
      if (out_dir) cfg.output_dir = *out_dir;
      if (jobs) cfg.jobs = *jobs;
      ExperimentResult res = run_experiment(cfg, quiet ? nullptr : &std::cerr);
      std::cout << "computed " << res.computed << ", reused " << res.skipped << ", summary "
                << (std::filesystem::path(cfg.output_dir) / "summary.csv").string() << '\n';
      for (const auto& row : res.summary) {
        if (row.n == cfg.n_end)
          std::cout << row.strategy << ": median BOV " << std::setprecision(6) << row.median << ", mean evals "
                    << row.mean_cumulative_evals << '\n';
      }
    } else if (*measure) {
      auto rows = measure_candidates(d_list, n_list, measure_reps, measure_seed, &std::cerr);
      emit(measure_out, [&](std::ostream& os) { write_measure_csv(os, rows); });
    } else if (*summarize_cmd) {
      auto files = load_run_files(sum_dir);
      auto rows = sum_strategies.empty() ? summarize(files) : summarize(files, sum_strategies);
      emit(sum_out, [&](std::ostream& os) { write_summary_csv(os, rows); });
    } else if (*list) {
      for (const auto& b : benchmark_registry()) {
        std::cout << b.name << "\td=" << b.d;
        if (b.known_min_value) std::cout << "\tmin=" << std::setprecision(10) << *b.known_min_value;
        std::cout << '\n';
      }
    } else if (*cands) {
      Matrix m = read_numeric_csv(design_path);
      Matrix X = y_column ? Matrix(m.leftCols(m.cols() - 1)) : m;
      if (X.cols() < 1) throw Error(ErrorCode::ConfigError, "design has no input columns");
      std::optional<Index> best_index = best;
      if (y_column && !best_index) {
        Index arg;
        m.col(m.cols() - 1).minCoeff(&arg);
        best_index = arg;
      }
      SubsampleConfig cfg = SubsampleConfig::defaults(X.cols(), cand_seed);
      if (nsub > 0) cfg.n_sub_max = nsub;
      CandidateSet c = generate_tricands(X, cfg, best_index);
      emit(cand_out, [&](std::ostream& os) { write_candidates_csv(os, c); });
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return is_config_error(e.code()) ? kExitConfig : kExitRuntime;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitOk;
}
