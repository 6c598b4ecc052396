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

// Experiment driver: configuration, Monte Carlo repetitions over strategies,
// per-run CSV persistence with resume, summary statistics, and the
// candidate-count / timing sweep.
//
// Files written by run_experiment into the output directory:
//
//   run_<strategy>_r<rep>.csv   one per (strategy, repetition)
//   summary.csv                 per-(strategy, n) BOV distribution
//   timings/<strategy>_r<rep>.txt  wall-clock seconds per acquisition
//
// The CSV files are deterministic functions of the configuration; wall times
// live only in timings/.

#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "tricands/benchfn.hpp"
#include "tricands/candidates.hpp"
#include "tricands/error.hpp"
#include "tricands/geometry.hpp"
#include "tricands/optimizer.hpp"

namespace tricands {

inline constexpr const char* kRunSchema = "# tricands-run v1";
inline constexpr const char* kSummarySchema = "# tricands-summary v1";
inline constexpr const char* kMeasureSchema = "# tricands-measure v1";
inline constexpr const char* kEndMarker = "# end";

struct ExperimentConfig {
  std::string benchmark = "goldstein_price";
  std::vector<std::string> strategies = {"EI-tri", "EI-lhs", "EI"};
  Index n0 = 12;
  Index n_end = 50;
  Index candidate_cap = 0;  // 0: 100 * d
  Index n_sub_max = 0;      // 0: candidate_cap
  Index n_starts = 5;
  Index repetitions = 30;
  std::uint64_t base_seed = 0;
  std::string output_dir = "out";
  Index jobs = 1;

  void validate() const {
    if (repetitions < 1) throw Error(ErrorCode::ConfigError, "repetitions must be >= 1");
    if (n0 >= n_end) throw Error(ErrorCode::ConfigError, "n0 must be < n_end");
    if (strategies.empty()) throw Error(ErrorCode::ConfigError, "no strategies");
    if (candidate_cap < 0 || n_sub_max < 0) throw Error(ErrorCode::ConfigError, "caps must be >= 0");
    if (n_starts < 1) throw Error(ErrorCode::ConfigError, "n_starts must be >= 1");
    if (jobs < 1) throw Error(ErrorCode::ConfigError, "jobs must be >= 1");
    Index d = 0;
    try {
      d = get_benchmark(benchmark).d;
      for (const auto& s : strategies) Strategy::parse(s);
    } catch (const Error& e) {
      throw Error(ErrorCode::ConfigError, e.message());
    }
    if (n0 < d + 1) throw Error(ErrorCode::ConfigError, "n0 must be >= d + 1 = " + std::to_string(d + 1));
  }

  Strategy strategy(const std::string& name) const {
    Strategy s = Strategy::parse(name, candidate_cap, n_starts);
    s.n_sub_max = n_sub_max;
    return s;
  }
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline Index parse_index(const std::string& v, const std::string& key) {
  try {
    std::size_t used = 0;
    const long long x = std::stoll(v, &used);
    if (used != v.size()) throw std::invalid_argument("trailing characters");
    return static_cast<Index>(x);
  } catch (const std::exception&) {
    throw Error(ErrorCode::ConfigError, "key '" + key + "' expects an integer, got '" + v + "'");
  }
}

inline std::uint64_t parse_u64(const std::string& v, const std::string& key) {
  try {
    std::size_t used = 0;
    if (!v.empty() && v[0] == '-') throw std::invalid_argument("negative");
    const unsigned long long x = std::stoull(v, &used);
    if (used != v.size()) throw std::invalid_argument("trailing characters");
    return x;
  } catch (const std::exception&) {
    throw Error(ErrorCode::ConfigError, "key '" + key + "' expects a non-negative integer, got '" + v + "'");
  }
}

}  // namespace detail

/// Sets one configuration key from its text value.
inline void apply_setting(ExperimentConfig& cfg, const std::string& key_in, const std::string& value_in) {
  const std::string key = detail::trim(key_in);
  const std::string value = detail::trim(value_in);
  if (key == "benchmark") {
    cfg.benchmark = value;
  } else if (key == "strategies") {
    cfg.strategies.clear();
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) {
      item = detail::trim(item);
      if (!item.empty()) cfg.strategies.push_back(item);
    }
  } else if (key == "n0") {
    cfg.n0 = detail::parse_index(value, key);
  } else if (key == "n_end") {
    cfg.n_end = detail::parse_index(value, key);
  } else if (key == "candidate_cap") {
    cfg.candidate_cap = detail::parse_index(value, key);
  } else if (key == "n_sub_max") {
    cfg.n_sub_max = detail::parse_index(value, key);
  } else if (key == "n_starts") {
    cfg.n_starts = detail::parse_index(value, key);
  } else if (key == "repetitions") {
    cfg.repetitions = detail::parse_index(value, key);
  } else if (key == "base_seed") {
    cfg.base_seed = detail::parse_u64(value, key);
  } else if (key == "output_dir") {
    cfg.output_dir = value;
  } else if (key == "jobs") {
    cfg.jobs = detail::parse_index(value, key);
  } else {
    throw Error(ErrorCode::ConfigError, "unknown key '" + key + "'");
  }
}

/// Parses `key = value` lines; '#' starts a comment. Errors name the line.
inline ExperimentConfig parse_config(std::istream& in, const std::string& source = "<config>") {
  ExperimentConfig cfg;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    if (detail::trim(line).empty()) continue;
    const auto eq = line.find('=');
    const std::string where = source + ":" + std::to_string(lineno) + ": ";
    if (eq == std::string::npos) throw Error(ErrorCode::ConfigError, where + "expected 'key = value'");
    try {
      apply_setting(cfg, line.substr(0, eq), line.substr(eq + 1));
    } catch (const Error& e) {
      throw Error(ErrorCode::ConfigError, where + e.message());
    }
  }
  return cfg;
}

inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ConfigError, "cannot open config '" + path + "'");
  return parse_config(in, path);
}

// ---------------------------------------------------------------------------
// Per-run files

/// One (strategy, repetition) as persisted: traces over n = 1 .. n_end.
struct RunFile {
  std::string strategy;
  Index rep = 0;
  std::uint64_t seed = 0;
  std::vector<double> bov;                   // running min after evaluation n
  std::vector<std::size_t> cumulative_evals;  // criterion evaluations through n
};

inline std::string run_file_name(const std::string& strategy, Index rep) {
  return "run_" + strategy + "_r" + std::to_string(rep) + ".csv";
}

inline void write_run_csv(std::ostream& os, const ExperimentConfig& cfg, Index rep, const RunRecord& r) {
  const Index d = r.X_final.cols();
  os << kRunSchema << '\n';
  os << "# benchmark=" << cfg.benchmark << " strategy=" << r.strategy << " rep=" << rep << " seed=" << r.seed
     << " n0=" << r.n0 << " n_end=" << r.n_end << '\n';
  os << "n,y,bov,criterion_evals,cumulative_evals,n_candidates,fallback";
  for (Index k = 0; k < d; ++k) os << ",x" << (k + 1);
  os << '\n';
  os << std::setprecision(17);
  double bov = std::numeric_limits<double>::infinity();
  std::size_t cum = 0;
  for (Index i = 0; i < r.Y_final.size(); ++i) {
    bov = std::min(bov, r.Y_final(i));
    std::size_t evals = 0;
    Index cands = 0;
    int fallback = 0;
    if (i >= r.n0) {
      const auto a = static_cast<std::size_t>(i - r.n0);
      evals = r.per_acq_evals[a];
      cands = r.n_candidates[a];
      fallback = std::count(r.fallback_iterations.begin(), r.fallback_iterations.end(), i - r.n0) > 0;
    }
    cum += evals;
    os << (i + 1) << ',' << r.Y_final(i) << ',' << bov << ',' << evals << ',' << cum << ',' << cands << ','
       << fallback;
    for (Index k = 0; k < d; ++k) os << ',' << r.X_final(i, k);
    os << '\n';
  }
  os << kEndMarker << '\n';
}

/// Reads a run file; returns false if it is missing or incomplete.
inline bool read_run_csv(const std::filesystem::path& path, RunFile& out) {
  std::ifstream in(path);
  if (!in) return false;
  std::string line;
  if (!std::getline(in, line) || line != kRunSchema) return false;
  if (!std::getline(in, line) || line.rfind("# ", 0) != 0) return false;
  {
    std::stringstream ss(line.substr(2));
    std::string kv;
    while (ss >> kv) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) continue;
      const std::string k = kv.substr(0, eq), v = kv.substr(eq + 1);
      if (k == "strategy") out.strategy = v;
      if (k == "rep") out.rep = std::stoll(v);
      if (k == "seed") out.seed = std::stoull(v);
    }
  }
  if (!std::getline(in, line)) return false;  // header
  out.bov.clear();
  out.cumulative_evals.clear();
  bool ended = false;
  while (std::getline(in, line)) {
    if (line == kEndMarker) {
      ended = true;
      break;
    }
    std::stringstream ss(line);
    std::string field;
    std::vector<std::string> f;
    while (std::getline(ss, field, ',')) f.push_back(field);
    if (f.size() < 7) return false;
    try {
      out.bov.push_back(std::stod(f[2]));
      out.cumulative_evals.push_back(std::stoull(f[4]));
    } catch (const std::exception&) {
      return false;
    }
  }
  return ended && !out.bov.empty();
}

// ---------------------------------------------------------------------------
// Summary

struct SummaryRow {
  std::string strategy;
  Index n = 0;
  Index reps = 0;
  double median = 0, q1 = 0, q3 = 0, whisker_lo = 0, whisker_hi = 0;
  double mean_cumulative_evals = 0;
};

/// Type-7 (linear interpolation) quantile of sorted data.
inline double quantile_sorted(const std::vector<double>& v, double p) {
  const double h = (static_cast<double>(v.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (h - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

/// Per-(strategy, n) BOV median, quartiles, Tukey whiskers and mean cumulative
/// criterion evaluations. Strategies appear in the given order; the result
/// does not depend on the order of `records`.
inline std::vector<SummaryRow> summarize(const std::vector<RunFile>& records,
                                         const std::vector<std::string>& strategies) {
  std::vector<SummaryRow> rows;
  for (const auto& s : strategies) {
    std::vector<const RunFile*> mine;
    for (const auto& r : records)
      if (r.strategy == s) mine.push_back(&r);
    if (mine.empty()) throw Error(ErrorCode::MissingStrategy, "no records for strategy '" + s + "'");
    std::size_t len = mine.front()->bov.size();
    for (auto* r : mine) len = std::min(len, r->bov.size());
    for (std::size_t n = 0; n < len; ++n) {
      std::vector<double> v;
      unsigned long long evals = 0;
      for (auto* r : mine) {
        v.push_back(r->bov[n]);
        evals += r->cumulative_evals[n];
      }
      std::sort(v.begin(), v.end());
      SummaryRow row;
      row.strategy = s;
      row.n = static_cast<Index>(n + 1);
      row.reps = static_cast<Index>(v.size());
      row.median = quantile_sorted(v, 0.5);
      row.q1 = quantile_sorted(v, 0.25);
      row.q3 = quantile_sorted(v, 0.75);
      const double iqr = row.q3 - row.q1;
      row.whisker_lo = row.q1;
      row.whisker_hi = row.q3;
      for (double x : v) {
        if (x >= row.q1 - 1.5 * iqr) row.whisker_lo = std::min(row.whisker_lo, x);
        if (x <= row.q3 + 1.5 * iqr) row.whisker_hi = std::max(row.whisker_hi, x);
      }
      row.mean_cumulative_evals = static_cast<double>(evals) / static_cast<double>(v.size());
      rows.push_back(row);
    }
  }
  return rows;
}

inline std::vector<SummaryRow> summarize(const std::vector<RunFile>& records) {
  std::vector<std::string> names;
  for (const auto& r : records) names.push_back(r.strategy);
  std::sort(names.begin(), names.end());
  names.erase(std::unique(names.begin(), names.end()), names.end());
  if (names.empty()) throw Error(ErrorCode::MissingStrategy, "no records");
  return summarize(records, names);
}

inline void write_summary_csv(std::ostream& os, const std::vector<SummaryRow>& rows) {
  os << kSummarySchema << '\n';
  os << "strategy,n,reps,median,q1,q3,whisker_lo,whisker_hi,mean_cumulative_evals\n";
  os << std::setprecision(17);
  for (const auto& r : rows) {
    os << r.strategy << ',' << r.n << ',' << r.reps << ',' << r.median << ',' << r.q1 << ',' << r.q3 << ','
       << r.whisker_lo << ',' << r.whisker_hi << ',' << r.mean_cumulative_evals << '\n';
  }
  os << kEndMarker << '\n';
}

/// Loads every complete run file in `dir`.
inline std::vector<RunFile> load_run_files(const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> paths;
  if (!std::filesystem::is_directory(dir)) throw Error(ErrorCode::IoError, "not a directory: " + dir.string());
  for (const auto& e : std::filesystem::directory_iterator(dir)) {
    const std::string name = e.path().filename().string();
    if (name.rfind("run_", 0) == 0 && e.path().extension() == ".csv") paths.push_back(e.path());
  }
  std::sort(paths.begin(), paths.end());
  std::vector<RunFile> out;
  for (const auto& p : paths) {
    RunFile f;
    if (read_run_csv(p, f)) out.push_back(std::move(f));
    else std::cerr << "skipping incomplete run file " << p.string() << '\n';
  }
  return out;
}

// ---------------------------------------------------------------------------
// Experiment

struct ExperimentResult {
  std::size_t computed = 0;  // (strategy, rep) pairs run now
  std::size_t skipped = 0;   // already complete on disk
  std::vector<SummaryRow> summary;
};

namespace detail {

inline void write_atomically(const std::filesystem::path& path, const std::string& content) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoError, "cannot write " + tmp.string());
    out << content;
    if (!out) throw Error(ErrorCode::IoError, "write failed: " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace detail

/// Runs every (strategy, repetition) pair that has no complete output file,
/// then writes summary.csv from the files on disk. Repetition r uses seed
/// base_seed + r for every strategy.
inline ExperimentResult run_experiment(const ExperimentConfig& cfg, std::ostream* log = nullptr) {
  cfg.validate();
  const Benchmark& bench = get_benchmark(cfg.benchmark);
  const std::filesystem::path dir(cfg.output_dir);
  std::filesystem::create_directories(dir / "timings");

  struct Job {
    std::string strategy;
    Index rep;
  };
  std::vector<Job> jobs;
  ExperimentResult result;
  for (Index rep = 0; rep < cfg.repetitions; ++rep) {
    for (const auto& s : cfg.strategies) {
      RunFile existing;
      const auto path = dir / run_file_name(s, rep);
      if (read_run_csv(path, existing)) {
        ++result.skipped;
        continue;
      }
      if (std::filesystem::exists(path) && log) *log << "recomputing incomplete " << path.string() << '\n';
      jobs.push_back({s, rep});
    }
  }

  std::atomic<std::size_t> next{0};
  std::mutex mu;
  std::exception_ptr failure;
  auto worker = [&] {
    for (;;) {
      const std::size_t j = next.fetch_add(1);
      if (j >= jobs.size()) return;
      {
        std::lock_guard<std::mutex> lock(mu);
        if (failure) return;
      }
      try {
        const Job& job = jobs[j];
        const std::uint64_t seed = cfg.base_seed + static_cast<std::uint64_t>(job.rep);
        RunRecord rec = run_bo(bench, cfg.strategy(job.strategy), cfg.n0, cfg.n_end, seed);
        std::ostringstream csv;
        write_run_csv(csv, cfg, job.rep, rec);
        std::ostringstream timing;
        timing << std::setprecision(6);
        for (double t : rec.wall_times) timing << t << '\n';
        detail::write_atomically(dir / "timings" / (job.strategy + "_r" + std::to_string(job.rep) + ".txt"),
                                 timing.str());
        detail::write_atomically(dir / run_file_name(job.strategy, job.rep), csv.str());
        std::lock_guard<std::mutex> lock(mu);
        ++result.computed;
        if (log) {
          *log << job.strategy << " rep " << job.rep << ": bov " << std::setprecision(6) << rec.bov_trace.back()
               << ", criterion evals " << rec.criterion_evals_total;
          if (!rec.fallback_iterations.empty())
            *log << ", " << rec.fallback_iterations.size() << " LHS fallback(s)";
          *log << '\n';
        }
      } catch (...) {
        std::lock_guard<std::mutex> lock(mu);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  const auto n_threads = static_cast<std::size_t>(std::min<Index>(cfg.jobs, static_cast<Index>(jobs.size())));
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);

  std::vector<RunFile> files;
  for (Index rep = 0; rep < cfg.repetitions; ++rep) {
    for (const auto& s : cfg.strategies) {
      RunFile f;
      if (!read_run_csv(dir / run_file_name(s, rep), f))
        throw Error(ErrorCode::IoError, "run file missing after execution: " + run_file_name(s, rep));
      files.push_back(std::move(f));
    }
  }
  result.summary = summarize(files, cfg.strategies);
  std::ostringstream sum;
  write_summary_csv(sum, result.summary);
  detail::write_atomically(dir / "summary.csv", sum.str());
  return result;
}

// ---------------------------------------------------------------------------
// Candidate counts and timing

struct MeasureRow {
  Index d = 0, n = 0, rep = 0;
  Index n_T = 0, n_F = 0, N = 0;
  double millis = 0.0;
};

/// Tricands counts (uncapped) and generation time on uniform random designs.
/// Cells whose geometry fails are reported to `log` and skipped.
inline std::vector<MeasureRow> measure_candidates(const std::vector<Index>& d_list, const std::vector<Index>& n_list,
                                                  Index reps, std::uint64_t seed, std::ostream* log = nullptr) {
  if (d_list.empty() || n_list.empty()) throw Error(ErrorCode::ConfigError, "d and n lists must be nonempty");
  if (reps < 1) throw Error(ErrorCode::ConfigError, "reps must be >= 1");
  std::vector<MeasureRow> rows;
  for (Index d : d_list) {
    for (Index n : n_list) {
      for (Index rep = 0; rep < reps; ++rep) {
        if (n < d + 1) {
          if (log) *log << "skip d=" << d << " n=" << n << ": need n >= d + 1\n";
          continue;
        }
        const std::uint64_t stream = (static_cast<std::uint64_t>(d) << 40) ^ (static_cast<std::uint64_t>(n) << 20) ^
                                     static_cast<std::uint64_t>(rep);
        Rng rng = make_rng(seed, stream);
        const Matrix X = uniform_matrix(n, d, rng);
        SubsampleConfig cfg;
        cfg.n_sub_max = std::numeric_limits<Index>::max() / 2;
        cfg.seed = seed;
        try {
          const auto t0 = std::chrono::steady_clock::now();
          const CandidateSet c = generate_tricands(X, cfg);
          const auto t1 = std::chrono::steady_clock::now();
          MeasureRow row{d, n, rep, 0, 0, c.size(), std::chrono::duration<double, std::milli>(t1 - t0).count()};
          for (auto k : c.kinds) (k == CandidateKind::Interior ? row.n_T : row.n_F) += 1;
          rows.push_back(row);
        } catch (const Error& e) {
          if (log) *log << "skip d=" << d << " n=" << n << " rep=" << rep << ": " << e.what() << '\n';
        }
      }
    }
  }
  return rows;
}

inline void write_measure_csv(std::ostream& os, const std::vector<MeasureRow>& rows) {
  os << kMeasureSchema << '\n';
  os << "d,n,rep,n_T,n_F,N,millis\n";
  os << std::setprecision(17);
  for (const auto& r : rows)
    os << r.d << ',' << r.n << ',' << r.rep << ',' << r.n_T << ',' << r.n_F << ',' << r.N << ',' << r.millis << '\n';
  os << kEndMarker << '\n';
}

}  // namespace tricands
