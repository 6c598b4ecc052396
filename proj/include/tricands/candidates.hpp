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

// Geometric acquisition candidates on [0,1]^d.
//
// Interior candidates sit at the barycenters of the Delaunay simplices of the
// design. Fringe candidates extend outward from the middle of every convex-hull
// facet, along the facet normal, part way to the boundary of the unit cube.
// When there are too many, a subsample keeps a fixed share of the simplices
// touching the current best design point.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iomanip>
#include <limits>
#include <numeric>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "tricands/error.hpp"
#include "tricands/geometry.hpp"
#include "tricands/types.hpp"

namespace tricands {

/// Fraction of the way from a facet middle to the cube boundary.
inline constexpr double kFringeScale = 0.5;
/// Candidates this close (sup-norm) to a design point are dropped.
inline constexpr double kDuplicateTolerance = 1e-9;

enum class CandidateKind { Interior, Fringe, Random };

inline const char* to_string(CandidateKind k) {
  switch (k) {
    case CandidateKind::Interior: return "interior";
    case CandidateKind::Fringe: return "fringe";
    case CandidateKind::Random: return "random";
  }
  return "?";
}

struct CandidateSet {
  Matrix points;  // N x d, in [0,1]^d
  std::vector<CandidateKind> kinds;
  std::vector<bool> adjacent;

  Index size() const { return points.rows(); }
  Index dim() const { return points.cols(); }
};

struct SubsampleConfig {
  Index n_sub_max = 0;
  double adjacent_fraction = 0.10;
  std::uint64_t seed = 0;
  /// Pad with uniform points up to n_sub_max when fewer candidates exist.
  bool top_up = false;
  double fringe_scale = kFringeScale;

  static SubsampleConfig defaults(Index d, std::uint64_t seed = 0) {
    SubsampleConfig cfg;
    cfg.n_sub_max = 100 * d;
    cfg.seed = seed;
    return cfg;
  }

  void validate() const {
    if (n_sub_max < 1) throw Error(ErrorCode::ConfigError, "n_sub_max must be >= 1");
    if (!(adjacent_fraction >= 0.0 && adjacent_fraction <= 1.0)) {
      throw Error(ErrorCode::ConfigError, "adjacent_fraction must lie in [0, 1]");
    }
  }
};

/// One barycenter per simplex, in simplex order.
inline Matrix interior_candidates(const Triangulation& tri) {
  const Index d = tri.dim();
  Matrix out(static_cast<Index>(tri.simplices.size()), d);
  for (std::size_t j = 0; j < tri.simplices.size(); ++j) {
    Vector c = Vector::Zero(d);
    for (Index v : tri.simplices[j]) c += tri.points.row(v).transpose();
    out.row(static_cast<Index>(j)) = c.transpose() / static_cast<double>(d + 1);
  }
  return out;
}

/// Distance from `origin` along unit direction `dir` to the boundary of
/// [0,1]^d: the nearest crossing over coordinates with a nonzero component.
inline double distance_to_unit_boundary(const Vector& origin, const Vector& dir) {
  double alpha = std::numeric_limits<double>::infinity();
  for (Index k = 0; k < dir.size(); ++k) {
    if (std::abs(dir(k)) < 1e-15) continue;
    const double wall = dir(k) > 0.0 ? 1.0 : 0.0;
    alpha = std::min(alpha, (wall - origin(k)) / dir(k));
  }
  return std::max(alpha, 0.0);
}

/// One candidate per facet: facet middle + scale * alpha * normal, where alpha
/// is the distance to the cube boundary along the outward normal.
inline Matrix fringe_candidates(const std::vector<HullFacet>& facets, const Matrix& points,
                                double scale = kFringeScale) {
  const Index d = points.cols();
  Matrix out(static_cast<Index>(facets.size()), d);
  for (std::size_t j = 0; j < facets.size(); ++j) {
    const auto& f = facets[j];
    if (std::abs(f.normal.norm() - 1.0) > 1e-9) {
      throw Error(ErrorCode::NormalDegenerate, "facet " + std::to_string(j) + " normal is not unit");
    }
    Vector middle = Vector::Zero(d);
    for (Index v : f.vertices) middle += points.row(v).transpose();
    middle /= static_cast<double>(f.vertices.size());
    const double alpha = distance_to_unit_boundary(middle, f.normal);
    Vector x = middle + scale * alpha * f.normal;
    out.row(static_cast<Index>(j)) = x.cwiseMax(0.0).cwiseMin(1.0).transpose();
  }
  return out;
}

/// Indices of the simplices (equivalently interior candidates) that have
/// `best_index` as a vertex.
inline std::vector<Index> adjacent_candidates(const Triangulation& tri, Index best_index) {
  if (best_index < 0 || best_index >= tri.size()) {
    throw Error(ErrorCode::BadIndex, "best index " + std::to_string(best_index) + " out of range [0, " +
                                         std::to_string(tri.size()) + ")");
  }
  std::vector<Index> out;
  for (std::size_t j = 0; j < tri.simplices.size(); ++j) {
    const auto& s = tri.simplices[j];
    if (std::find(s.begin(), s.end(), best_index) != s.end()) out.push_back(static_cast<Index>(j));
  }
  return out;
}

namespace detail {

/// k distinct picks from `pool`, partial Fisher-Yates.
inline std::vector<Index> sample_without_replacement(std::vector<Index> pool, std::size_t k, Rng& rng) {
  k = std::min(k, pool.size());
  for (std::size_t i = 0; i < k; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, pool.size() - 1);
    std::swap(pool[i], pool[pick(rng)]);
  }
  pool.resize(k);
  return pool;
}

inline bool near_any_row(const Matrix& X, const Vector& x, double tol) {
  for (Index i = 0; i < X.rows(); ++i) {
    if ((X.row(i).transpose() - x).cwiseAbs().maxCoeff() <= tol) return true;
  }
  return false;
}

inline double outside_distance(const std::vector<HullFacet>& facets, const Vector& x) {
  double out = -std::numeric_limits<double>::infinity();
  for (const auto& f : facets) out = std::max(out, f.normal.dot(x) - f.offset);
  return out;
}

}  // namespace detail

/// Full tricands pipeline for the design `X` (n x d in [0,1]^d): triangulate,
/// collect interior and fringe candidates, drop duplicates of design points,
/// and subsample down to cfg.n_sub_max when needed.
inline CandidateSet generate_tricands(const Matrix& X, const SubsampleConfig& cfg,
                             std::optional<Index> best_index = std::nullopt) {
  cfg.validate();
  const Index n = X.rows();
  const Index d = X.cols();
  if (n < d + 1) {
    throw Error(ErrorCode::TooFewPoints,
                "need at least " + std::to_string(d + 1) + " design points, got " + std::to_string(n));
  }
  if (best_index && (*best_index < 0 || *best_index >= n)) {
    throw Error(ErrorCode::BadIndex, "best index " + std::to_string(*best_index) + " out of range");
  }
  const Triangulation tri = delaunay(X, cfg.seed);
  const Matrix interior = interior_candidates(tri);
  const Matrix fringe = fringe_candidates(tri.facets, tri.points, cfg.fringe_scale);

  std::vector<char> is_adjacent(static_cast<std::size_t>(interior.rows()), 0);
  if (best_index) {
    for (Index j : adjacent_candidates(tri, *best_index)) is_adjacent[static_cast<std::size_t>(j)] = 1;
  }

  // Stack [interior; fringe], dropping duplicates of the design and fringe
  // points that collapsed onto the hull.
  std::vector<Vector> pts;
  std::vector<CandidateKind> kinds;
  std::vector<char> adj;
  for (Index j = 0; j < interior.rows(); ++j) {
    Vector x = interior.row(j).transpose().cwiseMax(0.0).cwiseMin(1.0);
    if (detail::near_any_row(X, x, kDuplicateTolerance)) continue;
    pts.push_back(std::move(x));
    kinds.push_back(CandidateKind::Interior);
    adj.push_back(is_adjacent[static_cast<std::size_t>(j)]);
  }
  for (Index j = 0; j < fringe.rows(); ++j) {
    Vector x = fringe.row(j).transpose();
    if (detail::outside_distance(tri.facets, x) <= kDuplicateTolerance) continue;
    if (detail::near_any_row(X, x, kDuplicateTolerance)) continue;
    pts.push_back(std::move(x));
    kinds.push_back(CandidateKind::Fringe);
    adj.push_back(0);
  }

  std::vector<Index> keep;
  const auto total = static_cast<Index>(pts.size());
  Rng rng = make_rng(cfg.seed, 0x7375627361ull);
  if (total <= cfg.n_sub_max) {
    keep.resize(static_cast<std::size_t>(total));
    std::iota(keep.begin(), keep.end(), Index{0});
  } else if (!best_index) {
    std::vector<Index> all(static_cast<std::size_t>(total));
    std::iota(all.begin(), all.end(), Index{0});
    keep = detail::sample_without_replacement(std::move(all), static_cast<std::size_t>(cfg.n_sub_max), rng);
  } else {
    std::vector<Index> near, far;
    for (Index j = 0; j < total; ++j) (adj[static_cast<std::size_t>(j)] ? near : far).push_back(j);
    const auto quota = static_cast<std::size_t>(
        std::floor(cfg.adjacent_fraction * static_cast<double>(cfg.n_sub_max)));
    const std::size_t a = std::min(quota, near.size());
    keep = detail::sample_without_replacement(std::move(near), a, rng);
    auto rest = detail::sample_without_replacement(std::move(far), static_cast<std::size_t>(cfg.n_sub_max) - a, rng);
    keep.insert(keep.end(), rest.begin(), rest.end());
  }
  std::sort(keep.begin(), keep.end());

  CandidateSet out;
  Index extra = 0;
  if (cfg.top_up && static_cast<Index>(keep.size()) < cfg.n_sub_max) {
    extra = cfg.n_sub_max - static_cast<Index>(keep.size());
  }
  out.points.resize(static_cast<Index>(keep.size()) + extra, d);
  for (std::size_t r = 0; r < keep.size(); ++r) {
    const auto j = static_cast<std::size_t>(keep[r]);
    out.points.row(static_cast<Index>(r)) = pts[j].transpose();
    out.kinds.push_back(kinds[j]);
    out.adjacent.push_back(adj[j] != 0);
  }
  for (Index r = 0; r < extra; ++r) {
    for (Index k = 0; k < d; ++k) out.points(static_cast<Index>(keep.size()) + r, k) = uniform01(rng);
    out.kinds.push_back(CandidateKind::Random);
    out.adjacent.push_back(false);
  }
  return out;
}

/// Random Latin hypercube of n points in [0,1)^d: one point per stratum
/// [i/n, (i+1)/n) in every coordinate, uniformly jittered within strata.
inline Matrix lhs_candidates(Index n, Index d, Rng& rng) {
  if (n < 1) throw Error(ErrorCode::ConfigError, "LHS size must be >= 1");
  Matrix out(n, d);
  std::vector<Index> perm(static_cast<std::size_t>(n));
  for (Index k = 0; k < d; ++k) {
    std::iota(perm.begin(), perm.end(), Index{0});
    std::shuffle(perm.begin(), perm.end(), rng);
    for (Index i = 0; i < n; ++i) {
      out(i, k) = (static_cast<double>(perm[static_cast<std::size_t>(i)]) + uniform01(rng)) /
                  static_cast<double>(n);
    }
  }
  return out;
}

inline Matrix lhs_candidates(Index n, Index d, std::uint64_t seed) {
  Rng rng = make_rng(seed, 0x6c6873ull);
  return lhs_candidates(n, d, rng);
}

/// Plain LHS wrapped as a CandidateSet (all kinds Random).
inline CandidateSet as_candidate_set(Matrix points) {
  CandidateSet out;
  out.kinds.assign(static_cast<std::size_t>(points.rows()), CandidateKind::Random);
  out.adjacent.assign(static_cast<std::size_t>(points.rows()), false);
  out.points = std::move(points);
  return out;
}

/// CSV: x1..xd,kind,adjacent with 17 significant digits.
inline void write_candidates_csv(std::ostream& os, const CandidateSet& c) {
  for (Index k = 0; k < c.dim(); ++k) os << 'x' << (k + 1) << ',';
  os << "kind,adjacent\n";
  os << std::setprecision(17);
  for (Index i = 0; i < c.size(); ++i) {
    for (Index k = 0; k < c.dim(); ++k) os << c.points(i, k) << ',';
    os << to_string(c.kinds[static_cast<std::size_t>(i)]) << ','
       << (c.adjacent[static_cast<std::size_t>(i)] ? 1 : 0) << '\n';
  }
}

}  // namespace tricands
