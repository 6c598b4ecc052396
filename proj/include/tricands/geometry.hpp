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

// Convex hulls and Delaunay triangulations in general dimension.
//
// A single quickhull engine serves both: the hull of a d-dimensional point set
// is computed directly, and the Delaunay triangulation is the set of lower
// facets of the hull of the points lifted onto the paraboloid x -> |x|^2 in
// d+1 dimensions. Cospherical or otherwise degenerate inputs are handled by
// joggling the coordinates by a tiny uniform perturbation and retrying.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <ostream>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "tricands/error.hpp"
#include "tricands/types.hpp"

namespace tricands {

/// Plane-side tolerance for hull membership, relative to coordinate scale.
inline constexpr double kPlaneTolerance = 1e-10;
/// Strictness margin of the circumsphere predicate (on the power of the query).
inline constexpr double kCircumsphereMargin = 1e-9;
/// Magnitude of the first joggle; later retries escalate by 10x.
inline constexpr double kJoggleMagnitude = 1e-9;
inline constexpr int kMaxJoggleRetries = 3;

struct HullFacet {
  std::vector<Index> vertices;  // d indices, ascending
  Vector normal;                // unit, pointing away from the hull interior
  double offset = 0.0;          // normal . x == offset on the facet plane
};

struct ConvexHull {
  std::vector<HullFacet> facets;
  std::vector<Index> hull_vertices;  // ascending
};

struct Triangulation {
  /// Coordinates the triangulation was computed from; differs from the input
  /// only by joggle when a degeneracy forced a retry.
  Matrix points;
  std::vector<std::vector<Index>> simplices;  // (d+1)-tuples, positively oriented
  std::vector<HullFacet> facets;
  Index hull_vertex_count = 0;
  int joggle_retries = 0;

  Index dim() const { return points.cols(); }
  Index size() const { return points.rows(); }
};

namespace detail {

struct IndexVectorHash {
  std::size_t operator()(const std::vector<Index>& v) const noexcept {
    std::uint64_t h = 1469598103934665603ull;
    for (Index i : v) {
      h ^= static_cast<std::uint64_t>(i) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    }
    return static_cast<std::size_t>(h);
  }
};

inline double coordinate_scale(const Matrix& pts) {
  return std::max(1.0, pts.cwiseAbs().maxCoeff());
}

/// Unit normal and offset of the hyperplane through `verts` (D points in R^D).
/// Returns false when the points are affinely dependent.
inline bool hyperplane_through(const Matrix& pts, std::span<const Index> verts, double scale,
                               Vector& normal, double& offset) {
  const Index D = pts.cols();
  if (D == 1) {
    normal = Vector::Ones(1);
    offset = pts(verts[0], 0);
    return true;
  }
  Matrix edges(D, D - 1);
  for (Index c = 0; c + 1 < D; ++c) {
    edges.col(c) = (pts.row(verts[c + 1]) - pts.row(verts[0])).transpose();
  }
  Eigen::HouseholderQR<Matrix> qr(edges);
  const Matrix& r = qr.matrixQR();
  for (Index c = 0; c + 1 < D; ++c) {
    if (std::abs(r(c, c)) < 1e-14 * scale) return false;
  }
  Matrix q = qr.householderQ();
  normal = q.col(D - 1);
  offset = normal.dot(pts.row(verts[0]).transpose());
  return true;
}

/// Quickhull in arbitrary dimension D >= 1 over the rows of an n x D matrix.
/// Facets are simplicial; each keeps the neighbor across every ridge
/// (neighbors[i] shares all vertices except vertices[i]).
class Quickhull {
 public:
  struct Facet {
    std::vector<Index> vertices;
    std::vector<std::size_t> neighbors;
    Vector normal;
    double offset = 0.0;
    std::vector<Index> outside;
    bool alive = true;
    std::uint64_t mark = 0;
  };

  Quickhull(const Matrix& pts, double eps) : pts_(pts), eps_(eps), scale_(coordinate_scale(pts)) {
    build();
  }

  const std::vector<Facet>& facets() const { return facets_; }
  const Vector& interior() const { return interior_; }

  double distance(const Facet& f, Index p) const {
    return f.normal.dot(pts_.row(p).transpose()) - f.offset;
  }

 private:
  void build() {
    const Index n = pts_.rows();
    const Index D = pts_.cols();
    if (n < D + 1) {
      throw Error(ErrorCode::DimensionTooSmall,
                  "need at least " + std::to_string(D + 1) + " points, got " + std::to_string(n));
    }
    std::vector<Index> simplex = initial_simplex();
    interior_ = Vector::Zero(D);
    for (Index v : simplex) interior_ += pts_.row(v).transpose();
    interior_ /= static_cast<double>(D + 1);

    for (Index j = 0; j <= D; ++j) {
      Facet f;
      for (Index m = 0; m <= D; ++m) {
        if (m == j) continue;
        f.vertices.push_back(simplex[m]);
        f.neighbors.push_back(static_cast<std::size_t>(m));
      }
      orient(f);
      facets_.push_back(std::move(f));
    }

    std::vector<char> in_simplex(n, 0);
    for (Index v : simplex) in_simplex[v] = 1;
    std::vector<Index> rest;
    for (Index i = 0; i < n; ++i)
      if (!in_simplex[i]) rest.push_back(i);
    std::vector<std::size_t> initial(facets_.size());
    std::iota(initial.begin(), initial.end(), std::size_t{0});
    assign_outside(rest, initial);

    for (std::size_t fi = 0; fi < facets_.size(); ++fi) {
      if (facets_[fi].alive && !facets_[fi].outside.empty()) add_point(fi);
    }
  }

  std::vector<Index> initial_simplex() const {
    const Index n = pts_.rows();
    const Index D = pts_.cols();
    Index first = 0;
    for (Index i = 1; i < n; ++i)
      if (pts_(i, 0) < pts_(first, 0)) first = i;
    std::vector<Index> chosen{first};
    std::vector<Vector> basis;
    const Vector origin = pts_.row(first).transpose();
    for (Index k = 1; k <= D; ++k) {
      double best = -1.0;
      Index best_i = -1;
      Vector best_r;
      for (Index i = 0; i < n; ++i) {
        Vector r = pts_.row(i).transpose() - origin;
        for (const Vector& b : basis) r -= r.dot(b) * b;
        const double dist = r.norm();
        if (dist > best) {
          best = dist;
          best_i = i;
          best_r = std::move(r);
        }
      }
      if (best < kPlaneTolerance * scale_) {
        throw Error(ErrorCode::DegenerateInput,
                    "points span an affine subspace of dimension " + std::to_string(k - 1) +
                        " < " + std::to_string(D));
      }
      chosen.push_back(best_i);
      basis.push_back(best_r / best);
    }
    return chosen;
  }

  void orient(Facet& f) const {
    if (!hyperplane_through(pts_, f.vertices, scale_, f.normal, f.offset)) {
      throw Error(ErrorCode::DegenerateInput, "affinely dependent facet vertices");
    }
    if (f.normal.dot(interior_) - f.offset > 0.0) {
      f.normal = -f.normal;
      f.offset = -f.offset;
    }
  }

  void assign_outside(const std::vector<Index>& points, const std::vector<std::size_t>& candidates) {
    for (Index p : points) {
      for (std::size_t fi : candidates) {
        if (distance(facets_[fi], p) > eps_) {
          facets_[fi].outside.push_back(p);
          break;
        }
      }
    }
  }

  void add_point(std::size_t start) {
    const Index D = pts_.cols();
    Index apex = -1;
    double far = -std::numeric_limits<double>::infinity();
    for (Index p : facets_[start].outside) {
      const double dist = distance(facets_[start], p);
      if (dist > far) {
        far = dist;
        apex = p;
      }
    }

    const std::uint64_t visible_mark = ++epoch_;
    std::vector<std::size_t> visible{start};
    facets_[start].mark = visible_mark;
    std::vector<std::pair<std::size_t, std::size_t>> horizon;  // (visible facet, slot)
    for (std::size_t k = 0; k < visible.size(); ++k) {
      const std::size_t vf = visible[k];
      for (std::size_t slot = 0; slot < facets_[vf].neighbors.size(); ++slot) {
        const std::size_t nb = facets_[vf].neighbors[slot];
        if (facets_[nb].mark == visible_mark) continue;
        if (distance(facets_[nb], apex) > eps_) {
          facets_[nb].mark = visible_mark;
          visible.push_back(nb);
        }
      }
    }
    for (std::size_t vf : visible) {
      for (std::size_t slot = 0; slot < facets_[vf].neighbors.size(); ++slot) {
        if (facets_[facets_[vf].neighbors[slot]].mark != visible_mark) horizon.emplace_back(vf, slot);
      }
    }

    std::unordered_map<std::vector<Index>, std::pair<std::size_t, std::size_t>, IndexVectorHash> ridges;
    std::vector<std::size_t> created;
    created.reserve(horizon.size());
    for (auto [vf, slot] : horizon) {
      const std::size_t outer = facets_[vf].neighbors[slot];
      Facet nf;
      nf.vertices = facets_[vf].vertices;
      nf.vertices[slot] = apex;
      nf.neighbors.assign(static_cast<std::size_t>(D), 0);
      nf.neighbors[slot] = outer;
      orient(nf);
      const std::size_t id = facets_.size();
      for (std::size_t& back : facets_[outer].neighbors) {
        if (back == vf) back = id;
      }
      for (std::size_t r = 0; r < static_cast<std::size_t>(D); ++r) {
        if (r == slot) continue;
        std::vector<Index> key;
        key.reserve(static_cast<std::size_t>(D) - 1);
        for (std::size_t q = 0; q < static_cast<std::size_t>(D); ++q)
          if (q != r) key.push_back(nf.vertices[q]);
        std::sort(key.begin(), key.end());
        auto it = ridges.find(key);
        if (it == ridges.end()) {
          ridges.emplace(std::move(key), std::make_pair(id, r));
        } else {
          auto [other, other_slot] = it->second;
          nf.neighbors[r] = other;
          facets_[other].neighbors[other_slot] = id;
          ridges.erase(it);
        }
      }
      facets_.push_back(std::move(nf));
      created.push_back(id);
    }

    std::vector<Index> orphans;
    for (std::size_t vf : visible) {
      for (Index p : facets_[vf].outside)
        if (p != apex) orphans.push_back(p);
      facets_[vf].outside.clear();
      facets_[vf].outside.shrink_to_fit();
      facets_[vf].alive = false;
    }
    assign_outside(orphans, created);
  }

  const Matrix& pts_;
  double eps_;
  double scale_;
  Vector interior_;
  std::vector<Facet> facets_;
  std::uint64_t epoch_ = 0;
};

inline HullFacet to_hull_facet(const Quickhull::Facet& f) {
  HullFacet out;
  out.vertices = f.vertices;
  std::sort(out.vertices.begin(), out.vertices.end());
  out.normal = f.normal;
  out.offset = f.offset;
  return out;
}

inline double simplex_orientation(const Matrix& pts, std::span<const Index> simplex) {
  const Index d = pts.cols();
  Matrix edges(d, d);
  for (Index r = 0; r < d; ++r) edges.row(r) = pts.row(simplex[r + 1]) - pts.row(simplex[0]);
  return edges.determinant();
}

inline Matrix joggle(const Matrix& pts, double magnitude, Rng& rng) {
  std::uniform_real_distribution<double> u(-magnitude, magnitude);
  Matrix out = pts;
  for (Index i = 0; i < out.rows(); ++i)
    for (Index k = 0; k < out.cols(); ++k) out(i, k) += u(rng);
  return out;
}

inline void check_finite(const Matrix& pts) {
  if (!pts.allFinite()) throw Error(ErrorCode::DegenerateInput, "non-finite coordinate");
}

/// Delaunay attempt on fixed coordinates. Returns false when the lifted hull
/// shows a degeneracy (cospherical neighbors, flat or missing simplices).
inline bool try_delaunay(const Matrix& pts, std::vector<std::vector<Index>>& simplices) {
  const Index n = pts.rows();
  const Index d = pts.cols();
  simplices.clear();
  if (n == d + 1) {
    std::vector<Index> s(static_cast<std::size_t>(n));
    std::iota(s.begin(), s.end(), Index{0});
    if (simplex_orientation(pts, s) < 0.0) std::swap(s[d - 1], s[d]);
    simplices.push_back(std::move(s));
    return true;
  }
  const Vector centroid = pts.colwise().mean().transpose();
  Matrix lifted(n, d + 1);
  lifted.leftCols(d) = pts.rowwise() - centroid.transpose();
  lifted.col(d) = lifted.leftCols(d).rowwise().squaredNorm();
  const double scale = coordinate_scale(lifted);
  Quickhull hull(lifted, 1e-11 * scale);

  const auto& facets = hull.facets();
  auto is_lower = [&](const Quickhull::Facet& f) { return f.alive && f.normal(d) < -1e-9; };

  std::vector<char> used(static_cast<std::size_t>(n), 0);
  double volume_scale = 1.0;
  for (Index k = 1; k <= d; ++k) volume_scale *= static_cast<double>(k);
  for (const auto& f : facets) {
    if (!is_lower(f)) continue;
    for (std::size_t slot = 0; slot < f.neighbors.size(); ++slot) {
      const auto& nb = facets[f.neighbors[slot]];
      if (!is_lower(nb)) continue;
      for (Index v : nb.vertices) {
        if (std::find(f.vertices.begin(), f.vertices.end(), v) != f.vertices.end()) continue;
        if (hull.distance(f, v) > -1e-12 * scale) return false;
      }
    }
    std::vector<Index> s = f.vertices;
    std::sort(s.begin(), s.end());
    const double orient = simplex_orientation(pts, s);
    if (std::abs(orient) / volume_scale < 1e-14) return false;
    if (orient < 0.0) std::swap(s[d - 1], s[d]);
    for (Index v : s) used[static_cast<std::size_t>(v)] = 1;
    simplices.push_back(std::move(s));
  }
  if (std::find(used.begin(), used.end(), 0) != used.end()) return false;
  std::sort(simplices.begin(), simplices.end());
  return true;
}

}  // namespace detail

/// Convex hull of the rows of `points` (n x d, n >= d+1).
inline ConvexHull convex_hull(const Matrix& points) {
  detail::check_finite(points);
  const Index n = points.rows();
  const Index d = points.cols();
  if (d < 1) throw Error(ErrorCode::DimensionTooSmall, "dimension must be >= 1");
  if (n < d + 1) {
    throw Error(ErrorCode::DimensionTooSmall,
                "need at least " + std::to_string(d + 1) + " points, got " + std::to_string(n));
  }
  ConvexHull out;
  if (d == 1) {
    Index lo = 0, hi = 0;
    for (Index i = 1; i < n; ++i) {
      if (points(i, 0) < points(lo, 0)) lo = i;
      if (points(i, 0) > points(hi, 0)) hi = i;
    }
    if (points(hi, 0) - points(lo, 0) < kPlaneTolerance * detail::coordinate_scale(points)) {
      throw Error(ErrorCode::DegenerateInput, "all points coincide");
    }
    out.facets.push_back({{lo}, Vector::Constant(1, -1.0), -points(lo, 0)});
    out.facets.push_back({{hi}, Vector::Constant(1, 1.0), points(hi, 0)});
  } else {
    detail::Quickhull hull(points, 1e-11 * detail::coordinate_scale(points));
    for (const auto& f : hull.facets())
      if (f.alive) out.facets.push_back(detail::to_hull_facet(f));
  }
  std::sort(out.facets.begin(), out.facets.end(),
            [](const HullFacet& a, const HullFacet& b) { return a.vertices < b.vertices; });
  std::vector<char> on_hull(static_cast<std::size_t>(n), 0);
  for (const auto& f : out.facets)
    for (Index v : f.vertices) on_hull[static_cast<std::size_t>(v)] = 1;
  for (Index i = 0; i < n; ++i)
    if (on_hull[static_cast<std::size_t>(i)]) out.hull_vertices.push_back(i);
  return out;
}

/// Delaunay triangulation of the rows of `points`. On a detected degeneracy
/// the coordinates are joggled (seeded by `joggle_seed`) and the computation
/// retried up to kMaxJoggleRetries times.
inline Triangulation delaunay(const Matrix& points, std::uint64_t joggle_seed = 0) {
  detail::check_finite(points);
  const Index n = points.rows();
  const Index d = points.cols();
  if (d < 1) throw Error(ErrorCode::DimensionTooSmall, "dimension must be >= 1");
  if (n < d + 1) {
    throw Error(ErrorCode::DimensionTooSmall,
                "need at least " + std::to_string(d + 1) + " points, got " + std::to_string(n));
  }
  // Rank check on the raw input; a joggle must not manufacture dimension.
  ConvexHull hull = convex_hull(points);

  Rng rng = make_rng(joggle_seed, 0x6a6f67676c65ull);
  Triangulation tri;
  tri.points = points;
  for (int attempt = 0; attempt <= kMaxJoggleRetries; ++attempt) {
    if (attempt > 0) {
      tri.points = detail::joggle(points, kJoggleMagnitude * std::pow(10.0, attempt - 1), rng);
      hull = convex_hull(tri.points);
    }
    bool ok = false;
    try {
      ok = detail::try_delaunay(tri.points, tri.simplices);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::DegenerateInput) throw;
    }
    if (ok) {
      tri.joggle_retries = attempt;
      tri.facets = std::move(hull.facets);
      tri.hull_vertex_count = static_cast<Index>(hull.hull_vertices.size());
      return tri;
    }
  }
  throw Error(ErrorCode::TriangulationFailed,
              "degeneracy persisted after " + std::to_string(kMaxJoggleRetries) + " joggles");
}

/// Whether `query` lies strictly inside the circumsphere of the simplex whose
/// (d+1) vertices are the rows of `simplex`. Uses the lifted determinant, which
/// divided by the orientation determinant equals the power r^2 - |q - c|^2.
inline bool circumsphere_contains(const Matrix& simplex, const Vector& query,
                                  double margin = kCircumsphereMargin) {
  const Index d = simplex.cols();
  if (simplex.rows() != d + 1 || query.size() != d) {
    throw Error(ErrorCode::DimensionMismatch, "simplex must be (d+1) x d and query length d");
  }
  Matrix edges(d, d);
  for (Index r = 0; r < d; ++r) edges.row(r) = simplex.row(r + 1) - simplex.row(0);
  const double orient = edges.determinant();
  double factorial = 1.0;
  for (Index k = 2; k <= d; ++k) factorial *= static_cast<double>(k);
  if (std::abs(orient) / factorial <= 1e-12) {
    throw Error(ErrorCode::DegenerateSimplex, "simplex volume below 1e-12");
  }
  Matrix lifted(d + 1, d + 1);
  for (Index r = 0; r <= d; ++r) {
    const Vector w = simplex.row(r).transpose() - query;
    lifted.row(r).head(d) = w.transpose();
    lifted(r, d) = w.squaredNorm();
  }
  const double sign = (d % 2 == 0) ? 1.0 : -1.0;
  const double power = lifted.determinant() / (sign * orient);
  return power > margin;
}

/// Vertex coordinates of simplex `j` as a (d+1) x d matrix.
inline Matrix simplex_vertices(const Triangulation& tri, std::size_t j) {
  const auto& s = tri.simplices.at(j);
  Matrix out(static_cast<Index>(s.size()), tri.dim());
  for (std::size_t r = 0; r < s.size(); ++r) out.row(static_cast<Index>(r)) = tri.points.row(s[r]);
  return out;
}

/// Debug dump: one simplex per line, space-separated vertex indices.
inline void write_simplices(std::ostream& os, const Triangulation& tri) {
  for (const auto& s : tri.simplices) {
    for (std::size_t k = 0; k < s.size(); ++k) os << (k ? " " : "") << s[k];
    os << '\n';
  }
}

}  // namespace tricands
