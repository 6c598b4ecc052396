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

// Brute-force and direct-solve reference computations used only by tests.
// Nothing here calls into the code paths it is used to check.

#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <set>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

/// Circumcenter and squared radius by solving 2 (v_i - v_0) . c = |v_i|^2 - |v_0|^2.
inline std::pair<VectorXd, double> circumsphere(const MatrixXd& simplex) {
  const Index d = simplex.cols();
  MatrixXd a(d, d);
  VectorXd b(d);
  for (Index i = 0; i < d; ++i) {
    a.row(i) = 2.0 * (simplex.row(i + 1) - simplex.row(0));
    b(i) = simplex.row(i + 1).squaredNorm() - simplex.row(0).squaredNorm();
  }
  VectorXd c = a.fullPivLu().solve(b);
  return {c, (simplex.row(0).transpose() - c).squaredNorm()};
}

/// Strictly inside the circumsphere by more than `tol` in distance.
inline bool strictly_inside(const MatrixXd& simplex, const VectorXd& q, double tol) {
  auto [c, r2] = circumsphere(simplex);
  return (q - c).norm() < std::sqrt(r2) - tol;
}

inline double simplex_volume(const MatrixXd& pts, const std::vector<Index>& s) {
  const Index d = pts.cols();
  MatrixXd e(d, d);
  for (Index r = 0; r < d; ++r) e.row(r) = pts.row(s[r + 1]) - pts.row(s[0]);
  double f = 1.0;
  for (Index k = 2; k <= d; ++k) f *= static_cast<double>(k);
  return std::abs(e.determinant()) / f;
}

/// Every d-subset whose supporting hyperplane leaves all points on one side.
/// Returns sorted vertex tuples. O(n^{d+1}).
inline std::set<std::vector<Index>> hull_facets(const MatrixXd& pts, double tol = 1e-10) {
  const Index n = pts.rows();
  const Index d = pts.cols();
  std::set<std::vector<Index>> out;
  std::vector<Index> pick(static_cast<std::size_t>(d));
  std::function<void(Index, Index)> rec = [&](Index start, Index depth) {
    if (depth == d) {
      // Normal from the kernel of the (d-1) x d edge matrix.
      MatrixXd e(d - 1, d);
      for (Index r = 0; r + 1 < d; ++r) e.row(r) = pts.row(pick[r + 1]) - pts.row(pick[0]);
      Eigen::FullPivLU<MatrixXd> lu(e);
      MatrixXd ker = lu.kernel();
      if (ker.cols() != 1) return;
      VectorXd nrm = ker.col(0).normalized();
      const double off = nrm.dot(pts.row(pick[0]).transpose());
      int pos = 0, neg = 0;
      for (Index i = 0; i < n; ++i) {
        const double s = nrm.dot(pts.row(i).transpose()) - off;
        if (s > tol) ++pos;
        if (s < -tol) ++neg;
      }
      if (pos == 0 || neg == 0) out.insert(pick);
      return;
    }
    for (Index i = start; i < n; ++i) {
      pick[depth] = i;
      rec(i + 1, depth + 1);
    }
  };
  rec(0, 0);
  return out;
}

/// Volume of the convex hull given its simplicial facets: sum of cones from
/// the vertex centroid.
template <class Facets>
double hull_volume(const MatrixXd& pts, const Facets& facets) {
  const Index d = pts.cols();
  VectorXd c = pts.colwise().mean().transpose();
  double f = 1.0;
  for (Index k = 2; k <= d; ++k) f *= static_cast<double>(k);
  double vol = 0.0;
  for (const auto& facet : facets) {
    MatrixXd e(d, d);
    for (Index r = 0; r + 1 < d; ++r)
      e.row(r) = pts.row(facet.vertices[r + 1]) - pts.row(facet.vertices[0]);
    e.row(d - 1) = pts.row(facet.vertices[0]) - c.transpose();
    vol += std::abs(e.determinant()) / f;
  }
  return vol;
}

/// Type-7 quantile via full sort.
inline double quantile7(std::vector<double> v, double p) {
  std::sort(v.begin(), v.end());
  const double h = (static_cast<double>(v.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (h - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

/// Spearman rank correlation (average ranks for ties).
inline double spearman(const std::vector<double>& a, const std::vector<double>& b) {
  auto ranks = [](const std::vector<double>& v) {
    std::vector<std::size_t> idx(v.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](auto i, auto j) { return v[i] < v[j]; });
    std::vector<double> r(v.size());
    for (std::size_t i = 0; i < idx.size();) {
      std::size_t j = i;
      while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
      for (std::size_t k = i; k <= j; ++k) r[idx[k]] = 0.5 * static_cast<double>(i + j) + 1.0;
      i = j + 1;
    }
    return r;
  };
  auto ra = ranks(a), rb = ranks(b);
  const double n = static_cast<double>(a.size());
  const double ma = std::accumulate(ra.begin(), ra.end(), 0.0) / n;
  const double mb = std::accumulate(rb.begin(), rb.end(), 0.0) / n;
  double sab = 0, saa = 0, sbb = 0;
  for (std::size_t i = 0; i < ra.size(); ++i) {
    sab += (ra[i] - ma) * (rb[i] - mb);
    saa += (ra[i] - ma) * (ra[i] - ma);
    sbb += (rb[i] - mb) * (rb[i] - mb);
  }
  return sab / std::sqrt(saa * sbb);
}

}  // namespace oracle

namespace oracle {

/// GP predictive equations evaluated by full-pivot LU solves: y standardized
/// by its sample mean/sd, tau2 = y' K^-1 y / n, latent predictive variance.
inline std::pair<VectorXd, VectorXd> gp_predict_direct(const MatrixXd& X, const VectorXd& Y,
                                                       const VectorXd& theta, double g, const MatrixXd& Xnew) {
  const Index n = X.rows();
  auto kern = [&](const auto& a, const auto& b) {
    double s = 0.0;
    for (Index k = 0; k < theta.size(); ++k) s += (a(k) - b(k)) * (a(k) - b(k)) / theta(k);
    return std::exp(-s);
  };
  const double mean = Y.mean();
  double sd = std::sqrt((Y.array() - mean).square().sum() / static_cast<double>(n - 1));
  if (sd == 0.0) sd = 1.0;
  VectorXd y = (Y.array() - mean) / sd;
  MatrixXd K(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) K(i, j) = kern(X.row(i), X.row(j)) + (i == j ? g : 0.0);
  Eigen::FullPivLU<MatrixXd> lu(K);
  const VectorXd a = lu.solve(y);
  const double tau2 = std::max(y.dot(a) / static_cast<double>(n), 1e-10);
  VectorXd mu(Xnew.rows()), s(Xnew.rows());
  for (Index r = 0; r < Xnew.rows(); ++r) {
    VectorXd k(n);
    for (Index i = 0; i < n; ++i) k(i) = kern(X.row(i), Xnew.row(r));
    mu(r) = mean + sd * k.dot(a);
    s(r) = sd * std::sqrt(std::max(0.0, tau2 * (1.0 - k.dot(lu.solve(k)))));
  }
  return {mu, s};
}

}  // namespace oracle
