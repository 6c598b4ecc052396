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

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <vector>

#include "tricands/types.hpp"

namespace tricands {

struct NelderMeadOptions {
  double initial_step = 0.1;
  /// Converged when the value spread is below ftol * (1 + |best|) and every
  /// vertex is within xtol (sup-norm) of the best one.
  double ftol = 1e-10;
  double xtol = 1e-8;
  std::size_t max_evals = 1000;
  /// Optional box; trial points are projected onto it. Empty means unbounded.
  Vector lower;
  Vector upper;
};

struct NelderMeadResult {
  Vector x;
  double value = std::numeric_limits<double>::infinity();
  std::size_t evals = 0;
  bool converged = false;
};

/// Derivative-free minimization of `f` from `x0` with the standard
/// reflection / expansion / contraction / shrink moves (1, 2, 1/2, 1/2).
/// Non-finite objective values are treated as +infinity.
template <class F>
NelderMeadResult nelder_mead(F&& f, const Vector& x0, const NelderMeadOptions& opt = {}) {
  const Index d = x0.size();
  const bool boxed = opt.lower.size() == d && opt.upper.size() == d;
  auto project = [&](Vector x) {
    if (boxed) x = x.cwiseMax(opt.lower).cwiseMin(opt.upper);
    return x;
  };
  NelderMeadResult res;
  auto eval = [&](const Vector& x) {
    ++res.evals;
    const double v = f(x);
    return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
  };

  std::vector<Vector> simplex;
  std::vector<double> values;
  simplex.push_back(project(x0));
  values.push_back(eval(simplex[0]));
  for (Index k = 0; k < d && res.evals < opt.max_evals; ++k) {
    Vector x = simplex[0];
    double step = opt.initial_step;
    if (boxed && x(k) + step > opt.upper(k)) step = -step;
    x(k) += step;
    x = project(x);
    simplex.push_back(x);
    values.push_back(eval(x));
  }

  std::vector<std::size_t> order(simplex.size());
  auto sort_simplex = [&] {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return values[a] < values[b]; });
    std::vector<Vector> s2;
    std::vector<double> v2;
    for (auto i : order) {
      s2.push_back(std::move(simplex[i]));
      v2.push_back(values[i]);
    }
    simplex = std::move(s2);
    values = std::move(v2);
  };

  if (static_cast<Index>(simplex.size()) == d + 1) {
    while (res.evals < opt.max_evals) {
      sort_simplex();
      double xspread = 0.0;
      for (Index i = 1; i <= d; ++i) {
        xspread = std::max(xspread, (simplex[static_cast<std::size_t>(i)] - simplex[0]).cwiseAbs().maxCoeff());
      }
      const double fspread = values.back() - values.front();
      if (fspread <= opt.ftol * (1.0 + std::abs(values.front())) && xspread <= opt.xtol) {
        res.converged = true;
        break;
      }
      Vector centroid = Vector::Zero(d);
      for (Index i = 0; i < d; ++i) centroid += simplex[static_cast<std::size_t>(i)];
      centroid /= static_cast<double>(d);
      const Vector& worst = simplex.back();

      Vector xr = project(centroid + (centroid - worst));
      const double fr = eval(xr);
      if (fr < values.front()) {
        Vector xe = project(centroid + 2.0 * (centroid - worst));
        const double fe = res.evals < opt.max_evals ? eval(xe) : std::numeric_limits<double>::infinity();
        if (fe < fr) {
          simplex.back() = std::move(xe);
          values.back() = fe;
        } else {
          simplex.back() = std::move(xr);
          values.back() = fr;
        }
        continue;
      }
      if (fr < values[values.size() - 2]) {
        simplex.back() = std::move(xr);
        values.back() = fr;
        continue;
      }
      if (res.evals >= opt.max_evals) break;
      const bool outside = fr < values.back();
      Vector xc = outside ? project(centroid + 0.5 * (xr - centroid)) : project(centroid + 0.5 * (worst - centroid));
      const double fc = eval(xc);
      if (fc < (outside ? fr : values.back())) {
        simplex.back() = std::move(xc);
        values.back() = fc;
        continue;
      }
      for (std::size_t i = 1; i < simplex.size() && res.evals < opt.max_evals; ++i) {
        simplex[i] = project(simplex[0] + 0.5 * (simplex[i] - simplex[0]));
        values[i] = eval(simplex[i]);
      }
    }
  }
  const auto best = static_cast<std::size_t>(std::min_element(values.begin(), values.end()) - values.begin());
  res.x = simplex[best];
  res.value = values[best];
  return res;
}

}  // namespace tricands
