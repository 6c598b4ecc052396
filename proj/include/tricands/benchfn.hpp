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

// Synthetic test objectives on coded inputs in [0,1]^d. Each function maps
// its coded argument affinely onto the usual native domain:
//
//   goldstein_price  [-2, 2]^2
//   hartmann6        [0, 1]^6
//   michalewicz4     [0, pi]^4   (steepness m = 10)
//   levy5            [-10, 10]^5
//   gramacy_lee_2d   [-2, 6]^2   x1 exp(-x1^2 - x2^2)

#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "tricands/error.hpp"
#include "tricands/types.hpp"

namespace tricands {

namespace detail {

inline void require_dim(const Vector& x, Index d, const char* name) {
  if (x.size() != d)
    throw Error(ErrorCode::DimensionMismatch,
                std::string(name) + " expects dimension " + std::to_string(d) + ", got " + std::to_string(x.size()));
}

}  // namespace detail

/// Raw Goldstein-Price on [-2,2]^2 (coded input). Minimum 3 at native (0,-1).
inline double goldstein_price_raw(const Vector& x) {
  detail::require_dim(x, 2, "goldstein_price");
  const double a = 4.0 * x(0) - 2.0;
  const double b = 4.0 * x(1) - 2.0;
  const double t1 = 1.0 + (a + b + 1.0) * (a + b + 1.0) *
                              (19.0 - 14.0 * a + 3.0 * a * a - 14.0 * b + 6.0 * a * b + 3.0 * b * b);
  const double t2 = 30.0 + (2.0 * a - 3.0 * b) * (2.0 * a - 3.0 * b) *
                               (18.0 - 32.0 * a + 12.0 * a * a + 48.0 * b - 36.0 * a * b + 27.0 * b * b);
  return t1 * t2;
}

/// Log-scaled Goldstein-Price, (log f - 8.693) / 2.427.
inline double goldstein_price(const Vector& x, bool raw = false) {
  const double f = goldstein_price_raw(x);
  return raw ? f : (std::log(f) - 8.693) / 2.427;
}

inline double hartmann6(const Vector& x) {
  detail::require_dim(x, 6, "hartmann6");
  static constexpr std::array<double, 4> alpha{1.0, 1.2, 3.0, 3.2};
  static constexpr double A[4][6] = {{10, 3, 17, 3.5, 1.7, 8},
                                     {0.05, 10, 17, 0.1, 8, 14},
                                     {3, 3.5, 1.7, 10, 17, 8},
                                     {17, 8, 0.05, 10, 0.1, 14}};
  static constexpr double P[4][6] = {{1312, 1696, 5569, 124, 8283, 5886},
                                     {2329, 4135, 8307, 3736, 1004, 9991},
                                     {2348, 1451, 3522, 2883, 3047, 6650},
                                     {4047, 8828, 8732, 5743, 1091, 381}};
  double out = 0.0;
  for (int i = 0; i < 4; ++i) {
    double inner = 0.0;
    for (int j = 0; j < 6; ++j) {
      const double diff = x(j) - 1e-4 * P[i][j];
      inner += A[i][j] * diff * diff;
    }
    out -= alpha[i] * std::exp(-inner);
  }
  return out;
}

inline double michalewicz4(const Vector& x) {
  detail::require_dim(x, 4, "michalewicz4");
  constexpr int m = 10;
  double out = 0.0;
  for (Index i = 0; i < 4; ++i) {
    const double xi = M_PI * x(i);
    const double s = std::sin(static_cast<double>(i + 1) * xi * xi / M_PI);
    out -= std::sin(xi) * std::pow(s, 2 * m);
  }
  return out;
}

inline double levy5(const Vector& x) {
  detail::require_dim(x, 5, "levy5");
  auto w = [&](Index i) { return 1.0 + (20.0 * x(i) - 10.0 - 1.0) / 4.0; };
  const double w0 = w(0);
  double out = std::pow(std::sin(M_PI * w0), 2);
  for (Index i = 0; i + 1 < 5; ++i) {
    const double wi = w(i);
    out += (wi - 1.0) * (wi - 1.0) * (1.0 + 10.0 * std::pow(std::sin(M_PI * wi + 1.0), 2));
  }
  const double wd = w(4);
  out += (wd - 1.0) * (wd - 1.0) * (1.0 + std::pow(std::sin(2.0 * M_PI * wd), 2));
  return out;
}

inline double gramacy_lee_2d(const Vector& x) {
  detail::require_dim(x, 2, "gramacy_lee_2d");
  const double a = 8.0 * x(0) - 2.0;
  const double b = 8.0 * x(1) - 2.0;
  return a * std::exp(-a * a - b * b);
}

struct Benchmark {
  std::string name;
  Index d = 0;
  std::function<double(const Vector&)> evaluate;
  std::optional<Vector> known_min_location;  // coded
  std::optional<double> known_min_value;

  double operator()(const Vector& x) const {
    if (x.size() != d) throw Error(ErrorCode::DimensionMismatch, name + " expects dimension " + std::to_string(d));
    return evaluate(x);
  }
};

namespace detail {

inline Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Index>(v.size()));
  Index i = 0;
  for (double e : v) out(i++) = e;
  return out;
}

}  // namespace detail

/// All registered benchmarks, in listing order.
inline const std::vector<Benchmark>& benchmark_registry() {
  static const std::vector<Benchmark> reg = [] {
    std::vector<Benchmark> r;
    r.push_back({"goldstein_price", 2, [](const Vector& x) { return goldstein_price(x); }, detail::vec({0.5, 0.25}),
                 (std::log(3.0) - 8.693) / 2.427});
    r.push_back({"goldstein_price_raw", 2, goldstein_price_raw, detail::vec({0.5, 0.25}), 3.0});
    r.push_back({"hartmann6", 6, hartmann6,
                 detail::vec({0.20168952, 0.15001069, 0.47687398, 0.27533243, 0.31165162, 0.65730054}), -3.32236801});
    r.push_back({"michalewicz4", 4, michalewicz4, std::nullopt, std::nullopt});
    r.push_back({"levy5", 5, levy5, Vector::Constant(5, 0.55), 0.0});
    r.push_back({"gramacy_lee_2d", 2, gramacy_lee_2d, std::nullopt, std::nullopt});
    return r;
  }();
  return reg;
}

inline const Benchmark& get_benchmark(const std::string& name) {
  for (const auto& b : benchmark_registry())
    if (b.name == name) return b;
  throw Error(ErrorCode::UnknownBenchmark, "unknown benchmark '" + name + "'");
}

}  // namespace tricands
