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

#include <cstdint>
#include <random>

#include <Eigen/Dense>

namespace tricands {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// All randomness flows through explicitly passed engines of this type.
using Rng = std::mt19937_64;

/// Independent stream for (seed, stream) so that e.g. the initial design and
/// the acquisition randomness of a run never share state.
inline Rng make_rng(std::uint64_t seed, std::uint64_t stream = 0) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  return Rng(seq);
}

inline double uniform01(Rng& rng) {
  return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

/// n x d matrix of i.i.d. U[0,1) entries, filled row by row.
inline Matrix uniform_matrix(Index n, Index d, Rng& rng) {
  Matrix m(n, d);
  for (Index i = 0; i < n; ++i)
    for (Index k = 0; k < d; ++k) m(i, k) = uniform01(rng);
  return m;
}

}  // namespace tricands
