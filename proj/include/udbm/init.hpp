// Copyright 2026 The udbm Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef UDBM_INIT_HPP
#define UDBM_INIT_HPP

#include <cmath>

#include <Eigen/QR>

#include "udbm/model.hpp"
#include "udbm/rng.hpp"

namespace udbm {

inline constexpr Real kBiasLogisticScale = 0.5;

/**
 * Haar-uniform semi-orthogonal rows x cols matrix.
 *
 * A Gaussian matrix is QR-factorized and the columns of Q are multiplied by
 * the signs of diag(R), which makes the distribution exactly uniform. When
 * rows < cols the construction runs on the transpose, so the rows come out
 * orthonormal instead: orthonormality always holds along the smaller side.
 */
inline Matrix random_semi_orthogonal(Index rows, Index cols, Rng& rng) {
  if (rows == 0 || cols == 0) return Matrix::Zero(rows, cols);
  const bool tall = rows >= cols;
  const Index m = tall ? rows : cols;
  const Index n = tall ? cols : rows;
  Matrix g(m, n);
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i < m; ++i) g(i, j) = rng.normal();
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ() * Matrix::Identity(m, n);
  const Matrix& r = qr.matrixQR();
  for (Index j = 0; j < n; ++j) {
    if (r(j, j) < 0) q.col(j) *= -1.0;
  }
  if (tall) return q;
  return q.transpose();
}

/// Logistic(0, scale) by inverse CDF.
inline Real sample_logistic(Rng& rng, Real scale = kBiasLogisticScale) {
  const Real u = rng.uniform_open();
  return scale * std::log(u / (1.0 - u));
}

/// Orthogonal weights and Logistic(0, 0.5) biases.
inline DbmParams init_params(const DbmShape& shape, Rng& rng) {
  shape.validate();
  DbmParams p = DbmParams::zeros(shape);
  p.W1 = random_semi_orthogonal(shape.n_v, shape.n_h1, rng);
  p.W2 = random_semi_orthogonal(shape.n_h1, shape.n_h2, rng);
  for (Index i = 0; i < p.b_v.size(); ++i) p.b_v[i] = sample_logistic(rng);
  for (Index i = 0; i < p.b_h1.size(); ++i) p.b_h1[i] = sample_logistic(rng);
  for (Index i = 0; i < p.b_h2.size(); ++i) p.b_h2[i] = sample_logistic(rng);
  return p;
}

}  // namespace udbm

#endif  // UDBM_INIT_HPP
