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

#ifndef UDBM_MODEL_HPP
#define UDBM_MODEL_HPP

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "udbm/common.hpp"

namespace udbm {

using Index = Eigen::Index;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// A vector whose entries are all exactly -1 or +1.
using SpinVec = Eigen::VectorXd;

inline bool is_spin_vector(const Vector& s) {
  for (Index i = 0; i < s.size(); ++i) {
    if (s[i] != 1.0 && s[i] != -1.0) return false;
  }
  return true;
}

/**
 * Layer widths of a two-hidden-layer DBM.
 *
 * n_h2 == 0 is accepted and turns the model into an RBM (every W2/h2 term
 * vanishes); the coupling benchmark relies on it.
 */
struct DbmShape {
  Index n_v = 1;
  Index n_h1 = 1;
  Index n_h2 = 1;

  Index total() const { return n_v + n_h1 + n_h2; }
  Index hidden() const { return n_h1 + n_h2; }
  bool is_rbm() const { return n_h2 == 0; }

  void validate() const {
    if (n_v < 1 || n_h1 < 1 || n_h2 < 0) {
      throw DimensionError("DbmShape: need n_v >= 1, n_h1 >= 1, n_h2 >= 0, got " + str());
    }
  }

  std::string str() const {
    return std::to_string(n_v) + "-" + std::to_string(n_h1) + "-" + std::to_string(n_h2);
  }

  friend bool operator==(const DbmShape&, const DbmShape&) = default;
};

/// One configuration (v, h1, h2) of all units.
struct JointState {
  SpinVec v;
  SpinVec h1;
  SpinVec h2;

  friend bool operator==(const JointState& a, const JointState& b) {
    return a.v == b.v && a.h1 == b.h1 && a.h2 == b.h2;
  }
};

/// Hidden part (h1, h2) of a configuration; the visible layer is held elsewhere.
struct HiddenState {
  SpinVec h1;
  SpinVec h2;

  friend bool operator==(const HiddenState& a, const HiddenState& b) {
    return a.h1 == b.h1 && a.h2 == b.h2;
  }
};

/// Observed/missing flags over the visible units.
struct Mask {
  std::vector<bool> observed;

  Index size() const { return static_cast<Index>(observed.size()); }
  Index count_observed() const {
    Index n = 0;
    for (bool b : observed) n += b ? 1 : 0;
    return n;
  }
};

/// Parameters theta = {W1, W2, b_v, b_h1, b_h2}.
struct DbmParams {
  Matrix W1;  // n_v x n_h1
  Matrix W2;  // n_h1 x n_h2
  Vector b_v;
  Vector b_h1;
  Vector b_h2;

  static DbmParams zeros(const DbmShape& s) {
    s.validate();
    DbmParams p;
    p.W1 = Matrix::Zero(s.n_v, s.n_h1);
    p.W2 = Matrix::Zero(s.n_h1, s.n_h2);
    p.b_v = Vector::Zero(s.n_v);
    p.b_h1 = Vector::Zero(s.n_h1);
    p.b_h2 = Vector::Zero(s.n_h2);
    return p;
  }

  DbmShape shape() const { return {W1.rows(), W1.cols(), W2.cols()}; }

  /// Throws DimensionError unless all blocks agree with one another.
  void validate() const {
    const bool ok = W1.rows() >= 1 && W1.cols() >= 1 && W2.rows() == W1.cols() &&
                    b_v.size() == W1.rows() && b_h1.size() == W1.cols() &&
                    b_h2.size() == W2.cols();
    if (!ok) throw DimensionError("DbmParams: inconsistent block dimensions");
  }

  bool all_finite() const {
    return W1.allFinite() && W2.allFinite() && b_v.allFinite() && b_h1.allFinite() &&
           b_h2.allFinite();
  }
};

/**
 * Energy-gradient accumulator shaped like DbmParams.
 *
 * Holds either dE/dtheta at one state or a Monte Carlo combination of such
 * terms; the log-likelihood gradient is a signed combination of two of them.
 */
struct GradEstimate {
  Matrix dW1;
  Matrix dW2;
  Vector db_v;
  Vector db_h1;
  Vector db_h2;

  static GradEstimate zeros(const DbmShape& s) {
    GradEstimate g;
    g.dW1 = Matrix::Zero(s.n_v, s.n_h1);
    g.dW2 = Matrix::Zero(s.n_h1, s.n_h2);
    g.db_v = Vector::Zero(s.n_v);
    g.db_h1 = Vector::Zero(s.n_h1);
    g.db_h2 = Vector::Zero(s.n_h2);
    return g;
  }

  DbmShape shape() const { return {dW1.rows(), dW1.cols(), dW2.cols()}; }

  Index size() const {
    return dW1.size() + dW2.size() + db_v.size() + db_h1.size() + db_h2.size();
  }

  GradEstimate& operator+=(const GradEstimate& o) {
    dW1 += o.dW1;
    dW2 += o.dW2;
    db_v += o.db_v;
    db_h1 += o.db_h1;
    db_h2 += o.db_h2;
    return *this;
  }

  GradEstimate& operator-=(const GradEstimate& o) {
    dW1 -= o.dW1;
    dW2 -= o.dW2;
    db_v -= o.db_v;
    db_h1 -= o.db_h1;
    db_h2 -= o.db_h2;
    return *this;
  }

  GradEstimate& operator*=(Real c) {
    dW1 *= c;
    dW2 *= c;
    db_v *= c;
    db_h1 *= c;
    db_h2 *= c;
    return *this;
  }

  friend GradEstimate operator+(GradEstimate a, const GradEstimate& b) { return a += b; }
  friend GradEstimate operator-(GradEstimate a, const GradEstimate& b) { return a -= b; }
  friend GradEstimate operator*(GradEstimate a, Real c) { return a *= c; }
  friend GradEstimate operator*(Real c, GradEstimate a) { return a *= c; }
  friend GradEstimate operator-(GradEstimate a) { return a *= -1.0; }

  Real squared_norm() const {
    return dW1.squaredNorm() + dW2.squaredNorm() + db_v.squaredNorm() + db_h1.squaredNorm() +
           db_h2.squaredNorm();
  }
  Real norm() const { return std::sqrt(squared_norm()); }

  bool all_finite() const {
    return dW1.allFinite() && dW2.allFinite() && db_v.allFinite() && db_h1.allFinite() &&
           db_h2.allFinite();
  }

  /// Flattened view in the order W1 (row-major), W2 (row-major), b_v, b_h1, b_h2.
  Vector flat() const {
    Vector out(size());
    Index k = 0;
    for (Index i = 0; i < dW1.rows(); ++i)
      for (Index j = 0; j < dW1.cols(); ++j) out[k++] = dW1(i, j);
    for (Index i = 0; i < dW2.rows(); ++i)
      for (Index j = 0; j < dW2.cols(); ++j) out[k++] = dW2(i, j);
    for (Index i = 0; i < db_v.size(); ++i) out[k++] = db_v[i];
    for (Index i = 0; i < db_h1.size(); ++i) out[k++] = db_h1[i];
    for (Index i = 0; i < db_h2.size(); ++i) out[k++] = db_h2[i];
    return out;
  }

  static GradEstimate from_flat(const DbmShape& s, const Vector& f) {
    GradEstimate g = zeros(s);
    if (f.size() != g.size()) throw DimensionError("GradEstimate::from_flat: length mismatch");
    Index k = 0;
    for (Index i = 0; i < g.dW1.rows(); ++i)
      for (Index j = 0; j < g.dW1.cols(); ++j) g.dW1(i, j) = f[k++];
    for (Index i = 0; i < g.dW2.rows(); ++i)
      for (Index j = 0; j < g.dW2.cols(); ++j) g.dW2(i, j) = f[k++];
    for (Index i = 0; i < g.db_v.size(); ++i) g.db_v[i] = f[k++];
    for (Index i = 0; i < g.db_h1.size(); ++i) g.db_h1[i] = f[k++];
    for (Index i = 0; i < g.db_h2.size(); ++i) g.db_h2[i] = f[k++];
    return g;
  }
};

/// Human-readable name of flat component k, e.g. "W1[0,2]".
inline std::string component_name(const DbmShape& s, Index k) {
  auto pair = [](const char* n, Index i, Index j) {
    return std::string(n) + "[" + std::to_string(i) + "," + std::to_string(j) + "]";
  };
  auto single = [](const char* n, Index i) {
    return std::string(n) + "[" + std::to_string(i) + "]";
  };
  if (k < s.n_v * s.n_h1) return pair("W1", k / s.n_h1, k % s.n_h1);
  k -= s.n_v * s.n_h1;
  if (k < s.n_h1 * s.n_h2) return pair("W2", k / s.n_h2, k % s.n_h2);
  k -= s.n_h1 * s.n_h2;
  if (k < s.n_v) return single("b_v", k);
  k -= s.n_v;
  if (k < s.n_h1) return single("b_h1", k);
  return single("b_h2", k - s.n_h1);
}

/// theta += step * g
inline void apply_update(DbmParams& p, const GradEstimate& g, Real step) {
  p.W1.noalias() += step * g.dW1;
  p.W2.noalias() += step * g.dW2;
  p.b_v.noalias() += step * g.db_v;
  p.b_h1.noalias() += step * g.db_h1;
  p.b_h2.noalias() += step * g.db_h2;
}

namespace detail {

inline void require(bool ok, const char* what) {
  if (!ok) throw DimensionError(what);
}

inline void check_joint(const DbmParams& p, const SpinVec& v, const SpinVec& h1,
                        const SpinVec& h2) {
  require(v.size() == p.W1.rows() && h1.size() == p.W1.cols() && h2.size() == p.W2.cols(),
          "state does not match model shape");
}

}  // namespace detail

/// E(v, h1, h2) = -v'W1 h1 - h1'W2 h2 - b_v'v - b_h1'h1 - b_h2'h2
inline Real energy(const DbmParams& p, const SpinVec& v, const SpinVec& h1, const SpinVec& h2) {
  detail::check_joint(p, v, h1, h2);
  return -v.dot(p.W1 * h1) - h1.dot(p.W2 * h2) - p.b_v.dot(v) - p.b_h1.dot(h1) -
         p.b_h2.dot(h2);
}

inline Real energy(const DbmParams& p, const JointState& x) { return energy(p, x.v, x.h1, x.h2); }

inline Real energy(const DbmParams& p, const SpinVec& v, const HiddenState& h) {
  return energy(p, v, h.h1, h.h2);
}

struct EvenFields {
  Vector a_v;
  Vector a_h2;
};

/// Fields of the even layers (v, h2) given h1. P(s = +1 | h1) = sigmoid(2 a).
inline EvenFields local_fields_even(const DbmParams& p, const SpinVec& h1) {
  detail::require(h1.size() == p.W1.cols(), "local_fields_even: h1 length");
  return {p.W1 * h1 + p.b_v, p.W2.transpose() * h1 + p.b_h2};
}

/// Field of the odd layer h1 given (v, h2).
inline Vector local_fields_odd(const DbmParams& p, const SpinVec& v, const SpinVec& h2) {
  detail::require(v.size() == p.W1.rows() && h2.size() == p.W2.cols(),
                  "local_fields_odd: v/h2 length");
  return p.W1.transpose() * v + p.W2 * h2 + p.b_h1;
}

inline Real sum_logcosh(const Vector& a) {
  Real s = 0;
  for (Index i = 0; i < a.size(); ++i) s += logcosh(a[i]);
  return s;
}

inline Vector tanh_of(const Vector& a) { return a.array().tanh().matrix(); }

/// Energy of (v, h2) with h1 summed out, up to an additive constant.
inline Real energy_even_marginal(const DbmParams& p, const SpinVec& v, const SpinVec& h2) {
  const Vector a = local_fields_odd(p, v, h2);
  return -p.b_v.dot(v) - p.b_h2.dot(h2) - sum_logcosh(a);
}

/// Energy of h1 with v and h2 summed out, up to an additive constant.
inline Real energy_odd_marginal(const DbmParams& p, const SpinVec& h1) {
  const EvenFields f = local_fields_even(p, h1);
  return -p.b_h1.dot(h1) - sum_logcosh(f.a_v) - sum_logcosh(f.a_h2);
}

/// Energy of (v, h1) with h2 summed out, up to an additive constant.
inline Real energy_odd_posterior(const DbmParams& p, const SpinVec& v, const SpinVec& h1) {
  detail::require(v.size() == p.W1.rows() && h1.size() == p.W1.cols(),
                  "energy_odd_posterior: v/h1 length");
  const Vector a_h2 = p.W2.transpose() * h1 + p.b_h2;
  return -v.dot(p.W1 * h1) - p.b_v.dot(v) - p.b_h1.dot(h1) - sum_logcosh(a_h2);
}

/// dE/dtheta at a joint state.
inline GradEstimate grad_energy(const DbmParams& p, const SpinVec& v, const SpinVec& h1,
                                const SpinVec& h2) {
  detail::check_joint(p, v, h1, h2);
  GradEstimate g;
  g.dW1 = -v * h1.transpose();
  g.dW2 = -h1 * h2.transpose();
  g.db_v = -v;
  g.db_h1 = -h1;
  g.db_h2 = -h2;
  return g;
}

inline GradEstimate grad_energy(const DbmParams& p, const JointState& x) {
  return grad_energy(p, x.v, x.h1, x.h2);
}

inline GradEstimate grad_energy(const DbmParams& p, const SpinVec& v, const HiddenState& h) {
  return grad_energy(p, v, h.h1, h.h2);
}

inline GradEstimate grad_energy_even_marginal(const DbmParams& p, const SpinVec& v,
                                              const SpinVec& h2) {
  const Vector t = tanh_of(local_fields_odd(p, v, h2));
  GradEstimate g;
  g.dW1 = -v * t.transpose();
  g.dW2 = -t * h2.transpose();
  g.db_v = -v;
  g.db_h1 = -t;
  g.db_h2 = -h2;
  return g;
}

inline GradEstimate grad_energy_odd_marginal(const DbmParams& p, const SpinVec& h1) {
  const EvenFields f = local_fields_even(p, h1);
  const Vector tv = tanh_of(f.a_v);
  const Vector th2 = tanh_of(f.a_h2);
  GradEstimate g;
  g.dW1 = -tv * h1.transpose();
  g.dW2 = -h1 * th2.transpose();
  g.db_v = -tv;
  g.db_h1 = -h1;
  g.db_h2 = -th2;
  return g;
}

inline GradEstimate grad_energy_odd_posterior(const DbmParams& p, const SpinVec& v,
                                              const SpinVec& h1) {
  detail::require(v.size() == p.W1.rows() && h1.size() == p.W1.cols(),
                  "grad_energy_odd_posterior: v/h1 length");
  const Vector th2 = tanh_of(p.W2.transpose() * h1 + p.b_h2);
  GradEstimate g;
  g.dW1 = -v * h1.transpose();
  g.dW2 = -h1 * th2.transpose();
  g.db_v = -v;
  g.db_h1 = -h1;
  g.db_h2 = -th2;
  return g;
}

}  // namespace udbm

#endif  // UDBM_MODEL_HPP
