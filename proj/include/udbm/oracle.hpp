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

#ifndef UDBM_ORACLE_HPP
#define UDBM_ORACLE_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "udbm/model.hpp"

namespace udbm {

/// Brute-force ground truth for models small enough to enumerate.
///
/// States are indexed by an integer whose bit k is unit k, with units
/// ordered v, h1, h2 (hidden-only enumerations use h1, h2). A set bit is +1.

inline constexpr Index kMaxEnumerationUnits = 24;
inline constexpr Index kMaxTransitionMatrixUnits = 12;

struct ExactDistribution {
  std::vector<Real> probabilities;
  Real log_partition = 0;

  std::size_t size() const { return probabilities.size(); }
};

namespace detail {

inline void fill_spins(SpinVec& s, std::uint64_t idx, Index offset) {
  for (Index i = 0; i < s.size(); ++i) s[i] = ((idx >> (offset + i)) & 1U) ? 1.0 : -1.0;
}

inline std::uint64_t spins_bits(const SpinVec& s, Index offset) {
  std::uint64_t idx = 0;
  for (Index i = 0; i < s.size(); ++i) {
    if (s[i] > 0) idx |= std::uint64_t{1} << (offset + i);
  }
  return idx;
}

inline Real log_sum_exp(const std::vector<Real>& a) {
  if (a.empty()) return -std::numeric_limits<Real>::infinity();
  const Real m = *std::max_element(a.begin(), a.end());
  Real s = 0;
  for (Real x : a) s += std::exp(x - m);
  return m + std::log(s);
}

inline void check_enumerable(Index units, Index cap, const char* what) {
  if (units > cap) {
    throw SizeError(std::string(what) + ": " + std::to_string(units) +
                    " units exceeds enumeration cap of " + std::to_string(cap));
  }
}

}  // namespace detail

inline JointState joint_state_from_index(const DbmShape& s, std::uint64_t idx) {
  JointState x{SpinVec(s.n_v), SpinVec(s.n_h1), SpinVec(s.n_h2)};
  detail::fill_spins(x.v, idx, 0);
  detail::fill_spins(x.h1, idx, s.n_v);
  detail::fill_spins(x.h2, idx, s.n_v + s.n_h1);
  return x;
}

inline std::uint64_t joint_state_index(const DbmShape& s, const JointState& x) {
  return detail::spins_bits(x.v, 0) | detail::spins_bits(x.h1, s.n_v) |
         detail::spins_bits(x.h2, s.n_v + s.n_h1);
}

inline HiddenState hidden_state_from_index(const DbmShape& s, std::uint64_t idx) {
  HiddenState h{SpinVec(s.n_h1), SpinVec(s.n_h2)};
  detail::fill_spins(h.h1, idx, 0);
  detail::fill_spins(h.h2, idx, s.n_h1);
  return h;
}

inline std::uint64_t hidden_state_index(const DbmShape& s, const HiddenState& h) {
  return detail::spins_bits(h.h1, 0) | detail::spins_bits(h.h2, s.n_h1);
}

inline ExactDistribution distribution_from_energies(const std::vector<Real>& energies) {
  std::vector<Real> neg(energies.size());
  for (std::size_t i = 0; i < energies.size(); ++i) neg[i] = -energies[i];
  ExactDistribution d;
  d.log_partition = detail::log_sum_exp(neg);
  d.probabilities.resize(neg.size());
  for (std::size_t i = 0; i < neg.size(); ++i) d.probabilities[i] = std::exp(neg[i] - d.log_partition);
  return d;
}

/// Exact Boltzmann distribution P(v, h1, h2) over all 2^total states.
inline ExactDistribution enumerate_joint(const DbmParams& p) {
  p.validate();
  const DbmShape s = p.shape();
  detail::check_enumerable(s.total(), kMaxEnumerationUnits, "enumerate_joint");
  const std::uint64_t n = std::uint64_t{1} << s.total();
  std::vector<Real> e(n);
  JointState x{SpinVec(s.n_v), SpinVec(s.n_h1), SpinVec(s.n_h2)};
  for (std::uint64_t i = 0; i < n; ++i) {
    detail::fill_spins(x.v, i, 0);
    detail::fill_spins(x.h1, i, s.n_v);
    detail::fill_spins(x.h2, i, s.n_v + s.n_h1);
    e[i] = energy(p, x);
  }
  return distribution_from_energies(e);
}

/// Exact posterior P(h1, h2 | v) over all 2^(n_h1 + n_h2) hidden states.
inline ExactDistribution enumerate_posterior(const DbmParams& p, const SpinVec& v) {
  p.validate();
  const DbmShape s = p.shape();
  detail::require(v.size() == s.n_v, "enumerate_posterior: v length");
  detail::check_enumerable(s.hidden(), kMaxEnumerationUnits, "enumerate_posterior");
  const std::uint64_t n = std::uint64_t{1} << s.hidden();
  std::vector<Real> e(n);
  HiddenState h{SpinVec(s.n_h1), SpinVec(s.n_h2)};
  for (std::uint64_t i = 0; i < n; ++i) {
    detail::fill_spins(h.h1, i, 0);
    detail::fill_spins(h.h2, i, s.n_h1);
    e[i] = energy(p, v, h);
  }
  return distribution_from_energies(e);
}

/// sum_x P(x) f(x) over an enumerated joint distribution.
template <class Fn>
GradEstimate expect_joint(const DbmParams& p, const ExactDistribution& d, Fn&& f) {
  const DbmShape s = p.shape();
  GradEstimate g = GradEstimate::zeros(s);
  for (std::uint64_t i = 0; i < d.size(); ++i) {
    if (d.probabilities[i] == 0) continue;
    g += f(joint_state_from_index(s, i)) * d.probabilities[i];
  }
  return g;
}

template <class Fn>
GradEstimate expect_posterior(const DbmParams& p, const ExactDistribution& d, Fn&& f) {
  const DbmShape s = p.shape();
  GradEstimate g = GradEstimate::zeros(s);
  for (std::uint64_t i = 0; i < d.size(); ++i) {
    if (d.probabilities[i] == 0) continue;
    g += f(hidden_state_from_index(s, i)) * d.probabilities[i];
  }
  return g;
}

namespace detail {

// g += w * dE(v, h1, h2), without temporaries.
inline void add_weighted_grad_energy(GradEstimate& g, Real w, const SpinVec& v, const SpinVec& h1,
                                     const SpinVec& h2) {
  g.dW1.noalias() -= (w * v) * h1.transpose();
  g.dW2.noalias() -= (w * h1) * h2.transpose();
  g.db_v.noalias() -= w * v;
  g.db_h1.noalias() -= w * h1;
  g.db_h2.noalias() -= w * h2;
}

}  // namespace detail

/// E_{P(h|v)}[dE(v, h)]
inline GradEstimate exact_positive_phase(const DbmParams& p, const SpinVec& v) {
  const DbmShape s = p.shape();
  const ExactDistribution d = enumerate_posterior(p, v);
  GradEstimate g = GradEstimate::zeros(s);
  HiddenState h{SpinVec(s.n_h1), SpinVec(s.n_h2)};
  for (std::uint64_t i = 0; i < d.size(); ++i) {
    if (d.probabilities[i] == 0) continue;
    detail::fill_spins(h.h1, i, 0);
    detail::fill_spins(h.h2, i, s.n_h1);
    detail::add_weighted_grad_energy(g, d.probabilities[i], v, h.h1, h.h2);
  }
  return g;
}

/// E_{P(v,h)}[dE(v, h)]
inline GradEstimate exact_negative_phase(const DbmParams& p) {
  const DbmShape s = p.shape();
  const ExactDistribution d = enumerate_joint(p);
  GradEstimate g = GradEstimate::zeros(s);
  JointState x{SpinVec(s.n_v), SpinVec(s.n_h1), SpinVec(s.n_h2)};
  for (std::uint64_t i = 0; i < d.size(); ++i) {
    if (d.probabilities[i] == 0) continue;
    detail::fill_spins(x.v, i, 0);
    detail::fill_spins(x.h1, i, s.n_v);
    detail::fill_spins(x.h2, i, s.n_v + s.n_h1);
    detail::add_weighted_grad_energy(g, d.probabilities[i], x.v, x.h1, x.h2);
  }
  return g;
}

/// 1/2 E_{P(h|v)}[d(E_even(v, h2) + E~_odd(v, h1))]
inline GradEstimate exact_positive_phase_marginalized(const DbmParams& p, const SpinVec& v) {
  const ExactDistribution d = enumerate_posterior(p, v);
  return expect_posterior(p, d, [&](const HiddenState& h) {
    return (grad_energy_even_marginal(p, v, h.h2) + grad_energy_odd_posterior(p, v, h.h1)) * 0.5;
  });
}

/// 1/2 E_{P(v,h)}[d(E_even(v, h2) + E_odd(h1))]
inline GradEstimate exact_negative_phase_marginalized(const DbmParams& p) {
  const ExactDistribution d = enumerate_joint(p);
  return expect_joint(p, d, [&](const JointState& x) {
    return (grad_energy_even_marginal(p, x.v, x.h2) + grad_energy_odd_marginal(p, x.h1)) * 0.5;
  });
}

/// d/dtheta log p(v) = -E_{P(h|v)}[dE] + E_{P(v,h)}[dE], both exact.
inline GradEstimate exact_grad_loglik(const DbmParams& p, const SpinVec& v) {
  return exact_negative_phase(p) - exact_positive_phase(p, v);
}

/// The same gradient written with the marginal energies.
inline GradEstimate exact_grad_loglik_marginalized(const DbmParams& p, const SpinVec& v) {
  return exact_negative_phase_marginalized(p) - exact_positive_phase_marginalized(p, v);
}

/// log p(v) given a precomputed log partition function.
inline Real exact_log_prob_visible(const DbmParams& p, const SpinVec& v, Real log_partition) {
  return enumerate_posterior(p, v).log_partition - log_partition;
}

/// Mean of log p(v) over the dataset.
inline Real exact_loglik(const DbmParams& p, const std::vector<SpinVec>& data) {
  if (data.empty()) throw std::invalid_argument("exact_loglik: empty dataset");
  const Real log_z = enumerate_joint(p).log_partition;
  Real s = 0;
  for (const auto& v : data) s += exact_log_prob_visible(p, v, log_z);
  return s / static_cast<Real>(data.size());
}

/**
 * Transition matrix of uniform-proposal MH over the joint state space.
 *
 * Entry (i, j) = Q(j) min(1, exp(E_i - E_j)) for j != i, with Q uniform over
 * all 2^total states (including i itself); the diagonal takes the rest.
 */
inline Matrix exact_mh_transition_matrix(const DbmParams& p) {
  p.validate();
  const DbmShape s = p.shape();
  detail::check_enumerable(s.total(), kMaxTransitionMatrixUnits, "exact_mh_transition_matrix");
  const auto n = static_cast<Index>(std::uint64_t{1} << s.total());
  std::vector<Real> e(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) e[static_cast<std::size_t>(i)] = energy(p, joint_state_from_index(s, static_cast<std::uint64_t>(i)));
  const Real q = 1.0 / static_cast<Real>(n);
  Matrix P = Matrix::Zero(n, n);
  for (Index i = 0; i < n; ++i) {
    Real off = 0;
    for (Index j = 0; j < n; ++j) {
      if (j == i) continue;
      const Real a = std::min(1.0, std::exp(e[static_cast<std::size_t>(i)] - e[static_cast<std::size_t>(j)]));
      P(i, j) = q * a;
      off += P(i, j);
    }
    P(i, i) = 1.0 - off;
  }
  return P;
}

}  // namespace udbm

#endif  // UDBM_ORACLE_HPP
