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

#ifndef UDBM_SEARCH_HPP
#define UDBM_SEARCH_HPP

#include <string>
#include <vector>

#include "udbm/model.hpp"
#include "udbm/rng.hpp"

namespace udbm {

/// Block-wise descent to a local mode, plus single Gibbs sweeps around it.
///
/// Every search starts from a uniform random state and flips a single coin
/// that decides whether the even (v, h2) or the odd (h1) block goes first
/// for the whole call. An iteration updates both blocks once; the search
/// stops at the first iteration that leaves the state unchanged and reports
/// that iteration count as `steps`.

template <class State>
struct SearchResult {
  State state;
  Index steps = 0;
  /// Energy after each iteration; filled only when requested.
  std::vector<Real> energies;
};

struct SearchOptions {
  /// 0 selects the default cap of (total units + 64).
  Index max_iterations = 0;
  bool record_energies = false;
};

inline Index default_search_cap(const DbmShape& s) { return s.total() + 64; }

namespace detail {

inline void sign_into(SpinVec& out, const Vector& field) {
  for (Index i = 0; i < field.size(); ++i) out[i] = spin_sign(field[i]);
}

inline void sample_into(SpinVec& out, const Vector& field, Rng& rng) {
  for (Index i = 0; i < field.size(); ++i) out[i] = rng.uniform() < sigmoid(2.0 * field[i]) ? 1.0 : -1.0;
}

inline Index resolve_cap(const SearchOptions& o, const DbmShape& s) {
  return o.max_iterations > 0 ? o.max_iterations : default_search_cap(s);
}

[[noreturn]] inline void throw_divergence(Index cap) {
  throw SearchDivergenceError("local search did not converge within " + std::to_string(cap) +
                              " iterations");
}

}  // namespace detail

/// v, h2 <- argmin E(. | h1)
inline void minimize_even(const DbmParams& p, JointState& x) {
  const EvenFields f = local_fields_even(p, x.h1);
  detail::sign_into(x.v, f.a_v);
  detail::sign_into(x.h2, f.a_h2);
}

/// h1 <- argmin E(. | v, h2)
inline void minimize_odd(const DbmParams& p, JointState& x) {
  detail::sign_into(x.h1, local_fields_odd(p, x.v, x.h2));
}

/// One full block-minimization iteration in the given order.
inline void minimize_iteration(const DbmParams& p, JointState& x, bool even_first) {
  if (even_first) {
    minimize_even(p, x);
    minimize_odd(p, x);
  } else {
    minimize_odd(p, x);
    minimize_even(p, x);
  }
}

inline JointState uniform_joint_state(const DbmShape& s, Rng& rng) {
  JointState x;
  x.v = rng.spins(s.n_v);
  x.h1 = rng.spins(s.n_h1);
  x.h2 = rng.spins(s.n_h2);
  return x;
}

inline HiddenState uniform_hidden_state(const DbmShape& s, Rng& rng) {
  HiddenState h;
  h.h1 = rng.spins(s.n_h1);
  h.h2 = rng.spins(s.n_h2);
  return h;
}

inline SearchResult<JointState> local_search_from(const DbmParams& p, JointState x, bool even_first,
                                                  const SearchOptions& opt = {}) {
  const Index cap = detail::resolve_cap(opt, p.shape());
  SearchResult<JointState> r;
  for (Index t = 1;; ++t) {
    if (t > cap) detail::throw_divergence(cap);
    const JointState prev = x;
    minimize_iteration(p, x, even_first);
    if (opt.record_energies) r.energies.push_back(energy(p, x));
    if (x == prev) {
      r.steps = t;
      break;
    }
  }
  r.state = std::move(x);
  return r;
}

/// Local mode of P(v, h1, h2) from a uniform random start.
inline SearchResult<JointState> local_search_joint(const DbmParams& p, Rng& rng,
                                                   const SearchOptions& opt = {}) {
  JointState x = uniform_joint_state(p.shape(), rng);
  const bool even_first = rng.uniform() < 0.5;
  return local_search_from(p, std::move(x), even_first, opt);
}

/// Local mode of P(h1, h2 | v) from a uniform random start.
inline SearchResult<HiddenState> local_search_posterior(const DbmParams& p, const SpinVec& v,
                                                        Rng& rng, const SearchOptions& opt = {}) {
  detail::require(v.size() == p.W1.rows(), "local_search_posterior: v length");
  const Index cap = detail::resolve_cap(opt, p.shape());
  HiddenState h = uniform_hidden_state(p.shape(), rng);
  const bool h2_first = rng.uniform() < 0.5;
  SearchResult<HiddenState> r;
  for (Index t = 1;; ++t) {
    if (t > cap) detail::throw_divergence(cap);
    const HiddenState prev = h;
    if (h2_first) {
      detail::sign_into(h.h2, p.W2.transpose() * h.h1 + p.b_h2);
      detail::sign_into(h.h1, local_fields_odd(p, v, h.h2));
    } else {
      detail::sign_into(h.h1, local_fields_odd(p, v, h.h2));
      detail::sign_into(h.h2, p.W2.transpose() * h.h1 + p.b_h2);
    }
    if (opt.record_energies) r.energies.push_back(energy(p, v, h));
    if (h == prev) {
      r.steps = t;
      break;
    }
  }
  r.state = std::move(h);
  return r;
}

/**
 * Local search with part of the visible layer clamped.
 *
 * Observed visible coordinates keep their input values throughout; missing
 * ones start uniform and are minimized like every other unit. An all-false
 * mask is the same as local_search_joint.
 */
inline SearchResult<JointState> local_search_clamped(const DbmParams& p, const SpinVec& v_observed,
                                                     const Mask& mask, Rng& rng,
                                                     const SearchOptions& opt = {}) {
  const DbmShape s = p.shape();
  detail::require(v_observed.size() == s.n_v && mask.size() == s.n_v,
                  "local_search_clamped: v/mask length");
  const Index cap = detail::resolve_cap(opt, s);
  JointState x = uniform_joint_state(s, rng);
  for (Index i = 0; i < s.n_v; ++i) {
    if (mask.observed[static_cast<std::size_t>(i)]) x.v[i] = v_observed[i];
  }
  const bool even_first = rng.uniform() < 0.5;

  auto even = [&] {
    const EvenFields f = local_fields_even(p, x.h1);
    for (Index i = 0; i < s.n_v; ++i) {
      if (!mask.observed[static_cast<std::size_t>(i)]) x.v[i] = spin_sign(f.a_v[i]);
    }
    detail::sign_into(x.h2, f.a_h2);
  };

  SearchResult<JointState> r;
  for (Index t = 1;; ++t) {
    if (t > cap) detail::throw_divergence(cap);
    const JointState prev = x;
    if (even_first) {
      even();
      minimize_odd(p, x);
    } else {
      minimize_odd(p, x);
      even();
    }
    if (opt.record_energies) r.energies.push_back(energy(p, x));
    if (x == prev) {
      r.steps = t;
      break;
    }
  }
  r.state = std::move(x);
  return r;
}

/// Resample (v, h2) from P(. | h1).
inline void gibbs_even(const DbmParams& p, JointState& x, Rng& rng) {
  const EvenFields f = local_fields_even(p, x.h1);
  detail::sample_into(x.v, f.a_v, rng);
  detail::sample_into(x.h2, f.a_h2, rng);
}

/// Resample h1 from P(. | v, h2).
inline void gibbs_odd(const DbmParams& p, JointState& x, Rng& rng) {
  detail::sample_into(x.h1, local_fields_odd(p, x.v, x.h2), rng);
}

/// One sweep over both blocks; a coin chooses which goes first.
inline JointState gibbs_sweep_joint(const DbmParams& p, JointState x, Rng& rng) {
  detail::check_joint(p, x.v, x.h1, x.h2);
  if (rng.uniform() < 0.5) {
    gibbs_even(p, x, rng);
    gibbs_odd(p, x, rng);
  } else {
    gibbs_odd(p, x, rng);
    gibbs_even(p, x, rng);
  }
  return x;
}

/// Posterior sweep with v clamped.
inline HiddenState gibbs_sweep_posterior(const DbmParams& p, const SpinVec& v, HiddenState h,
                                         Rng& rng) {
  detail::check_joint(p, v, h.h1, h.h2);
  auto top = [&] { detail::sample_into(h.h2, p.W2.transpose() * h.h1 + p.b_h2, rng); };
  auto mid = [&] { detail::sample_into(h.h1, local_fields_odd(p, v, h.h2), rng); };
  if (rng.uniform() < 0.5) {
    top();
    mid();
  } else {
    mid();
    top();
  }
  return h;
}

}  // namespace udbm

#endif  // UDBM_SEARCH_HPP
