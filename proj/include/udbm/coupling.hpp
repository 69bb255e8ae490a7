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

#ifndef UDBM_COUPLING_HPP
#define UDBM_COUPLING_HPP

#include <cmath>
#include <utility>
#include <vector>

#include "udbm/model.hpp"
#include "udbm/rng.hpp"
#include "udbm/search.hpp"
#include "udbm/stats.hpp"

namespace udbm {

inline constexpr Index kDefaultMhTauMax = 10'000;
inline constexpr Index kDefaultGibbsTauMax = 1'000'000;

/**
 * A lag-1 coupled trajectory.
 *
 * x_states[t] holds x_t and y_states[t] holds y_t. The chains meet at the
 * first t = tau with x_t == y_{t-1}. Without extra simulation the run stops
 * there, so x_states has tau + 1 entries and y_states has tau.
 */
template <class State>
struct CoupledRun {
  std::vector<State> x_states;
  std::vector<State> y_states;
  Index tau = 0;
  bool truncated = false;
};

struct CouplingOptions {
  Index tau_max = kDefaultMhTauMax;
  /// Keep simulating past the meeting time until t reaches this value.
  Index min_length = 0;
  /// Benchmarks only need tau; set false to skip storing states.
  bool store_states = true;
};

namespace detail {

/**
 * Lag-1 maximal coupling of two MH chains sharing one uniform proposal and
 * one uniform acceptance variate per step.
 *
 * @param energy  state -> E(state)
 * @param propose rng -> state drawn uniformly
 */
template <class State, class EnergyFn, class ProposeFn>
CoupledRun<State> mh_couple(const State& x0, Index tau_max, Rng& rng, EnergyFn&& energy,
                            ProposeFn&& propose, const CouplingOptions& opt) {
  if (tau_max < 1) throw std::invalid_argument("mh_couple: tau_max must be >= 1");
  CoupledRun<State> run;
  State x = x0;      // x_t
  State y = x0;      // y_{t-1}
  Real ex = energy(x);
  Real ey = ex;
  if (opt.store_states) {
    run.x_states.push_back(x);
    run.y_states.push_back(y);
  }

  {
    State prop = propose(rng);
    const Real ep = energy(prop);
    const Real u = rng.uniform();
    if (u < std::exp(ex - ep)) {
      x = std::move(prop);
      ex = ep;
    }
    if (opt.store_states) run.x_states.push_back(x);
  }

  for (Index t = 1;; ++t) {
    if (run.tau == 0 && x == y) run.tau = t;
    if (run.tau > 0 && t >= opt.min_length) break;
    if (run.tau == 0 && t >= tau_max) {
      run.tau = t;
      run.truncated = true;
      break;
    }
    State prop = propose(rng);
    const Real ep = energy(prop);
    const Real u = rng.uniform();
    const bool accept_x = u < std::exp(ex - ep);
    const bool accept_y = u < std::exp(ey - ep);
    if (accept_y) {
      y = prop;
      ey = ep;
    }
    if (accept_x) {
      x = std::move(prop);
      ex = ep;
    }
    if (opt.store_states) {
      run.x_states.push_back(x);
      run.y_states.push_back(y);
    }
  }
  return run;
}

}  // namespace detail

/// MH maximal coupling targeting P(v, h1, h2), started at x_0 = y_0 = x0.
inline CoupledRun<JointState> mh_couple_joint(const DbmParams& p, const JointState& x0,
                                              Index tau_max, Rng& rng,
                                              CouplingOptions opt = {}) {
  detail::check_joint(p, x0.v, x0.h1, x0.h2);
  const DbmShape s = p.shape();
  return detail::mh_couple<JointState>(
      x0, tau_max, rng, [&](const JointState& x) { return energy(p, x); },
      [&](Rng& r) { return uniform_joint_state(s, r); }, opt);
}

/// MH maximal coupling targeting P(h1, h2 | v); both acceptance ratios use E(v, .).
inline CoupledRun<HiddenState> mh_couple_posterior(const DbmParams& p, const SpinVec& v,
                                                   const HiddenState& h0, Index tau_max, Rng& rng,
                                                   CouplingOptions opt = {}) {
  detail::check_joint(p, v, h0.h1, h0.h2);
  const DbmShape s = p.shape();
  return detail::mh_couple<HiddenState>(
      h0, tau_max, rng, [&](const HiddenState& h) { return energy(p, v, h); },
      [&](Rng& r) { return uniform_hidden_state(s, r); }, opt);
}

namespace detail {

// Shared-uniform coordinatewise coupling of two product-Bernoulli blocks.
inline void coupled_block(SpinVec& sx, const Vector& ax, SpinVec& sy, const Vector& ay, Rng& rng) {
  for (Index i = 0; i < ax.size(); ++i) {
    const Real u = rng.uniform();
    sx[i] = u < sigmoid(2.0 * ax[i]) ? 1.0 : -1.0;
    sy[i] = u < sigmoid(2.0 * ay[i]) ? 1.0 : -1.0;
  }
}

}  // namespace detail

/// Systematic-scan Gibbs kernel used by the coupled baseline: h1 first, then (v, h2).
inline void gibbs_scan(const DbmParams& p, JointState& x, Rng& rng) {
  gibbs_odd(p, x, rng);
  gibbs_even(p, x, rng);
}

/**
 * Lag-1 coupled Gibbs chains (the baseline coupling).
 *
 * x_1 is one systematic sweep from x0; afterwards each sweep advances
 * (x_t, y_{t-1}) jointly with a shared uniform per coordinate, which is a
 * maximal coupling of each pair of single-unit Bernoulli conditionals.
 */
inline CoupledRun<JointState> gibbs_couple_joint(const DbmParams& p, const JointState& x0,
                                                 const JointState& y0, Index tau_max, Rng& rng,
                                                 CouplingOptions opt = {}) {
  detail::check_joint(p, x0.v, x0.h1, x0.h2);
  detail::check_joint(p, y0.v, y0.h1, y0.h2);
  if (tau_max < 1) throw std::invalid_argument("gibbs_couple_joint: tau_max must be >= 1");
  CoupledRun<JointState> run;
  JointState x = x0;
  JointState y = y0;
  if (opt.store_states) {
    run.x_states.push_back(x);
    run.y_states.push_back(y);
  }
  gibbs_scan(p, x, rng);
  if (opt.store_states) run.x_states.push_back(x);

  for (Index t = 1;; ++t) {
    if (run.tau == 0 && x == y) run.tau = t;
    if (run.tau > 0 && t >= opt.min_length) break;
    if (run.tau == 0 && t >= tau_max) {
      run.tau = t;
      run.truncated = true;
      break;
    }
    detail::coupled_block(x.h1, local_fields_odd(p, x.v, x.h2), y.h1,
                          local_fields_odd(p, y.v, y.h2), rng);
    const EvenFields fx = local_fields_even(p, x.h1);
    const EvenFields fy = local_fields_even(p, y.h1);
    detail::coupled_block(x.v, fx.a_v, y.v, fy.a_v, rng);
    detail::coupled_block(x.h2, fx.a_h2, y.h2, fy.a_h2, rng);
    if (opt.store_states) {
      run.x_states.push_back(x);
      run.y_states.push_back(y);
    }
  }
  return run;
}

/**
 * Telescoping estimate f(x_0) + sum_{t=1}^{tau-1} [f(x_t) - f(y_{t-1})].
 *
 * Unbiased for E_pi[f] when the run met without truncation.
 */
template <class State, class GradFn>
GradEstimate telescope_estimate(const CoupledRun<State>& run, GradFn&& grad_fn) {
  if (run.truncated) {
    throw TruncationError("telescope_estimate: coupled run truncated at tau = " +
                          std::to_string(run.tau));
  }
  if (run.tau < 1 || static_cast<Index>(run.x_states.size()) < run.tau ||
      static_cast<Index>(run.y_states.size()) < run.tau - 1) {
    throw std::invalid_argument("telescope_estimate: run has no stored trajectory");
  }
  GradEstimate g = grad_fn(run.x_states[0]);
  for (Index t = 1; t < run.tau; ++t) {
    g += grad_fn(run.x_states[static_cast<std::size_t>(t)]);
    g -= grad_fn(run.y_states[static_cast<std::size_t>(t - 1)]);
  }
  return g;
}

/// One uncoupled uniform-proposal MH step on the joint state; e is E(x), updated in place.
inline void mh_step_joint(const DbmParams& p, JointState& x, Real& e, Rng& rng) {
  JointState prop = uniform_joint_state(p.shape(), rng);
  const Real ep = energy(p, prop);
  if (rng.uniform() < std::exp(e - ep)) {
    x = std::move(prop);
    e = ep;
  }
}

struct CouplingTimeStats {
  Summary tau;
  Summary search_steps;
  Summary total;
};

/// Aggregates (tau, T) pairs; total is tau + T.
inline CouplingTimeStats coupling_time_stats(const std::vector<std::pair<Index, Index>>& samples) {
  std::vector<Real> tau, steps, total;
  tau.reserve(samples.size());
  steps.reserve(samples.size());
  total.reserve(samples.size());
  for (const auto& [t, T] : samples) {
    tau.push_back(static_cast<Real>(t));
    steps.push_back(static_cast<Real>(T));
    total.push_back(static_cast<Real>(t + T));
  }
  return {summarize(tau), summarize(steps), summarize(total)};
}

}  // namespace udbm

#endif  // UDBM_COUPLING_HPP
