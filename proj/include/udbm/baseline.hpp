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

#ifndef UDBM_BASELINE_HPP
#define UDBM_BASELINE_HPP

// Persistent contrastive divergence with a mean-field positive phase.

#include <cstdint>
#include <vector>

#include "udbm/model.hpp"
#include "udbm/rng.hpp"
#include "udbm/search.hpp"

namespace udbm {

struct MeanFieldOptions {
  Real damping = 0.5;
  Real tol = 1e-4;
  Index max_iters = 50;
};

/// Factorized posterior Q(h | v) summarized by E_Q[h] in [-1, 1].
struct MeanFieldState {
  Vector mu_h1;
  Vector mu_h2;
  Index iterations = 0;
  bool converged = false;
};

/**
 * Damped fixed-point iteration for the mean-field posterior.
 *
 * The first pass is undamped (mu_h1 from v alone, then mu_h2 from mu_h1);
 * later passes blend each new tanh update with weight `damping` until the
 * largest change falls below `tol`. A non-converged result is still
 * returned, with converged == false.
 */
inline MeanFieldState mean_field_posterior(const DbmParams& p, const SpinVec& v,
                                           const MeanFieldOptions& opt = {}) {
  detail::require(v.size() == p.W1.rows(), "mean_field_posterior: v length");
  const Vector from_v = p.W1.transpose() * v + p.b_h1;
  MeanFieldState s;
  s.mu_h1 = tanh_of(from_v);
  s.mu_h2 = tanh_of(p.W2.transpose() * s.mu_h1 + p.b_h2);
  s.iterations = 1;
  while (s.iterations < opt.max_iters) {
    const Vector h1_new = (1.0 - opt.damping) * s.mu_h1 + opt.damping * tanh_of(from_v + p.W2 * s.mu_h2);
    const Vector h2_new = (1.0 - opt.damping) * s.mu_h2 + opt.damping * tanh_of(p.W2.transpose() * h1_new + p.b_h2);
    Real change = (h1_new - s.mu_h1).cwiseAbs().maxCoeff();
    if (h2_new.size() > 0) change = std::max(change, (h2_new - s.mu_h2).cwiseAbs().maxCoeff());
    s.mu_h1 = h1_new;
    s.mu_h2 = h2_new;
    ++s.iterations;
    if (change < opt.tol) {
      s.converged = true;
      break;
    }
  }
  return s;
}

/// dE evaluated at the mean-field means in place of the hidden spins.
inline GradEstimate mean_field_grad(const SpinVec& v, const MeanFieldState& q) {
  GradEstimate g;
  g.dW1 = -v * q.mu_h1.transpose();
  g.dW2 = -q.mu_h1 * q.mu_h2.transpose();
  g.db_v = -v;
  g.db_h1 = -q.mu_h1;
  g.db_h2 = -q.mu_h2;
  return g;
}

/// Advances one persistent chain by k sweeps and returns dE at its new state.
inline GradEstimate pcd_negative_estimate(const DbmParams& p, JointState& chain, Index k, Rng& rng) {
  for (Index i = 0; i < k; ++i) chain = gibbs_sweep_joint(p, std::move(chain), rng);
  return grad_energy(p, chain);
}

struct PcdOptions {
  Real learning_rate = 1e-2;
  Index gibbs_steps = 1;
  MeanFieldOptions mean_field;
  std::uint64_t seed = 0;
};

struct PcdMetrics {
  Real grad_norm = 0;
  Index unconverged_mean_field = 0;
};

inline std::vector<JointState> init_persistent_chains(const DbmShape& s, std::size_t n, Rng& rng) {
  std::vector<JointState> chains;
  chains.reserve(n);
  for (std::size_t i = 0; i < n; ++i) chains.push_back(uniform_joint_state(s, rng));
  return chains;
}

/// Log-likelihood ascent direction from mean-field positive and persistent-chain negative phases.
inline GradEstimate pcd_gradient(const DbmParams& p, const std::vector<SpinVec>& batch,
                                 std::vector<JointState>& chains, const PcdOptions& opt,
                                 std::uint64_t step, PcdMetrics* metrics = nullptr) {
  if (batch.empty() || chains.empty()) throw std::invalid_argument("pcd_gradient: empty batch or chains");
  const DbmShape s = p.shape();
  GradEstimate pos = GradEstimate::zeros(s);
  for (const auto& v : batch) {
    const MeanFieldState q = mean_field_posterior(p, v, opt.mean_field);
    if (metrics && !q.converged) ++metrics->unconverged_mean_field;
    pos += mean_field_grad(v, q);
  }
  pos *= 1.0 / static_cast<Real>(batch.size());
  GradEstimate neg = GradEstimate::zeros(s);
  for (std::size_t c = 0; c < chains.size(); ++c) {
    Rng rng = Rng::stream(opt.seed, {step, c, 0x5043'4400ULL});
    neg += pcd_negative_estimate(p, chains[c], opt.gibbs_steps, rng);
  }
  neg *= 1.0 / static_cast<Real>(chains.size());
  return neg - pos;
}

/// One SGD step of PCD; the persistent chains are updated in place.
inline PcdMetrics pcd_step(DbmParams& p, const std::vector<SpinVec>& batch,
                           std::vector<JointState>& chains, const PcdOptions& opt,
                           std::uint64_t step) {
  PcdMetrics m;
  const GradEstimate g = pcd_gradient(p, batch, chains, opt, step, &m);
  m.grad_norm = g.norm();
  apply_update(p, g, opt.learning_rate);
  return m;
}

}  // namespace udbm

#endif  // UDBM_BASELINE_HPP
