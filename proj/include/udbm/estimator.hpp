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

#ifndef UDBM_ESTIMATOR_HPP
#define UDBM_ESTIMATOR_HPP

#include <optional>
#include <string>

#include "udbm/coupling.hpp"
#include "udbm/model.hpp"
#include "udbm/search.hpp"

namespace udbm {

/// Which energy the telescoping sums differentiate.
enum class EstimatorKind {
  kPlain,         // dE at each chain state
  kMarginalized,  // average of the two marginal energies, one block summed out each
};

enum class TruncationPolicy {
  kError,       // throw TruncationError
  kDropSample,  // skip the example; reintroduces bias
};

inline std::string to_string(EstimatorKind k) {
  return k == EstimatorKind::kPlain ? "plain" : "marginalized";
}

inline std::optional<EstimatorKind> parse_estimator(const std::string& s) {
  if (s == "plain") return EstimatorKind::kPlain;
  if (s == "marginalized") return EstimatorKind::kMarginalized;
  return std::nullopt;
}

inline std::string to_string(TruncationPolicy p) {
  return p == TruncationPolicy::kError ? "error" : "drop_sample";
}

inline std::optional<TruncationPolicy> parse_truncation_policy(const std::string& s) {
  if (s == "error") return TruncationPolicy::kError;
  if (s == "drop_sample") return TruncationPolicy::kDropSample;
  return std::nullopt;
}

struct EstimatorOptions {
  EstimatorKind kind = EstimatorKind::kMarginalized;
  Index tau_max = kDefaultMhTauMax;
  TruncationPolicy truncation = TruncationPolicy::kError;
};

/// One telescoped estimate of a phase expectation of dE, with its costs.
struct PhaseEstimate {
  GradEstimate grad;
  Index tau = 0;
  Index search_steps = 0;
  bool dropped = false;
};

namespace detail {

template <class State, class GradFn>
PhaseEstimate finish_phase(const DbmShape& shape, const CoupledRun<State>& run, Index steps,
                           const EstimatorOptions& opt, GradFn&& fn) {
  PhaseEstimate est;
  est.tau = run.tau;
  est.search_steps = steps;
  if (run.truncated && opt.truncation == TruncationPolicy::kDropSample) {
    est.grad = GradEstimate::zeros(shape);
    est.dropped = true;
    return est;
  }
  est.grad = telescope_estimate(run, fn);
  return est;
}

}  // namespace detail

/**
 * Unbiased estimate of E_{P(h|v)}[dE(v, h)] (or its marginalized form).
 *
 * Local search on the posterior, one posterior Gibbs sweep, then the MH
 * coupling started at the perturbed mode.
 */
inline PhaseEstimate positive_phase_estimate(const DbmParams& p, const SpinVec& v,
                                             const EstimatorOptions& opt, Rng& rng) {
  const auto mode = local_search_posterior(p, v, rng);
  const HiddenState h0 = gibbs_sweep_posterior(p, v, mode.state, rng);
  const auto run = mh_couple_posterior(p, v, h0, opt.tau_max, rng);
  if (opt.kind == EstimatorKind::kPlain) {
    return detail::finish_phase(p.shape(), run, mode.steps, opt,
                                [&](const HiddenState& h) { return grad_energy(p, v, h); });
  }
  return detail::finish_phase(p.shape(), run, mode.steps, opt, [&](const HiddenState& h) {
    GradEstimate g = grad_energy_even_marginal(p, v, h.h2);
    g += grad_energy_odd_posterior(p, v, h.h1);
    return g *= 0.5;
  });
}

/// Unbiased estimate of E_{P(v,h)}[dE(v, h)] (or its marginalized form).
inline PhaseEstimate negative_phase_estimate(const DbmParams& p, const EstimatorOptions& opt,
                                             Rng& rng) {
  const auto mode = local_search_joint(p, rng);
  const JointState x0 = gibbs_sweep_joint(p, mode.state, rng);
  const auto run = mh_couple_joint(p, x0, opt.tau_max, rng);
  if (opt.kind == EstimatorKind::kPlain) {
    return detail::finish_phase(p.shape(), run, mode.steps, opt,
                                [&](const JointState& x) { return grad_energy(p, x); });
  }
  return detail::finish_phase(p.shape(), run, mode.steps, opt, [&](const JointState& x) {
    GradEstimate g = grad_energy_even_marginal(p, x.v, x.h2);
    g += grad_energy_odd_marginal(p, x.h1);
    return g *= 0.5;
  });
}

}  // namespace udbm

#endif  // UDBM_ESTIMATOR_HPP
