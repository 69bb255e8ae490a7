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

#ifndef UDBM_TRAINING_HPP
#define UDBM_TRAINING_HPP

#include <chrono>
#include <cstdint>
#include <functional>
#include <ostream>
#include <string>
#include <vector>

#include "udbm/coupling.hpp"
#include "udbm/estimator.hpp"
#include "udbm/init.hpp"
#include "udbm/model.hpp"
#include "udbm/optim.hpp"
#include "udbm/parallel.hpp"
#include "udbm/search.hpp"

namespace udbm {

/// Every knob of a training run. Defaults follow the reference setup (SGD, lr 1e-2).
struct TrainConfig {
  DbmShape shape{0, 0, 0};  // n_v = 0 is taken from the data
  Real learning_rate = 1e-2;
  OptimizerKind optimizer = OptimizerKind::kSgd;
  Index batch_size = 16;
  Index steps = 100'000;
  std::uint64_t seed = 0;
  Index tau_max = kDefaultMhTauMax;
  EstimatorKind estimator = EstimatorKind::kMarginalized;
  TruncationPolicy truncation_policy = TruncationPolicy::kError;
  Index checkpoint_every = 1000;
  unsigned threads = 0;  // 0 = hardware concurrency

  // data and outputs
  std::string data_path;
  std::string data_format = "idx";  // idx | bits | synthetic
  Index downscale = 0;              // square side after downscaling; 0 keeps the source size
  Index max_examples = 0;           // 0 = all
  Index synthetic_patterns = 4;
  Index synthetic_length = 8;
  std::string checkpoint_dir = "checkpoints";
  std::string log_path;             // empty = <checkpoint_dir>/train_log.csv
  std::string resume;
  Index resume_step = 0;
  bool log_wall_time = true;  // false writes wall_ms = 0 for byte-comparable logs

  void validate() const {
    if (!(learning_rate >= 0)) throw ConfigError("learning_rate must be >= 0");
    if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
    if (steps < 0) throw ConfigError("steps must be >= 0");
    if (tau_max < 1) throw ConfigError("tau_max must be >= 1");
    if (checkpoint_every < 0) throw ConfigError("checkpoint_every must be >= 0");
    if (resume_step < 0) throw ConfigError("resume_step must be >= 0");
  }

  EstimatorOptions estimator_options() const { return {estimator, tau_max, truncation_policy}; }

  OptimizerSettings optimizer_settings() const {
    OptimizerSettings s;
    s.kind = optimizer;
    s.learning_rate = learning_rate;
    return s;
  }
};

struct StepMetrics {
  std::uint64_t step = 0;
  Real mean_tau_pos = 0;
  Real mean_tau_neg = 0;
  Real mean_T_pos = 0;
  Real mean_T_neg = 0;
  Real grad_norm = 0;
  Index dropped = 0;
  Index max_tau = 0;
};

inline constexpr std::uint64_t kBatchStreamTag = 0xba7c'0000ULL;

/// Per-example RNG stream; the result never depends on thread scheduling.
inline Rng example_stream(std::uint64_t seed, std::uint64_t step, std::uint64_t example) {
  return Rng::stream(seed, {step, example});
}

/**
 * Averaged log-likelihood gradient estimate over a batch.
 *
 * Each example gets its own positive chain and its own negative chain;
 * its contribution is negative_phase - positive_phase. Dropped examples
 * (truncation_policy = drop_sample) are left out of the average.
 */
inline GradEstimate ucd_lmi_gradient(const DbmParams& p, const std::vector<SpinVec>& batch,
                                     const TrainConfig& cfg, std::uint64_t step,
                                     StepMetrics* metrics = nullptr) {
  if (batch.empty()) throw std::invalid_argument("ucd_lmi_gradient: empty batch");
  const DbmShape s = p.shape();
  const EstimatorOptions eo = cfg.estimator_options();
  struct Slot {
    PhaseEstimate pos;
    PhaseEstimate neg;
  };
  std::vector<Slot> slots(batch.size());
  parallel_for(batch.size(), resolve_threads(cfg.threads), [&](std::size_t e) {
    Rng rng = example_stream(cfg.seed, step, e);
    slots[e].pos = positive_phase_estimate(p, batch[e], eo, rng);
    slots[e].neg = negative_phase_estimate(p, eo, rng);
  });

  GradEstimate g = GradEstimate::zeros(s);
  StepMetrics m;
  m.step = step;
  Index kept = 0;
  for (const Slot& sl : slots) {
    m.mean_tau_pos += static_cast<Real>(sl.pos.tau);
    m.mean_tau_neg += static_cast<Real>(sl.neg.tau);
    m.mean_T_pos += static_cast<Real>(sl.pos.search_steps);
    m.mean_T_neg += static_cast<Real>(sl.neg.search_steps);
    m.max_tau = std::max({m.max_tau, sl.pos.tau, sl.neg.tau});
    if (sl.pos.dropped || sl.neg.dropped) {
      ++m.dropped;
      continue;
    }
    g += sl.neg.grad;
    g -= sl.pos.grad;
    ++kept;
  }
  const Real n = static_cast<Real>(batch.size());
  m.mean_tau_pos /= n;
  m.mean_tau_neg /= n;
  m.mean_T_pos /= n;
  m.mean_T_neg /= n;
  if (kept > 0) g *= 1.0 / static_cast<Real>(kept);
  m.grad_norm = g.norm();
  if (metrics) *metrics = m;
  return g;
}

/// One UCD-LMI parameter update; ascends the log-likelihood.
inline StepMetrics ucd_lmi_step(DbmParams& p, Optimizer& opt, const std::vector<SpinVec>& batch,
                                const TrainConfig& cfg, std::uint64_t step) {
  StepMetrics m;
  const GradEstimate g = ucd_lmi_gradient(p, batch, cfg, step, &m);
  if (m.dropped < static_cast<Index>(batch.size())) opt.step(p, g);
  if (!p.all_finite()) throw std::runtime_error("ucd_lmi_step: parameters became non-finite");
  return m;
}

/// Minibatch of dataset rows drawn uniformly with replacement.
inline std::vector<SpinVec> draw_batch(const std::vector<SpinVec>& data, Index batch_size,
                                       std::uint64_t seed, std::uint64_t step) {
  if (data.empty()) throw std::invalid_argument("draw_batch: empty dataset");
  Rng rng = Rng::stream(seed, {step, kBatchStreamTag});
  std::vector<SpinVec> batch;
  batch.reserve(static_cast<std::size_t>(batch_size));
  for (Index i = 0; i < batch_size; ++i) batch.push_back(data[rng.below(data.size())]);
  return batch;
}

/// Local mode followed by mh_steps uniform MH steps; returns the visible parts.
inline std::vector<SpinVec> sample(const DbmParams& p, std::size_t n, Index mh_steps, Rng& rng) {
  std::vector<SpinVec> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    JointState x = local_search_joint(p, rng).state;
    Real e = energy(p, x);
    for (Index t = 0; t < mh_steps; ++t) mh_step_joint(p, x, e, rng);
    out.push_back(std::move(x.v));
  }
  return out;
}

/// Fills missing visible units from a low-energy state found with the observed ones clamped.
inline SpinVec complete(const DbmParams& p, const SpinVec& v_observed, const Mask& mask, Rng& rng) {
  return local_search_clamped(p, v_observed, mask, rng).state.v;
}

inline constexpr const char* kTrainLogHeader =
    "step,mean_tau_pos,mean_tau_neg,mean_T_pos,mean_T_neg,grad_norm,wall_ms";

inline void write_log_row(std::ostream& os, const StepMetrics& m, long long wall_ms) {
  os << m.step << ',' << m.mean_tau_pos << ',' << m.mean_tau_neg << ',' << m.mean_T_pos << ','
     << m.mean_T_neg << ',' << m.grad_norm << ',' << wall_ms << '\n';
}

struct TrainHooks {
  std::function<void(const StepMetrics&, long long wall_ms)> on_step;
  std::function<void(std::uint64_t step, const DbmParams&)> on_checkpoint;
};

/**
 * Runs cfg.steps UCD-LMI updates starting at step cfg.resume_step.
 *
 * `on_step` sees every step's metrics; `on_checkpoint` is called with the
 * absolute step number every checkpoint_every steps and once at the end
 * (so steps = 0 still produces one checkpoint of the initial parameters).
 */
inline DbmParams train(DbmParams p, const std::vector<SpinVec>& data, const TrainConfig& cfg,
                       const TrainHooks& hooks = {}) {
  cfg.validate();
  p.validate();
  for (const auto& v : data) {
    if (v.size() != p.W1.rows()) throw DimensionError("train: example length does not match n_v");
  }
  Optimizer opt(cfg.optimizer_settings(), p.shape());
  const auto first = static_cast<std::uint64_t>(cfg.resume_step);
  const auto last = first + static_cast<std::uint64_t>(cfg.steps);
  for (std::uint64_t step = first; step < last; ++step) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto batch = draw_batch(data, cfg.batch_size, cfg.seed, step);
    const StepMetrics m = ucd_lmi_step(p, opt, batch, cfg, step);
    const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                        std::chrono::steady_clock::now() - t0)
                        .count();
    if (hooks.on_step) hooks.on_step(m, ms);
    const std::uint64_t done = step + 1;
    if (hooks.on_checkpoint && cfg.checkpoint_every > 0 &&
        done % static_cast<std::uint64_t>(cfg.checkpoint_every) == 0 && done != last) {
      hooks.on_checkpoint(done, p);
    }
  }
  if (hooks.on_checkpoint) hooks.on_checkpoint(last, p);
  return p;
}

}  // namespace udbm

#endif  // UDBM_TRAINING_HPP
