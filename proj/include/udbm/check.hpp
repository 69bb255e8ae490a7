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

#ifndef UDBM_CHECK_HPP
#define UDBM_CHECK_HPP

// Monte Carlo versus exact-enumeration check of the gradient estimators.

#include <cstdint>
#include <functional>
#include <ostream>
#include <string>
#include <vector>

#include "udbm/estimator.hpp"
#include "udbm/oracle.hpp"
#include "udbm/parallel.hpp"
#include "udbm/stats.hpp"

namespace udbm {

/**
 * Moments of fn(i) over i in [0, n).
 *
 * Draws are grouped into fixed blocks that are merged in index order, so
 * the result is identical for any thread count.
 */
inline MomentAccumulator sample_moments(std::size_t n, unsigned threads,
                                        const std::function<Vector(std::size_t)>& fn,
                                        std::size_t block = 2048) {
  const std::size_t blocks = (n + block - 1) / block;
  std::vector<MomentAccumulator> parts(blocks);
  parallel_for(blocks, resolve_threads(threads), [&](std::size_t b) {
    const std::size_t end = std::min(n, (b + 1) * block);
    for (std::size_t i = b * block; i < end; ++i) parts[b].add(fn(i));
  });
  MomentAccumulator total;
  for (const auto& p : parts) total.merge(p);
  return total;
}

/// Fixed 3-3-2 model with unit-scale Gaussian weights used by the built-in check.
inline DbmParams oracle_check_model(std::uint64_t seed) {
  Rng rng = Rng::stream(seed, {0x0c4e'c000ULL});
  DbmParams p = DbmParams::zeros({3, 3, 2});
  for (Index i = 0; i < p.W1.size(); ++i) p.W1.data()[i] = rng.normal();
  for (Index i = 0; i < p.W2.size(); ++i) p.W2.data()[i] = rng.normal();
  for (auto* b : {&p.b_v, &p.b_h1, &p.b_h2}) {
    for (Index i = 0; i < b->size(); ++i) (*b)[i] = sample_logistic(rng);
  }
  return p;
}

inline SpinVec oracle_check_visible() { return (SpinVec(3) << 1, -1, 1).finished(); }

/// Deliberately biased negative phase: one Gibbs sweep from uniform noise.
inline GradEstimate short_chain_negative_estimate(const DbmParams& p, EstimatorKind kind, Rng& rng) {
  JointState x = gibbs_sweep_joint(p, uniform_joint_state(p.shape(), rng), rng);
  if (kind == EstimatorKind::kPlain) return grad_energy(p, x);
  GradEstimate g = grad_energy_even_marginal(p, x.v, x.h2);
  g += grad_energy_odd_marginal(p, x.h1);
  return g *= 0.5;
}

/// One draw of the per-example log-likelihood gradient estimate.
inline GradEstimate loglik_gradient_draw(const DbmParams& p, const SpinVec& v, EstimatorKind kind,
                                         Index tau_max, bool biased_negative, Rng& rng) {
  const EstimatorOptions eo{kind, tau_max, TruncationPolicy::kError};
  const PhaseEstimate pos = positive_phase_estimate(p, v, eo, rng);
  if (biased_negative) return short_chain_negative_estimate(p, kind, rng) - pos.grad;
  return negative_phase_estimate(p, eo, rng).grad - pos.grad;
}

struct OracleCheckOptions {
  std::size_t n = 200'000;
  Real max_sigma = 4.0;
  /// Below this many draws a pass carries little evidence.
  std::size_t min_n = 10'000;
  bool inject_bias = false;
  std::uint64_t seed = 0;
  unsigned threads = 1;
  Index tau_max = kDefaultMhTauMax;
};

struct OracleCheckCase {
  EstimatorKind kind = EstimatorKind::kPlain;
  Vector exact;
  Vector mean;
  Vector standard_error;
  ZTestResult z;
};

struct OracleCheckReport {
  DbmShape shape;
  std::vector<OracleCheckCase> cases;
  bool low_power = false;

  bool all_pass() const {
    for (const auto& c : cases) {
      if (!c.z.pass) return false;
    }
    return true;
  }
};

/// z-tests both estimator kinds on `p` at visible vector `v`.
inline OracleCheckReport run_oracle_check(const DbmParams& p, const SpinVec& v, const OracleCheckOptions& opt) {
  OracleCheckReport rep;
  rep.shape = p.shape();
  rep.low_power = opt.n < opt.min_n;
  const Vector exact = exact_grad_loglik(p, v).flat();
  for (EstimatorKind kind : {EstimatorKind::kPlain, EstimatorKind::kMarginalized}) {
    const auto salt = static_cast<std::uint64_t>(kind);
    const MomentAccumulator acc = sample_moments(opt.n, opt.threads, [&](std::size_t i) {
      Rng rng = Rng::stream(opt.seed, {salt, static_cast<std::uint64_t>(i)});
      return loglik_gradient_draw(p, v, kind, opt.tau_max, opt.inject_bias, rng).flat();
    });
    OracleCheckCase c;
    c.kind = kind;
    c.exact = exact;
    c.mean = acc.mean();
    c.standard_error = acc.standard_error();
    c.z = z_test(acc, exact, opt.max_sigma);
    rep.cases.push_back(std::move(c));
  }
  return rep;
}

inline OracleCheckReport run_oracle_check(const OracleCheckOptions& opt) {
  return run_oracle_check(oracle_check_model(opt.seed), oracle_check_visible(), opt);
}

inline void print_oracle_report(const OracleCheckReport& rep, const OracleCheckOptions& opt, std::ostream& os) {
  os << "model " << rep.shape.str() << ", N = " << opt.n << ", threshold " << opt.max_sigma << " sigma"
     << (opt.inject_bias ? ", biased negative phase injected" : "") << '\n';
  for (const auto& c : rep.cases) {
    os << "[" << to_string(c.kind) << "]\n";
    for (Index k = 0; k < c.exact.size(); ++k) {
      os << "  " << component_name(rep.shape, k) << "  exact " << c.exact[k] << "  mean " << c.mean[k]
         << "  se " << c.standard_error[k] << "  z " << c.z.z[k]
         << (std::abs(c.z.z[k]) <= opt.max_sigma ? "" : "  FAIL") << '\n';
    }
    os << "  max |z| = " << c.z.max_abs_z << " at " << component_name(rep.shape, c.z.worst) << " -> "
       << (c.z.pass ? "pass" : "FAIL") << '\n';
  }
  if (rep.low_power) {
    os << "low power: N = " << opt.n << " is below " << opt.min_n << "; a pass here is not evidence\n";
  }
}

}  // namespace udbm

#endif  // UDBM_CHECK_HPP
