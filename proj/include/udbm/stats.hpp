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

#ifndef UDBM_STATS_HPP
#define UDBM_STATS_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "udbm/common.hpp"

namespace udbm {

struct Summary {
  std::size_t count = 0;
  Real mean = 0;
  Real variance = 0;  // unbiased; 0 for fewer than two samples
  Real min = 0;
  Real max = 0;
  Real median = 0;
  Real p05 = 0;
  Real p25 = 0;
  Real p75 = 0;
  Real p95 = 0;
};

/// Linear-interpolation quantile of already sorted data.
inline Real quantile_sorted(const std::vector<Real>& sorted, Real q) {
  if (sorted.empty()) throw std::invalid_argument("quantile of empty sample");
  const Real pos = q * static_cast<Real>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  const Real frac = pos - static_cast<Real>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

inline Summary summarize(std::vector<Real> xs) {
  Summary s;
  s.count = xs.size();
  if (xs.empty()) return s;
  Real sum = 0;
  for (Real x : xs) sum += x;
  s.mean = sum / static_cast<Real>(xs.size());
  if (xs.size() > 1) {
    Real ss = 0;
    for (Real x : xs) ss += (x - s.mean) * (x - s.mean);
    s.variance = ss / static_cast<Real>(xs.size() - 1);
  }
  std::sort(xs.begin(), xs.end());
  s.min = xs.front();
  s.max = xs.back();
  s.p05 = quantile_sorted(xs, 0.05);
  s.p25 = quantile_sorted(xs, 0.25);
  s.median = quantile_sorted(xs, 0.5);
  s.p75 = quantile_sorted(xs, 0.75);
  s.p95 = quantile_sorted(xs, 0.95);
  return s;
}

/// Componentwise streaming mean/variance (Welford).
class MomentAccumulator {
 public:
  explicit MomentAccumulator(Eigen::Index dim = 0)
      : mean_(Eigen::VectorXd::Zero(dim)), m2_(Eigen::VectorXd::Zero(dim)) {}

  void add(const Eigen::VectorXd& x) {
    if (mean_.size() == 0 && n_ == 0) {
      mean_ = Eigen::VectorXd::Zero(x.size());
      m2_ = Eigen::VectorXd::Zero(x.size());
    }
    ++n_;
    const Eigen::VectorXd delta = x - mean_;
    mean_ += delta / static_cast<Real>(n_);
    m2_ += delta.cwiseProduct(x - mean_);
  }

  /// Pooled moments of both samples (Chan et al. pairwise update).
  void merge(const MomentAccumulator& o) {
    if (o.n_ == 0) return;
    if (n_ == 0) {
      *this = o;
      return;
    }
    const Real na = static_cast<Real>(n_);
    const Real nb = static_cast<Real>(o.n_);
    const Real n = na + nb;
    const Eigen::VectorXd delta = o.mean_ - mean_;
    mean_ += delta * (nb / n);
    m2_ += o.m2_ + delta.cwiseProduct(delta) * (na * nb / n);
    n_ += o.n_;
  }

  std::uint64_t count() const { return n_; }
  const Eigen::VectorXd& mean() const { return mean_; }

  Eigen::VectorXd variance() const {
    if (n_ < 2) return Eigen::VectorXd::Zero(mean_.size());
    return m2_ / static_cast<Real>(n_ - 1);
  }

  /// Standard error of the mean, per component.
  Eigen::VectorXd standard_error() const {
    return (variance() / static_cast<Real>(std::max<std::uint64_t>(n_, 1))).cwiseSqrt();
  }

 private:
  std::uint64_t n_ = 0;
  Eigen::VectorXd mean_;
  Eigen::VectorXd m2_;
};

struct ZTestResult {
  Eigen::VectorXd z;  // (mean - expected) / se; +-inf where se is 0 and they differ
  Real max_abs_z = 0;
  Eigen::Index worst = 0;
  bool pass = true;
};

/// Componentwise z-test of a sample mean against exact values.
inline ZTestResult z_test(const MomentAccumulator& acc, const Eigen::VectorXd& expected,
                          Real max_sigma, Real zero_se_tol = 1e-12) {
  ZTestResult r;
  const Eigen::VectorXd se = acc.standard_error();
  r.z.resize(expected.size());
  for (Eigen::Index k = 0; k < expected.size(); ++k) {
    const Real diff = acc.mean()[k] - expected[k];
    Real z;
    if (se[k] > 0) {
      z = diff / se[k];
    } else {
      z = std::abs(diff) <= zero_se_tol
              ? 0.0
              : std::copysign(std::numeric_limits<Real>::infinity(), diff);
    }
    r.z[k] = z;
    if (std::abs(z) > r.max_abs_z) {
      r.max_abs_z = std::abs(z);
      r.worst = k;
    }
    if (!(std::abs(z) <= max_sigma)) r.pass = false;
  }
  return r;
}

/// Total-variation distance between two histograms with equal totals.
inline Real total_variation(const std::vector<Real>& p, const std::vector<Real>& q) {
  if (p.size() != q.size()) throw std::invalid_argument("total_variation: size mismatch");
  Real s = 0;
  for (std::size_t i = 0; i < p.size(); ++i) s += std::abs(p[i] - q[i]);
  return 0.5 * s;
}

}  // namespace udbm

#endif  // UDBM_STATS_HPP
