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

#include <gtest/gtest.h>

#include <cmath>

#include "support.hpp"

namespace udbm {
namespace {

using testing::all_spin_vectors;
using testing::random_params;
using testing::spins_of;

// Term-by-term reference for the joint energy.
Real scalar_energy(const DbmParams& p, const JointState& x) {
  Real e = 0;
  for (Index i = 0; i < p.W1.rows(); ++i)
    for (Index j = 0; j < p.W1.cols(); ++j) e -= x.v[i] * p.W1(i, j) * x.h1[j];
  for (Index j = 0; j < p.W2.rows(); ++j)
    for (Index k = 0; k < p.W2.cols(); ++k) e -= x.h1[j] * p.W2(j, k) * x.h2[k];
  for (Index i = 0; i < x.v.size(); ++i) e -= p.b_v[i] * x.v[i];
  for (Index j = 0; j < x.h1.size(); ++j) e -= p.b_h1[j] * x.h1[j];
  for (Index k = 0; k < x.h2.size(); ++k) e -= p.b_h2[k] * x.h2[k];
  return e;
}

Real log_sum_exp_neg(const std::vector<Real>& energies) {
  Real m = -std::numeric_limits<Real>::infinity();
  for (Real e : energies) m = std::max(m, -e);
  Real s = 0;
  for (Real e : energies) s += std::exp(-e - m);
  return m + std::log(s);
}

TEST(Energy, ZeroParamsGiveZero) {
  const DbmParams p = DbmParams::zeros({3, 2, 2});
  Rng rng(1);
  for (int t = 0; t < 10; ++t) EXPECT_EQ(energy(p, uniform_joint_state(p.shape(), rng)), 0.0);
}

TEST(Energy, SingleUnitChain) {
  DbmParams p = DbmParams::zeros({1, 1, 1});
  p.W1(0, 0) = 1;
  p.W2(0, 0) = 1;
  const JointState x{spins_of({1}), spins_of({1}), spins_of({1})};
  EXPECT_DOUBLE_EQ(energy(p, x), -2.0);
}

TEST(Energy, MatchesScalarLoop) {
  Rng rng(2);
  for (int t = 0; t < 20; ++t) {
    const DbmParams p = random_params({3, 3, 2}, rng);
    const JointState x = uniform_joint_state(p.shape(), rng);
    EXPECT_NEAR(energy(p, x), scalar_energy(p, x), 1e-12);
  }
}

TEST(Energy, RejectsShapeMismatch) {
  const DbmParams p = DbmParams::zeros({3, 2, 2});
  const JointState bad{SpinVec::Ones(2), SpinVec::Ones(2), SpinVec::Ones(2)};
  EXPECT_THROW(energy(p, bad), DimensionError);
  EXPECT_THROW(local_fields_even(p, SpinVec::Ones(3)), DimensionError);
  EXPECT_THROW(grad_energy(p, bad), DimensionError);
}

TEST(Shape, Validation) {
  EXPECT_THROW((DbmShape{0, 1, 1}.validate()), DimensionError);
  EXPECT_THROW((DbmShape{1, 0, 1}.validate()), DimensionError);
  EXPECT_NO_THROW((DbmShape{2, 2, 0}.validate()));
  EXPECT_EQ((DbmShape{3, 4, 5}.total()), 12);
}

TEST(LocalFields, ZeroParams) {
  const DbmParams p = DbmParams::zeros({3, 3, 2});
  const EvenFields f = local_fields_even(p, SpinVec::Ones(3));
  EXPECT_TRUE(f.a_v.isZero(0));
  EXPECT_TRUE(f.a_h2.isZero(0));
  EXPECT_TRUE(local_fields_odd(p, SpinVec::Ones(3), SpinVec::Ones(2)).isZero(0));
  EXPECT_DOUBLE_EQ(sigmoid(2 * f.a_v[0]), 0.5);
}

TEST(LocalFields, SingleVisibleConditional) {
  DbmParams p = DbmParams::zeros({1, 1, 1});
  p.W1(0, 0) = 3;
  const EvenFields f = local_fields_even(p, spins_of({1}));
  EXPECT_DOUBLE_EQ(f.a_v[0], 3.0);
  // normalize exp(-E) over both values of v
  const Real ep = energy(p, spins_of({1}), spins_of({1}), spins_of({1}));
  const Real em = energy(p, spins_of({-1}), spins_of({1}), spins_of({1}));
  const Real p_plus = std::exp(-ep) / (std::exp(-ep) + std::exp(-em));
  EXPECT_NEAR(sigmoid(2 * f.a_v[0]), p_plus, 1e-15);
  EXPECT_NEAR(p_plus, sigmoid(6.0), 1e-15);
}

TEST(LocalFields, OddCancellation) {
  DbmParams p = DbmParams::zeros({1, 1, 1});
  p.W1(0, 0) = 1;
  p.W2(0, 0) = 1;
  EXPECT_DOUBLE_EQ(local_fields_odd(p, spins_of({1}), spins_of({-1}))[0], 0.0);
}

// Exhaustive Gibbs consistency: sigma(2a) equals the two-point conditional for every unit and state.
void check_gibbs_consistency(const DbmShape& shape, std::uint64_t seed) {
  Rng rng(seed);
  const DbmParams p = random_params(shape, rng);
  for (std::uint64_t idx = 0; idx < (std::uint64_t{1} << shape.total()); ++idx) {
    const JointState x = joint_state_from_index(shape, idx);
    const EvenFields ef = local_fields_even(p, x.h1);
    const Vector a_h1 = local_fields_odd(p, x.v, x.h2);
    auto conditional = [&](SpinVec JointState::*block, Index i) {
      JointState up = x, down = x;
      (up.*block)[i] = 1;
      (down.*block)[i] = -1;
      const Real eu = energy(p, up), ed = energy(p, down);
      return 1.0 / (1.0 + std::exp(eu - ed));
    };
    for (Index i = 0; i < shape.n_v; ++i) EXPECT_NEAR(sigmoid(2 * ef.a_v[i]), conditional(&JointState::v, i), 1e-12);
    for (Index j = 0; j < shape.n_h1; ++j) EXPECT_NEAR(sigmoid(2 * a_h1[j]), conditional(&JointState::h1, j), 1e-12);
    for (Index k = 0; k < shape.n_h2; ++k) EXPECT_NEAR(sigmoid(2 * ef.a_h2[k]), conditional(&JointState::h2, k), 1e-12);
  }
}

TEST(LocalFields, GibbsConsistency332) { check_gibbs_consistency({3, 3, 2}, 3); }
TEST(LocalFields, GibbsConsistency432) { check_gibbs_consistency({4, 3, 2}, 4); }

TEST(MarginalEnergy, ZeroParams) {
  const DbmParams p = DbmParams::zeros({3, 3, 2});
  EXPECT_EQ(energy_even_marginal(p, SpinVec::Ones(3), SpinVec::Ones(2)), 0.0);
  EXPECT_EQ(energy_odd_marginal(p, SpinVec::Ones(3)), 0.0);
  EXPECT_EQ(energy_odd_posterior(p, SpinVec::Ones(3), SpinVec::Ones(3)), 0.0);
}

TEST(MarginalEnergy, LargeFieldsAreStable) {
  EXPECT_NEAR(logcosh(1e4), 1e4 - std::log(2.0), 1e-9);
  EXPECT_NEAR(logcosh(-1e4), 1e4 - std::log(2.0), 1e-9);
  EXPECT_EQ(logcosh(0.0), 0.0);
  DbmParams p = DbmParams::zeros({1, 1, 1});
  p.b_h1[0] = 1e4;
  const Real e = energy_even_marginal(p, spins_of({1}), spins_of({1}));
  EXPECT_TRUE(std::isfinite(e));
  EXPECT_NEAR(e, -(1e4 - std::log(2.0)), 1e-9);
  p = DbmParams::zeros({1, 1, 1});
  p.b_v[0] = -1e4;
  p.b_h2[0] = 1e4;
  EXPECT_NEAR(energy_odd_marginal(p, spins_of({1})), -2 * (1e4 - std::log(2.0)), 1e-9);
  EXPECT_NEAR(energy_odd_posterior(p, spins_of({1}), spins_of({1})), 1e4 - (1e4 - std::log(2.0)), 1e-9);
}

// exp(-E_marg) / sum over the removed units of exp(-E) must not depend on the kept units.
TEST(MarginalEnergy, EvenMarginalMatchesBruteForce) {
  Rng rng(5);
  for (int t = 0; t < 5; ++t) {
    const DbmParams p = random_params({3, 3, 2}, rng);
    std::vector<Real> log_ratio;
    for (const auto& v : all_spin_vectors(3)) {
      for (const auto& h2 : all_spin_vectors(2)) {
        std::vector<Real> es;
        for (const auto& h1 : all_spin_vectors(3)) es.push_back(energy(p, v, h1, h2));
        log_ratio.push_back(-energy_even_marginal(p, v, h2) - log_sum_exp_neg(es));
      }
    }
    for (Real r : log_ratio) EXPECT_NEAR(r, log_ratio.front(), 1e-10);
  }
}

TEST(MarginalEnergy, OddMarginalMatchesBruteForce) {
  Rng rng(6);
  for (int t = 0; t < 5; ++t) {
    const DbmParams p = random_params({3, 3, 2}, rng);
    std::vector<Real> log_ratio;
    for (const auto& h1 : all_spin_vectors(3)) {
      std::vector<Real> es;
      for (const auto& v : all_spin_vectors(3))
        for (const auto& h2 : all_spin_vectors(2)) es.push_back(energy(p, v, h1, h2));
      log_ratio.push_back(-energy_odd_marginal(p, h1) - log_sum_exp_neg(es));
    }
    for (Real r : log_ratio) EXPECT_NEAR(r, log_ratio.front(), 1e-10);
  }
}

TEST(MarginalEnergy, OddPosteriorMatchesBruteForce) {
  Rng rng(7);
  for (int t = 0; t < 5; ++t) {
    const DbmParams p = random_params({3, 3, 2}, rng);
    std::vector<Real> log_ratio;
    for (const auto& v : all_spin_vectors(3)) {
      for (const auto& h1 : all_spin_vectors(3)) {
        std::vector<Real> es;
        for (const auto& h2 : all_spin_vectors(2)) es.push_back(energy(p, v, h1, h2));
        log_ratio.push_back(-energy_odd_posterior(p, v, h1) - log_sum_exp_neg(es));
      }
    }
    for (Real r : log_ratio) EXPECT_NEAR(r, log_ratio.front(), 1e-10);
  }
}

TEST(GradEnergy, AllPlusState) {
  const DbmParams p = DbmParams::zeros({3, 2, 2});
  const JointState x{SpinVec::Ones(3), SpinVec::Ones(2), SpinVec::Ones(2)};
  const GradEstimate g = grad_energy(p, x);
  EXPECT_TRUE((g.dW1.array() == -1.0).all());
  EXPECT_TRUE((g.dW2.array() == -1.0).all());
  EXPECT_TRUE((g.db_v.array() == -1.0).all());
}

TEST(GradEnergy, SignProduct) {
  const DbmParams p = DbmParams::zeros({2, 2, 1});
  const JointState x{spins_of({1, -1}), spins_of({-1, 1}), spins_of({1})};
  const GradEstimate g = grad_energy(p, x);
  EXPECT_EQ(g.dW1(0, 0), 1.0);
  EXPECT_EQ(g.dW1(0, 1), -1.0);
  EXPECT_EQ(g.dW1(1, 0), -1.0);
  EXPECT_EQ(g.db_h1[0], 1.0);
}

TEST(GradEnergy, MarginalZeroParams) {
  const DbmParams p = DbmParams::zeros({3, 3, 2});
  const SpinVec v = spins_of({1, -1, 1});
  const SpinVec h2 = spins_of({-1, 1});
  const GradEstimate g = grad_energy_even_marginal(p, v, h2);
  EXPECT_TRUE(g.dW1.isZero(0));
  EXPECT_TRUE(g.dW2.isZero(0));
  EXPECT_TRUE(g.db_h1.isZero(0));
  EXPECT_EQ(g.db_v, -v);
  EXPECT_EQ(g.db_h2, -h2);
  const GradEstimate o = grad_energy_odd_marginal(p, spins_of({1, 1, -1}));
  EXPECT_EQ(o.db_h1, -spins_of({1, 1, -1}));
  EXPECT_TRUE(o.db_v.isZero(0));
  EXPECT_TRUE(o.db_h2.isZero(0));
}

// Central differences, step 1e-6, relative error max(1, |g|)-scaled.
TEST(GradEnergy, AllFormsMatchFiniteDifferences) {
  Rng rng(8);
  for (int t = 0; t < 20; ++t) {
    const DbmShape s{4, 3, 2};
    const DbmParams p = random_params(s, rng);
    const JointState x = uniform_joint_state(s, rng);
    using testing::finite_difference_gradient;
    using testing::max_relative_error;
    EXPECT_LT(max_relative_error(grad_energy(p, x).flat(),
                                 finite_difference_gradient(p, [&](const DbmParams& q) { return energy(q, x); })),
              1e-6);
    EXPECT_LT(max_relative_error(grad_energy_even_marginal(p, x.v, x.h2).flat(),
                                 finite_difference_gradient(
                                     p, [&](const DbmParams& q) { return energy_even_marginal(q, x.v, x.h2); })),
              1e-6);
    EXPECT_LT(max_relative_error(
                  grad_energy_odd_marginal(p, x.h1).flat(),
                  finite_difference_gradient(p, [&](const DbmParams& q) { return energy_odd_marginal(q, x.h1); })),
              1e-6);
    EXPECT_LT(max_relative_error(grad_energy_odd_posterior(p, x.v, x.h1).flat(),
                                 finite_difference_gradient(
                                     p, [&](const DbmParams& q) { return energy_odd_posterior(q, x.v, x.h1); })),
              1e-6);
  }
}

TEST(Energy, InvariantUnderHiddenRelabeling) {
  Rng rng(9);
  const DbmParams p = random_params({3, 3, 2}, rng);
  DbmParams q = p;
  // swap h1 units 0 and 2
  q.W1.col(0).swap(q.W1.col(2));
  q.W2.row(0).swap(q.W2.row(2));
  std::swap(q.b_h1[0], q.b_h1[2]);
  for (std::uint64_t idx = 0; idx < 256; ++idx) {
    const JointState x = joint_state_from_index(p.shape(), idx);
    JointState y = x;
    std::swap(y.h1[0], y.h1[2]);
    EXPECT_NEAR(energy(p, x), energy(q, y), 1e-12);
  }
}

TEST(GradEstimate, Arithmetic) {
  const DbmShape s{3, 2, 2};
  Rng rng(10);
  const DbmParams p = random_params(s, rng);
  const GradEstimate a = grad_energy(p, uniform_joint_state(s, rng));
  const GradEstimate b = grad_energy(p, uniform_joint_state(s, rng));
  EXPECT_TRUE(((a + b) - b).flat().isApprox(a.flat()));
  EXPECT_TRUE((-a).flat().isApprox(-a.flat()));
  EXPECT_TRUE((a * 2.5).flat().isApprox(2.5 * a.flat()));
  EXPECT_EQ(GradEstimate::from_flat(s, a.flat()).flat(), a.flat());
  EXPECT_EQ(a.size(), 3 * 2 + 2 * 2 + 3 + 2 + 2);
  EXPECT_TRUE(a.all_finite());
  EXPECT_EQ(component_name(s, 0), "W1[0,0]");
  EXPECT_EQ(component_name(s, 6), "W2[0,0]");
  EXPECT_EQ(component_name(s, a.size() - 1), "b_h2[1]");
}

TEST(DbmParams, FinitenessCheck) {
  DbmParams p = DbmParams::zeros({2, 2, 1});
  EXPECT_TRUE(p.all_finite());
  p.W2(1, 0) = std::nan("");
  EXPECT_FALSE(p.all_finite());
}

}  // namespace
}  // namespace udbm
