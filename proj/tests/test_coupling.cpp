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

#include "support.hpp"

namespace udbm {
namespace {

using testing::random_params;

/// Law of a single uniform-proposal MH chain after t steps from state idx.
std::vector<Real> exact_mh_law(const DbmParams& p, std::uint64_t idx, int t) {
  const Matrix P = exact_mh_transition_matrix(p);
  Eigen::RowVectorXd mu = Eigen::RowVectorXd::Zero(P.rows());
  mu[static_cast<Index>(idx)] = 1.0;
  for (int i = 0; i < t; ++i) mu = mu * P;
  return std::vector<Real>(mu.data(), mu.data() + mu.size());
}

TEST(MhCoupling, ZeroParamsMeetAtOneOrTwo) {
  const DbmParams p = DbmParams::zeros({3, 2, 1});
  int ones = 0;
  for (std::uint64_t seed = 0; seed < 500; ++seed) {
    Rng rng(seed);
    const JointState x0 = uniform_joint_state(p.shape(), rng);
    const auto run = mh_couple_joint(p, x0, 100, rng);
    ASSERT_FALSE(run.truncated);
    ASSERT_TRUE(run.tau == 1 || run.tau == 2) << run.tau;
    ones += run.tau == 1;
    // tau = 1 exactly when the first proposal repeated x0
    EXPECT_EQ(run.tau == 1, run.x_states[1] == x0);
  }
  // P(x1 == x0) = 1/64
  EXPECT_LT(ones, 30);
}

TEST(MhCoupling, DeepModeMeetsImmediately) {
  DbmParams p = DbmParams::zeros({4, 3, 3});
  p.b_v.setConstant(3.0);
  p.b_h1.setConstant(3.0);
  p.b_h2.setConstant(3.0);
  JointState mode{SpinVec::Ones(4), SpinVec::Ones(3), SpinVec::Ones(3)};
  int tau_one = 0;
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    Rng rng(seed);
    const auto run = mh_couple_joint(p, mode, 100, rng);
    tau_one += run.tau == 1;
  }
  // every other state has energy at least 6 higher, so P(accept) <= exp(-6)
  EXPECT_GE(tau_one, 990);
}

TEST(MhCoupling, PosteriorZeroParamsAndDeepMode) {
  const DbmParams zero = DbmParams::zeros({3, 3, 2});
  const SpinVec v = testing::spins_of({1, -1, 1});
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    Rng rng(seed);
    const auto run = mh_couple_posterior(zero, v, uniform_hidden_state(zero.shape(), rng), 100, rng);
    EXPECT_TRUE(run.tau == 1 || run.tau == 2);
  }
  DbmParams deep = zero;
  deep.b_h1.setConstant(5.0);
  deep.b_h2.setConstant(5.0);
  const HiddenState h0{SpinVec::Ones(3), SpinVec::Ones(2)};
  int ones = 0;
  for (std::uint64_t seed = 0; seed < 500; ++seed) {
    Rng rng(seed);
    ones += mh_couple_posterior(deep, v, h0, 100, rng).tau == 1;
  }
  EXPECT_GE(ones, 495);
}

TEST(MhCoupling, TrajectoryShapeAndMeetingCondition) {
  Rng model_rng(1);
  const DbmParams p = random_params({3, 3, 2}, model_rng, 0.5);
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    Rng rng(seed);
    const JointState x0 = uniform_joint_state(p.shape(), rng);
    const auto run = mh_couple_joint(p, x0, 10000, rng);
    ASSERT_FALSE(run.truncated);
    ASSERT_EQ(run.x_states.size(), static_cast<std::size_t>(run.tau + 1));
    ASSERT_EQ(run.y_states.size(), static_cast<std::size_t>(run.tau));
    EXPECT_EQ(run.x_states[0], x0);
    EXPECT_EQ(run.y_states[0], x0);
    const auto tau = static_cast<std::size_t>(run.tau);
    EXPECT_EQ(run.x_states[tau], run.y_states[tau - 1]);
    for (std::size_t t = 1; t < tau; ++t) EXPECT_FALSE(run.x_states[t] == run.y_states[t - 1]);
  }
}

TEST(MhCoupling, OnceMetAlwaysMet) {
  Rng model_rng(2);
  const DbmParams p = random_params({3, 3, 2}, model_rng, 0.5);
  CouplingOptions opt;
  opt.min_length = 60;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    Rng rng(seed);
    const auto run = mh_couple_joint(p, uniform_joint_state(p.shape(), rng), 10000, rng, opt);
    ASSERT_FALSE(run.truncated);
    ASSERT_GE(run.x_states.size(), 61u);
    for (std::size_t t = static_cast<std::size_t>(run.tau); t < run.x_states.size(); ++t) {
      EXPECT_EQ(run.x_states[t], run.y_states[t - 1]) << "seed " << seed << " t " << t;
    }
  }
}

TEST(MhCoupling, MinLengthDoesNotChangeTau) {
  Rng model_rng(3);
  const DbmParams p = random_params({3, 3, 2}, model_rng, 0.5);
  CouplingOptions longer;
  longer.min_length = 40;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    Rng a(seed), b(seed);
    const JointState x0 = uniform_joint_state(p.shape(), a);
    uniform_joint_state(p.shape(), b);
    const auto r1 = mh_couple_joint(p, x0, 10000, a);
    const auto r2 = mh_couple_joint(p, x0, 10000, b, longer);
    EXPECT_EQ(r1.tau, r2.tau);
    for (std::size_t t = 0; t < r1.x_states.size(); ++t) EXPECT_EQ(r1.x_states[t], r2.x_states[t]);
  }
}

TEST(MhCoupling, DeterministicUnderSeed) {
  Rng model_rng(4);
  const DbmParams p = random_params({4, 3, 2}, model_rng, 0.5);
  const JointState x0 = uniform_joint_state(p.shape(), model_rng);
  Rng a(77), b(77);
  const auto r1 = mh_couple_joint(p, x0, 1000, a);
  const auto r2 = mh_couple_joint(p, x0, 1000, b);
  EXPECT_EQ(r1.tau, r2.tau);
  EXPECT_EQ(r1.x_states, r2.x_states);
  EXPECT_EQ(r1.y_states, r2.y_states);
}

TEST(MhCoupling, TruncationIsFlagged) {
  const DbmParams p = DbmParams::zeros({10, 10, 10});
  Rng rng(5);
  const JointState x0 = uniform_joint_state(p.shape(), rng);
  // the first proposal differs from x0 (almost surely), so the chains cannot meet by t = 1
  const auto run = mh_couple_joint(p, x0, 1, rng);
  EXPECT_TRUE(run.truncated);
  EXPECT_EQ(run.tau, 1);
  EXPECT_THROW(telescope_estimate(run, [&](const JointState& x) { return grad_energy(p, x); }),
               TruncationError);
  EXPECT_THROW(mh_couple_joint(p, x0, 0, rng), std::invalid_argument);
}

TEST(MhCoupling, MarginalsMatchSingleChainLaw) {
  Rng model_rng(6);
  const DbmParams p = random_params({3, 3, 2}, model_rng, 0.8);
  const DbmShape s = p.shape();
  const JointState x0 = joint_state_from_index(s, 37);
  const int runs = 200000;
  CouplingOptions opt;
  opt.min_length = 4;
  std::vector<std::vector<Real>> hx(4, std::vector<Real>(256, 0.0)), hy = hx;
  for (int r = 0; r < runs; ++r) {
    Rng rng = Rng::stream(6, {static_cast<std::uint64_t>(r)});
    const auto run = mh_couple_joint(p, x0, 100000, rng, opt);
    for (int t = 1; t <= 3; ++t) {
      hx[t][joint_state_index(s, run.x_states[static_cast<std::size_t>(t)])] += 1.0 / runs;
      hy[t][joint_state_index(s, run.y_states[static_cast<std::size_t>(t)])] += 1.0 / runs;
    }
  }
  for (int t = 1; t <= 3; ++t) {
    const auto law = exact_mh_law(p, 37, t);
    EXPECT_LT(total_variation(hx[t], law), 0.03) << "x_" << t;
    EXPECT_LT(total_variation(hy[t], law), 0.03) << "y_" << t;
  }
}

TEST(Telescope, TauOneAndTwoForms) {
  const DbmShape s{2, 1, 1};
  const DbmParams p = DbmParams::zeros(s);
  const JointState a{testing::spins_of({1, 1}), testing::spins_of({1}), testing::spins_of({1})};
  const JointState b{testing::spins_of({-1, 1}), testing::spins_of({1}), testing::spins_of({-1})};
  const JointState c{testing::spins_of({-1, -1}), testing::spins_of({-1}), testing::spins_of({1})};
  auto f = [&](const JointState& x) { return grad_energy(p, x); };

  CoupledRun<JointState> one;
  one.tau = 1;
  one.x_states = {a, a};
  one.y_states = {a};
  EXPECT_EQ(telescope_estimate(one, f).flat(), f(a).flat());

  CoupledRun<JointState> two;
  two.tau = 2;
  two.x_states = {a, b, c};
  two.y_states = {a, c};
  EXPECT_EQ(telescope_estimate(two, f).flat(), (f(a) + f(b) - f(a)).flat());

  CoupledRun<JointState> empty;
  empty.tau = 3;
  EXPECT_THROW(telescope_estimate(empty, f), std::invalid_argument);
}

TEST(GibbsCoupling, SharedUniformCouplesEqualConditionals) {
  Rng a(1), b(1);
  const Vector field = (Vector(5) << 0.3, -1.2, 0.0, 2.0, -0.1).finished();
  SpinVec sx(5), sy(5);
  detail::coupled_block(sx, field, sy, field, a);
  EXPECT_EQ(sx, sy);
  // marginally each draw is an ordinary Bernoulli conditional
  SpinVec ref(5);
  detail::sample_into(ref, field, b);
  EXPECT_EQ(ref, sx);
}

TEST(GibbsCoupling, StaysMergedWhenStartedTogetherAfterLag) {
  Rng model_rng(2);
  const DbmParams p = random_params({4, 3, 2}, model_rng);
  Rng rng(3);
  const JointState x0 = uniform_joint_state(p.shape(), rng);
  // y0 equal to x1: replay the first scan on a copy of the stream
  Rng replay = rng;
  JointState x1 = x0;
  gibbs_scan(p, x1, replay);
  const auto run = gibbs_couple_joint(p, x0, x1, 1000, rng);
  EXPECT_EQ(run.tau, 1);
  EXPECT_FALSE(run.truncated);
}

TEST(GibbsCoupling, ZeroParamsCoupleInOneSweep) {
  const DbmParams p = DbmParams::zeros({5, 4, 3});
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    Rng rng(seed);
    const JointState x0 = uniform_joint_state(p.shape(), rng);
    const JointState y0 = uniform_joint_state(p.shape(), rng);
    const auto run = gibbs_couple_joint(p, x0, y0, 100, rng);
    EXPECT_LE(run.tau, 2);
    ASSERT_FALSE(run.truncated);
    EXPECT_EQ(run.x_states[static_cast<std::size_t>(run.tau)], run.y_states[static_cast<std::size_t>(run.tau - 1)]);
  }
}

TEST(GibbsCoupling, OnceMetAlwaysMet) {
  Rng model_rng(4);
  const DbmParams p = random_params({3, 3, 2}, model_rng, 0.5);
  CouplingOptions opt;
  opt.min_length = 30;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    Rng rng(seed);
    const auto run = gibbs_couple_joint(p, uniform_joint_state(p.shape(), rng),
                                        uniform_joint_state(p.shape(), rng), 100000, rng, opt);
    ASSERT_FALSE(run.truncated);
    for (std::size_t t = static_cast<std::size_t>(run.tau); t < run.x_states.size(); ++t) {
      EXPECT_EQ(run.x_states[t], run.y_states[t - 1]);
    }
  }
}

TEST(CouplingTimeStats, AggregatesTotals) {
  const auto st = coupling_time_stats({{1, 3}, {2, 4}, {3, 5}});
  EXPECT_DOUBLE_EQ(st.tau.mean, 2.0);
  EXPECT_DOUBLE_EQ(st.search_steps.mean, 4.0);
  EXPECT_DOUBLE_EQ(st.total.mean, 6.0);
  EXPECT_DOUBLE_EQ(st.total.median, 6.0);
  EXPECT_DOUBLE_EQ(st.total.min, 4.0);
  EXPECT_DOUBLE_EQ(st.total.max, 8.0);
}

TEST(MhStep, MatchesTransitionMatrixRow) {
  Rng model_rng(7);
  const DbmParams p = random_params({2, 2, 1}, model_rng);
  const DbmShape s = p.shape();
  const Matrix P = exact_mh_transition_matrix(p);
  const std::uint64_t start = 5;
  std::vector<Real> hist(32, 0.0);
  const int n = 200000;
  Rng rng(8);
  for (int i = 0; i < n; ++i) {
    JointState x = joint_state_from_index(s, start);
    Real e = energy(p, x);
    mh_step_joint(p, x, e, rng);
    ASSERT_DOUBLE_EQ(e, energy(p, x));
    hist[joint_state_index(s, x)] += 1.0 / n;
  }
  std::vector<Real> row(32);
  for (Index j = 0; j < 32; ++j) row[static_cast<std::size_t>(j)] = P(static_cast<Index>(start), j);
  EXPECT_LT(total_variation(hist, row), 0.01);
}

}  // namespace
}  // namespace udbm
