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

#ifndef UDBM_OPTIM_HPP
#define UDBM_OPTIM_HPP

#include <cmath>
#include <optional>
#include <string>

#include "udbm/model.hpp"

namespace udbm {

enum class OptimizerKind { kSgd, kAdam, kAmsGrad };

inline std::string to_string(OptimizerKind k) {
  switch (k) {
    case OptimizerKind::kSgd:
      return "sgd";
    case OptimizerKind::kAdam:
      return "adam";
    case OptimizerKind::kAmsGrad:
      return "amsgrad";
  }
  return "?";
}

inline std::optional<OptimizerKind> parse_optimizer(const std::string& s) {
  if (s == "sgd") return OptimizerKind::kSgd;
  if (s == "adam") return OptimizerKind::kAdam;
  if (s == "amsgrad") return OptimizerKind::kAmsGrad;
  return std::nullopt;
}

struct OptimizerSettings {
  OptimizerKind kind = OptimizerKind::kSgd;
  Real learning_rate = 1e-2;
  Real beta1 = 0.9;
  Real beta2 = 0.999;
  Real epsilon = 1e-8;
};

/// Gradient-ascent optimizer over DbmParams. step() moves along +g.
class Optimizer {
 public:
  Optimizer(const OptimizerSettings& s, const DbmShape& shape)
      : s_(s),
        m_(GradEstimate::zeros(shape)),
        v_(GradEstimate::zeros(shape)),
        vmax_(GradEstimate::zeros(shape)) {}

  void step(DbmParams& p, const GradEstimate& g) {
    ++t_;
    if (s_.kind == OptimizerKind::kSgd) {
      apply_update(p, g, s_.learning_rate);
      return;
    }
    const Real c1 = 1.0 - std::pow(s_.beta1, static_cast<Real>(t_));
    const Real c2 = 1.0 - std::pow(s_.beta2, static_cast<Real>(t_));
    auto update = [&](auto& param, const auto& grad, auto& m, auto& v, auto& vmax) {
      m = s_.beta1 * m + (1.0 - s_.beta1) * grad;
      v = s_.beta2 * v + (1.0 - s_.beta2) * grad.cwiseProduct(grad);
      if (s_.kind == OptimizerKind::kAmsGrad) {
        vmax = vmax.cwiseMax(v);
        param.array() += s_.learning_rate * (m.array() / c1) / ((vmax.array() / c2).sqrt() + s_.epsilon);
      } else {
        param.array() += s_.learning_rate * (m.array() / c1) / ((v.array() / c2).sqrt() + s_.epsilon);
      }
    };
    update(p.W1, g.dW1, m_.dW1, v_.dW1, vmax_.dW1);
    update(p.W2, g.dW2, m_.dW2, v_.dW2, vmax_.dW2);
    update(p.b_v, g.db_v, m_.db_v, v_.db_v, vmax_.db_v);
    update(p.b_h1, g.db_h1, m_.db_h1, v_.db_h1, vmax_.db_h1);
    update(p.b_h2, g.db_h2, m_.db_h2, v_.db_h2, vmax_.db_h2);
  }

  const OptimizerSettings& settings() const { return s_; }
  long long steps_taken() const { return t_; }
  const GradEstimate& first_moment() const { return m_; }
  const GradEstimate& second_moment() const { return v_; }

 private:
  OptimizerSettings s_;
  GradEstimate m_;
  GradEstimate v_;
  GradEstimate vmax_;
  long long t_ = 0;
};

}  // namespace udbm

#endif  // UDBM_OPTIM_HPP
