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

#ifndef UDBM_TESTS_SUPPORT_HPP
#define UDBM_TESTS_SUPPORT_HPP

#include <atomic>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "udbm/udbm.hpp"

namespace udbm::testing {

/// Gaussian weights and biases with standard deviation `scale`.
inline DbmParams random_params(const DbmShape& s, Rng& rng, Real scale = 1.0) {
  DbmParams p = DbmParams::zeros(s);
  for (Index i = 0; i < p.W1.size(); ++i) p.W1.data()[i] = scale * rng.normal();
  for (Index i = 0; i < p.W2.size(); ++i) p.W2.data()[i] = scale * rng.normal();
  for (Index i = 0; i < p.b_v.size(); ++i) p.b_v[i] = scale * rng.normal();
  for (Index i = 0; i < p.b_h1.size(); ++i) p.b_h1[i] = scale * rng.normal();
  for (Index i = 0; i < p.b_h2.size(); ++i) p.b_h2[i] = scale * rng.normal();
  return p;
}

inline SpinVec spins_of(std::initializer_list<double> xs) {
  SpinVec s(static_cast<Index>(xs.size()));
  Index i = 0;
  for (double x : xs) s[i++] = x;
  return s;
}

/// Every +-1 vector of length n, in index order (bit k set means entry k = +1).
inline std::vector<SpinVec> all_spin_vectors(Index n) {
  std::vector<SpinVec> out;
  for (std::uint64_t i = 0; i < (std::uint64_t{1} << n); ++i) {
    SpinVec s(n);
    for (Index k = 0; k < n; ++k) s[k] = ((i >> k) & 1U) ? 1.0 : -1.0;
    out.push_back(s);
  }
  return out;
}

/// Adds `delta` to the k-th parameter in GradEstimate::flat() order.
inline DbmParams perturbed(const DbmParams& p, Index k, Real delta) {
  Vector e = Vector::Zero(GradEstimate::zeros(p.shape()).size());
  e[k] = 1.0;
  DbmParams q = p;
  apply_update(q, GradEstimate::from_flat(p.shape(), e), delta);
  return q;
}

/// Central-difference gradient of f(params) in flat order.
template <class F>
Vector finite_difference_gradient(const DbmParams& p, F&& f, Real h = 1e-6) {
  const Index n = GradEstimate::zeros(p.shape()).size();
  Vector g(n);
  for (Index k = 0; k < n; ++k) g[k] = (f(perturbed(p, k, h)) - f(perturbed(p, k, -h))) / (2 * h);
  return g;
}

/// Largest |a - b| / max(1, |b|) over components.
inline Real max_relative_error(const Vector& a, const Vector& b) {
  Real worst = 0;
  for (Index i = 0; i < a.size(); ++i) {
    worst = std::max(worst, std::abs(a[i] - b[i]) / std::max<Real>(1.0, std::abs(b[i])));
  }
  return worst;
}

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    const auto stamp = std::chrono::steady_clock::now().time_since_epoch().count();
    path_ = std::filesystem::temp_directory_path() /
            ("udbm_test_" + std::to_string(stamp) + "_" + std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  std::string file(const std::string& name) const { return (path_ / name).string(); }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

}  // namespace udbm::testing

#endif  // UDBM_TESTS_SUPPORT_HPP
