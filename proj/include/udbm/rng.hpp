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

#ifndef UDBM_RNG_HPP
#define UDBM_RNG_HPP

#include <cstdint>
#include <initializer_list>
#include <random>

#include <Eigen/Dense>

#include "udbm/common.hpp"

namespace udbm {

/// SplitMix64 finalizer, used to derive independent stream seeds.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/**
 * Random source used by every sampler in the library.
 *
 * Wraps std::mt19937_64. Uniform reals and spins are derived from raw
 * 64-bit words directly so that streams are bit-reproducible across
 * standard library implementations. Gaussian draws go through
 * std::normal_distribution and are only used for weight initialization.
 */
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed = 0) : engine_(mix64(seed)) {}

  /// Stream keyed by a root seed and a path of indices, e.g. (seed, step, example).
  static Rng stream(std::uint64_t root, std::initializer_list<std::uint64_t> path) {
    std::uint64_t s = mix64(root);
    for (auto p : path) {
      s = mix64(s ^ mix64(p + 0x632be59bd9b4e019ULL));
    }
    return Rng(s);
  }

  static constexpr result_type min() { return std::mt19937_64::min(); }
  static constexpr result_type max() { return std::mt19937_64::max(); }
  result_type operator()() { return engine_(); }

  /// Uniform on [0, 1) with 53 random bits.
  Real uniform() { return static_cast<Real>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform on (0, 1).
  Real uniform_open() {
    Real u;
    do {
      u = uniform();
    } while (u == 0.0);
    return u;
  }

  Real spin() { return (engine_() >> 63) ? 1.0 : -1.0; }

  Eigen::VectorXd spins(Eigen::Index n) {
    Eigen::VectorXd s(n);
    for (Eigen::Index i = 0; i < n; ++i) s[i] = spin();
    return s;
  }

  bool coin() { return uniform() < 0.5; }

  std::uint64_t below(std::uint64_t n) {
    // reject the low 2^64 mod n words so the result is exactly uniform
    const std::uint64_t threshold = (0 - n) % n;
    std::uint64_t x;
    do {
      x = engine_();
    } while (x < threshold);
    return x % n;
  }

  Real normal() { return normal_(engine_); }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<Real> normal_{0.0, 1.0};
};

}  // namespace udbm

#endif  // UDBM_RNG_HPP
