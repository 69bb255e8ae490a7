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

#ifndef UDBM_COMMON_HPP
#define UDBM_COMMON_HPP

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace udbm {

using Real = double;

/// Raised when vectors or matrices disagree with the model shape.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Local search exceeded its iteration cap.
class SearchDivergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A coupled run hit tau_max before the chains met.
class TruncationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Exhaustive enumeration requested beyond the supported unit count.
class SizeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Malformed input file (checkpoint, IDX, spin text).
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad configuration value or unknown key.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// log(cosh(a)) without overflow for large |a|.
inline Real logcosh(Real a) {
  const Real x = std::abs(a);
  return x + std::log1p(std::exp(-2.0 * x)) - std::log(2.0);
}

/// Logistic sigmoid.
inline Real sigmoid(Real a) {
  if (a >= 0) {
    return 1.0 / (1.0 + std::exp(-a));
  }
  const Real e = std::exp(a);
  return e / (1.0 + e);
}

// sgn(a) := 2 * 1[a >= 0] - 1
inline Real spin_sign(Real a) { return a >= 0 ? 1.0 : -1.0; }

}  // namespace udbm

#endif  // UDBM_COMMON_HPP
