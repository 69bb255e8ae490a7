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

#ifndef UDBM_CONFIG_HPP
#define UDBM_CONFIG_HPP

// Flat key=value configuration files for training runs.
//
//   # comment
//   n_h1 = 64
//   optimizer = adam
//
// Keys are exactly the TrainConfig field names. Unknown keys, duplicate
// keys and malformed values raise ConfigError.

#include <charconv>
#include <cstdint>
#include <fstream>
#include <functional>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "udbm/training.hpp"

namespace udbm {

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

template <class T>
T parse_number(const std::string& key, const std::string& value) {
  T out{};
  const char* first = value.data();
  const char* last = first + value.size();
  const auto [ptr, ec] = std::from_chars(first, last, out);
  if (ec != std::errc() || ptr != last) throw ConfigError("config: bad value for " + key + ": '" + value + "'");
  return out;
}

inline Index parse_count(const std::string& key, const std::string& value) {
  const auto v = parse_number<long long>(key, value);
  if (v < 0) throw ConfigError("config: " + key + " must be >= 0");
  return static_cast<Index>(v);
}

inline bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  throw ConfigError("config: bad boolean for " + key + ": '" + value + "'");
}

inline std::string format_real(Real x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

struct ConfigKey {
  std::function<void(TrainConfig&, const std::string&)> set;
  std::function<std::string(const TrainConfig&)> get;
};

// Ordered: this is also the echo order.
inline const std::vector<std::pair<std::string, ConfigKey>>& config_keys() {
  using C = TrainConfig;
  using S = std::string;
  auto count_key = [](Index C::*f, const char* name) {
    return std::pair<S, ConfigKey>{
        name, {[f, name](C& c, const S& v) { c.*f = parse_count(name, v); },
               [f](const C& c) { return std::to_string(c.*f); }}};
  };
  auto string_key = [](S C::*f, const char* name) {
    return std::pair<S, ConfigKey>{name, {[f](C& c, const S& v) { c.*f = v; }, [f](const C& c) { return c.*f; }}};
  };
  static const std::vector<std::pair<S, ConfigKey>> keys = {
      {"n_v", {[](C& c, const S& v) { c.shape.n_v = parse_count("n_v", v); },
               [](const C& c) { return std::to_string(c.shape.n_v); }}},
      {"n_h1", {[](C& c, const S& v) { c.shape.n_h1 = parse_count("n_h1", v); },
                [](const C& c) { return std::to_string(c.shape.n_h1); }}},
      {"n_h2", {[](C& c, const S& v) { c.shape.n_h2 = parse_count("n_h2", v); },
                [](const C& c) { return std::to_string(c.shape.n_h2); }}},
      {"learning_rate", {[](C& c, const S& v) { c.learning_rate = parse_number<double>("learning_rate", v); },
                         [](const C& c) { return format_real(c.learning_rate); }}},
      {"optimizer", {[](C& c, const S& v) {
                       const auto k = parse_optimizer(v);
                       if (!k) throw ConfigError("config: unknown optimizer '" + v + "'");
                       c.optimizer = *k;
                     },
                     [](const C& c) { return to_string(c.optimizer); }}},
      count_key(&C::batch_size, "batch_size"),
      count_key(&C::steps, "steps"),
      {"seed", {[](C& c, const S& v) { c.seed = parse_number<std::uint64_t>("seed", v); },
                [](const C& c) { return std::to_string(c.seed); }}},
      count_key(&C::tau_max, "tau_max"),
      {"estimator", {[](C& c, const S& v) {
                       const auto k = parse_estimator(v);
                       if (!k) throw ConfigError("config: unknown estimator '" + v + "'");
                       c.estimator = *k;
                     },
                     [](const C& c) { return to_string(c.estimator); }}},
      {"truncation_policy", {[](C& c, const S& v) {
                               const auto k = parse_truncation_policy(v);
                               if (!k) throw ConfigError("config: unknown truncation_policy '" + v + "'");
                               c.truncation_policy = *k;
                             },
                             [](const C& c) { return to_string(c.truncation_policy); }}},
      count_key(&C::checkpoint_every, "checkpoint_every"),
      {"threads", {[](C& c, const S& v) { c.threads = static_cast<unsigned>(parse_count("threads", v)); },
                   [](const C& c) { return std::to_string(c.threads); }}},
      string_key(&C::data_path, "data_path"),
      {"data_format", {[](C& c, const S& v) {
                         if (v != "idx" && v != "bits" && v != "synthetic")
                           throw ConfigError("config: data_format must be idx, bits or synthetic");
                         c.data_format = v;
                       },
                       [](const C& c) { return c.data_format; }}},
      count_key(&C::downscale, "downscale"),
      count_key(&C::max_examples, "max_examples"),
      count_key(&C::synthetic_patterns, "synthetic_patterns"),
      count_key(&C::synthetic_length, "synthetic_length"),
      string_key(&C::checkpoint_dir, "checkpoint_dir"),
      string_key(&C::log_path, "log_path"),
      string_key(&C::resume, "resume"),
      count_key(&C::resume_step, "resume_step"),
      {"log_wall_time", {[](C& c, const S& v) { c.log_wall_time = parse_bool("log_wall_time", v); },
                         [](const C& c) { return std::string(c.log_wall_time ? "true" : "false"); }}},
  };
  return keys;
}

}  // namespace detail

/// Names of every accepted key, in echo order.
inline std::vector<std::string> config_key_names() {
  std::vector<std::string> out;
  for (const auto& [k, _] : detail::config_keys()) out.push_back(k);
  return out;
}

inline void set_config_value(TrainConfig& cfg, const std::string& key, const std::string& value) {
  for (const auto& [k, h] : detail::config_keys()) {
    if (k == key) {
      h.set(cfg, value);
      return;
    }
  }
  throw ConfigError("config: unknown key '" + key + "'");
}

/// Splits "key=value" (whitespace around either side is ignored).
inline std::pair<std::string, std::string> split_assignment(const std::string& line) {
  const auto eq = line.find('=');
  if (eq == std::string::npos) throw ConfigError("config: expected key=value, got '" + line + "'");
  std::string key = detail::trim(line.substr(0, eq));
  if (key.empty()) throw ConfigError("config: empty key in '" + line + "'");
  return {std::move(key), detail::trim(line.substr(eq + 1))};
}

/// Applies every assignment in `is` on top of `cfg`.
inline void read_config(std::istream& is, TrainConfig& cfg) {
  std::string line;
  std::map<std::string, int> seen;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto [key, value] = split_assignment(line);
    if (seen.count(key)) {
      throw ConfigError("config: line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
    }
    seen[key] = lineno;
    try {
      set_config_value(cfg, key, value);
    } catch (const ConfigError& e) {
      throw ConfigError("config: line " + std::to_string(lineno) + ": " + e.what());
    }
  }
}

inline TrainConfig load_config(const std::string& path, TrainConfig base = {}) {
  std::ifstream is(path);
  if (!is) throw ConfigError("config: cannot open '" + path + "'");
  read_config(is, base);
  return base;
}

/// One "key=value" line per field; reading it back reproduces `cfg`.
inline void write_config(std::ostream& os, const TrainConfig& cfg, const std::string& prefix = {}) {
  for (const auto& [k, h] : detail::config_keys()) os << prefix << k << '=' << h.get(cfg) << '\n';
}

}  // namespace udbm

#endif  // UDBM_CONFIG_HPP
