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

#ifndef UDBM_BENCH_HPP
#define UDBM_BENCH_HPP

// Coupling-time study: how many steps each coupling needs to produce one
// negative-phase estimate on random orthogonally initialized RBMs of
// growing size.

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "udbm/coupling.hpp"
#include "udbm/init.hpp"
#include "udbm/parallel.hpp"
#include "udbm/search.hpp"
#include "udbm/stats.hpp"

namespace udbm {

enum class CouplingKind { kGibbs, kMh };
enum class InitKind { kUniform, kLocalMode };

struct BenchArm {
  CouplingKind coupling = CouplingKind::kMh;
  InitKind init = InitKind::kLocalMode;

  std::string name() const {
    return std::string(coupling == CouplingKind::kGibbs ? "gibbs" : "mh") + "_" +
           (init == InitKind::kUniform ? "uniform" : "lmi");
  }

  /// Canonical position used for output ordering.
  int order() const { return (coupling == CouplingKind::kGibbs ? 0 : 2) + (init == InitKind::kUniform ? 0 : 1); }

  friend bool operator==(const BenchArm&, const BenchArm&) = default;
};

inline std::vector<BenchArm> all_bench_arms() {
  return {{CouplingKind::kGibbs, InitKind::kUniform},
          {CouplingKind::kGibbs, InitKind::kLocalMode},
          {CouplingKind::kMh, InitKind::kUniform},
          {CouplingKind::kMh, InitKind::kLocalMode}};
}

inline std::optional<BenchArm> parse_bench_arm(const std::string& s) {
  for (const auto& a : all_bench_arms()) {
    if (a.name() == s) return a;
  }
  return std::nullopt;
}

struct BenchRecord {
  BenchArm arm;
  Index dim = 0;
  Index replicate = 0;
  Index tau = 0;
  Index T_search = 0;
  Index total = 0;
  bool truncated = false;
};

struct BenchOptions {
  Index mh_tau_max = kDefaultMhTauMax;
  Index gibbs_tau_max = 100'000;
  unsigned threads = 1;
};

inline std::vector<Index> default_bench_dims() { return {1, 5, 10, 25, 50, 100, 200}; }

/// Orthogonally initialized d-d RBM (a DBM whose top layer has width 0).
inline DbmParams bench_model(Index dim, Index replicate, std::uint64_t seed) {
  Rng rng = Rng::stream(seed, {static_cast<std::uint64_t>(dim), static_cast<std::uint64_t>(replicate), 0x30de'1000ULL});
  return init_params(DbmShape{dim, dim, 0}, rng);
}

/// One replicate of one arm. The model depends only on (dim, replicate, seed).
inline BenchRecord run_bench_replicate(const BenchArm& arm, Index dim, Index replicate, std::uint64_t seed,
                                       const BenchOptions& opt) {
  const DbmParams p = bench_model(dim, replicate, seed);
  const DbmShape s = p.shape();
  Rng rng = Rng::stream(seed, {static_cast<std::uint64_t>(dim), static_cast<std::uint64_t>(replicate),
                               static_cast<std::uint64_t>(arm.order())});
  BenchRecord r;
  r.arm = arm;
  r.dim = dim;
  r.replicate = replicate;

  auto init_state = [&](Index& steps) {
    if (arm.init == InitKind::kUniform) return uniform_joint_state(s, rng);
    const auto mode = local_search_joint(p, rng);
    steps += mode.steps;
    return gibbs_sweep_joint(p, mode.state, rng);
  };

  CouplingOptions co;
  co.store_states = false;
  CoupledRun<JointState> run;
  if (arm.coupling == CouplingKind::kMh) {
    const JointState x0 = init_state(r.T_search);
    run = mh_couple_joint(p, x0, opt.mh_tau_max, rng, co);
  } else {
    // independent draws from the same initial law for the two chains
    const JointState x0 = init_state(r.T_search);
    const JointState y0 = init_state(r.T_search);
    run = gibbs_couple_joint(p, x0, y0, opt.gibbs_tau_max, rng, co);
  }
  r.tau = run.tau;
  r.truncated = run.truncated;
  r.total = r.tau + r.T_search;
  return r;
}

inline void sort_bench_records(std::vector<BenchRecord>& records) {
  std::stable_sort(records.begin(), records.end(), [](const BenchRecord& a, const BenchRecord& b) {
    return std::make_tuple(a.arm.order(), a.dim, a.replicate) < std::make_tuple(b.arm.order(), b.dim, b.replicate);
  });
}

/// All (arm, dim, replicate) combinations; truncations are recorded, never thrown.
inline std::vector<BenchRecord> run_coupling_sweep(const std::vector<Index>& dims, Index replicates,
                                                   const std::vector<BenchArm>& arms, std::uint64_t seed,
                                                   const BenchOptions& opt = {}) {
  for (Index d : dims) {
    if (d < 1) throw std::invalid_argument("run_coupling_sweep: dims must be >= 1");
  }
  if (replicates < 0) throw std::invalid_argument("run_coupling_sweep: replicates must be >= 0");
  std::vector<std::tuple<BenchArm, Index, Index>> jobs;
  for (const auto& a : arms)
    for (Index d : dims)
      for (Index r = 0; r < replicates; ++r) jobs.emplace_back(a, d, r);
  std::vector<BenchRecord> records(jobs.size());
  parallel_for(jobs.size(), resolve_threads(opt.threads), [&](std::size_t i) {
    const auto& [a, d, r] = jobs[i];
    records[i] = run_bench_replicate(a, d, r, seed, opt);
  });
  sort_bench_records(records);
  return records;
}

inline constexpr const char* kBenchCsvHeader = "arm,dim,replicate,tau,T,total,truncated";

inline void emit_csv(const std::vector<BenchRecord>& records, std::ostream& os) {
  std::vector<BenchRecord> sorted = records;
  sort_bench_records(sorted);
  os << kBenchCsvHeader << '\n';
  for (const auto& r : sorted) {
    os << r.arm.name() << ',' << r.dim << ',' << r.replicate << ',' << r.tau << ',' << r.T_search << ','
       << r.total << ',' << (r.truncated ? 1 : 0) << '\n';
  }
}

inline void emit_csv(const std::vector<BenchRecord>& records, const std::string& path) {
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw FormatError("bench: cannot open " + path);
  emit_csv(records, os);
}

inline std::vector<BenchRecord> parse_bench_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line != kBenchCsvHeader) throw FormatError("bench csv: bad header");
  std::vector<BenchRecord> out;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string f[7];
    for (auto& x : f) {
      if (!std::getline(ss, x, ',')) throw FormatError("bench csv: short row: " + line);
    }
    const auto arm = parse_bench_arm(f[0]);
    if (!arm) throw FormatError("bench csv: unknown arm " + f[0]);
    BenchRecord r;
    r.arm = *arm;
    r.dim = std::stoll(f[1]);
    r.replicate = std::stoll(f[2]);
    r.tau = std::stoll(f[3]);
    r.T_search = std::stoll(f[4]);
    r.total = std::stoll(f[5]);
    r.truncated = f[6] == "1";
    out.push_back(r);
  }
  return out;
}

struct BenchCell {
  BenchArm arm;
  Index dim = 0;
  Summary tau;
  Summary T_search;
  Summary total;
  Real frac_tau_one = 0;
  Index truncated = 0;
};

inline std::vector<BenchCell> summarize_bench(const std::vector<BenchRecord>& records) {
  std::map<std::pair<int, Index>, std::vector<const BenchRecord*>> groups;
  for (const auto& r : records) groups[{r.arm.order(), r.dim}].push_back(&r);
  std::vector<BenchCell> cells;
  for (const auto& [key, rs] : groups) {
    BenchCell c;
    c.arm = rs.front()->arm;
    c.dim = key.second;
    std::vector<Real> tau, T, total;
    Index ones = 0;
    for (const auto* r : rs) {
      tau.push_back(static_cast<Real>(r->tau));
      T.push_back(static_cast<Real>(r->T_search));
      total.push_back(static_cast<Real>(r->total));
      ones += (r->tau == 1 && !r->truncated) ? 1 : 0;
      c.truncated += r->truncated ? 1 : 0;
    }
    c.tau = summarize(tau);
    c.T_search = summarize(T);
    c.total = summarize(total);
    c.frac_tau_one = static_cast<Real>(ones) / static_cast<Real>(rs.size());
    cells.push_back(std::move(c));
  }
  return cells;
}

inline void print_bench_summary(const std::vector<BenchRecord>& records, std::ostream& os) {
  os << std::left << std::setw(14) << "arm" << std::right << std::setw(6) << "dim" << std::setw(6) << "n"
     << std::setw(12) << "mean_total" << std::setw(10) << "median" << std::setw(10) << "p95"
     << std::setw(10) << "mean_tau" << std::setw(9) << "tau=1" << std::setw(8) << "trunc" << '\n';
  for (const auto& c : summarize_bench(records)) {
    os << std::left << std::setw(14) << c.arm.name() << std::right << std::setw(6) << c.dim << std::setw(6)
       << c.total.count << std::fixed << std::setprecision(2) << std::setw(12) << c.total.mean
       << std::setw(10) << c.total.median << std::setw(10) << c.total.p95 << std::setw(10) << c.tau.mean
       << std::setw(9) << c.frac_tau_one << std::setw(8) << c.truncated << '\n';
    os.unsetf(std::ios::fixed);
  }
}

}  // namespace udbm

#endif  // UDBM_BENCH_HPP
