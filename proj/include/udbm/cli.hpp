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

#ifndef UDBM_CLI_HPP
#define UDBM_CLI_HPP

// The `udbm` command line: train, sample, complete, bench, oracle-check.
// Exit codes: 0 success, 1 runtime failure, 2 usage or configuration error.

#include <CLI11.hpp>

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "udbm/bench.hpp"
#include "udbm/check.hpp"
#include "udbm/checkpoint.hpp"
#include "udbm/config.hpp"
#include "udbm/data.hpp"
#include "udbm/training.hpp"

namespace udbm {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

inline constexpr std::uint64_t kInitStreamTag = 0x1a17'0000ULL;
inline constexpr std::uint64_t kSampleStreamTag = 0x5a3b'0000ULL;
inline constexpr std::uint64_t kCompleteStreamTag = 0xc0b1'0000ULL;

/// Reads '0'/'1' lines; blank lines and lines starting with '#' are skipped.
inline std::vector<SpinVec> read_bits_file(const std::string& path, std::vector<Mask>* masks = nullptr) {
  std::ifstream is(path);
  if (!is) throw FormatError("bits: cannot open " + path);
  std::vector<SpinVec> out;
  std::string line;
  while (std::getline(is, line)) {
    line = detail::trim(line);
    if (line.empty() || line[0] == '#') continue;
    Mask m;
    out.push_back(bits_to_spins(line, masks ? &m : nullptr));
    if (masks) masks->push_back(std::move(m));
    if (out.back().size() != out.front().size()) throw FormatError("bits: rows differ in length in " + path);
  }
  return out;
}

inline void write_bits_file(std::ostream& os, const std::vector<SpinVec>& xs) {
  for (const auto& x : xs) os << spins_to_bits(x) << '\n';
}

/// Training examples named by the config.
inline BinaryDataset load_training_data(const TrainConfig& cfg) {
  BinaryDataset d;
  if (cfg.data_format == "synthetic") {
    d = synthetic_patterns(static_cast<std::size_t>(cfg.synthetic_patterns), cfg.synthetic_length, cfg.seed);
  } else if (cfg.data_format == "bits") {
    if (cfg.data_path.empty()) throw ConfigError("data_path is required for data_format=bits");
    d.examples = read_bits_file(cfg.data_path);
    d.origin = cfg.data_path;
  } else {
    if (cfg.data_path.empty()) throw ConfigError("data_path is required for data_format=idx");
    RawImages raw = load_idx_images(cfg.data_path);
    if (cfg.downscale > 0) {
      const auto side = static_cast<std::uint32_t>(cfg.downscale);
      raw = downscale(raw, side, side);
    }
    d = to_spin_dataset(raw, cfg.data_path);
  }
  if (cfg.max_examples > 0 && d.examples.size() > static_cast<std::size_t>(cfg.max_examples)) {
    d.examples.resize(static_cast<std::size_t>(cfg.max_examples));
  }
  if (d.examples.empty()) throw std::runtime_error("training data is empty");
  return d;
}

/// Image geometry for an n_v-unit model: explicit, or square when n_v = 8 * side^2.
inline std::optional<std::pair<Index, Index>> image_geometry(Index n_v, Index height, Index width) {
  if (height > 0 && width > 0) {
    if (height * width * kBitsPerPixel != n_v) {
      throw ConfigError("image geometry " + std::to_string(height) + "x" + std::to_string(width) +
                        " does not match n_v = " + std::to_string(n_v));
    }
    return std::pair{height, width};
  }
  if (n_v % kBitsPerPixel != 0) return std::nullopt;
  const auto side = static_cast<Index>(std::llround(std::sqrt(static_cast<double>(n_v / kBitsPerPixel))));
  if (side * side * kBitsPerPixel != n_v) return std::nullopt;
  return std::pair{side, side};
}

inline std::string checkpoint_path(const std::string& dir, std::uint64_t step) {
  std::ostringstream os;
  os << "step_" << std::setw(8) << std::setfill('0') << step << ".udbm";
  return (std::filesystem::path(dir) / os.str()).string();
}

inline std::string resolved_log_path(const TrainConfig& cfg) {
  if (!cfg.log_path.empty()) return cfg.log_path;
  return (std::filesystem::path(cfg.checkpoint_dir) / "train_log.csv").string();
}

/// Runs a configured training job; returns the final parameters.
inline DbmParams run_training(TrainConfig cfg, std::ostream& err) {
  const BinaryDataset data = load_training_data(cfg);
  const Index n_v = data.examples.front().size();
  if (cfg.shape.n_v == 0) cfg.shape.n_v = n_v;
  if (cfg.shape.n_v != n_v) {
    throw ConfigError("n_v = " + std::to_string(cfg.shape.n_v) + " but examples have length " +
                      std::to_string(n_v));
  }
  if (cfg.shape.n_h1 < 1) throw ConfigError("n_h1 must be set to a positive count");
  cfg.validate();

  DbmParams p;
  if (!cfg.resume.empty()) {
    p = load_checkpoint(cfg.resume);
    if (!(p.shape() == cfg.shape)) {
      throw ConfigError("resume checkpoint has shape " + p.shape().str() + ", config asks for " + cfg.shape.str());
    }
  } else {
    Rng rng = Rng::stream(cfg.seed, {kInitStreamTag});
    p = init_params(cfg.shape, rng);
  }

  std::filesystem::create_directories(cfg.checkpoint_dir);
  const std::string log_path = resolved_log_path(cfg);
  if (const auto parent = std::filesystem::path(log_path).parent_path(); !parent.empty()) {
    std::filesystem::create_directories(parent);
  }
  const bool append = !cfg.resume.empty() && std::filesystem::exists(log_path);
  std::ofstream log(log_path, append ? std::ios::app : std::ios::trunc);
  if (!log) throw std::runtime_error("cannot open log " + log_path);
  write_config(log, cfg, "# ");
  if (!append) log << kTrainLogHeader << '\n';
  log.precision(10);

  TrainHooks hooks;
  hooks.on_step = [&](const StepMetrics& m, long long ms) {
    write_log_row(log, m, cfg.log_wall_time ? ms : 0);
    if (m.dropped > 0) err << "step " << m.step << ": dropped " << m.dropped << " truncated examples\n";
  };
  hooks.on_checkpoint = [&](std::uint64_t step, const DbmParams& q) {
    save_checkpoint(checkpoint_path(cfg.checkpoint_dir, step), q);
    log.flush();
  };
  return train(std::move(p), data.examples, cfg, hooks);
}

namespace detail {

inline std::vector<Index> parse_index_list(const std::string& s) {
  std::vector<Index> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    out.push_back(parse_count("list", item));
  }
  return out;
}

struct OpenOut {
  std::ofstream file;
  std::ostream* os = nullptr;
};

inline void open_out(OpenOut& o, const std::string& path, std::ostream& fallback,
                     std::ios::openmode mode = std::ios::trunc) {
  if (path.empty() || path == "-") {
    o.os = &fallback;
    return;
  }
  o.file.open(path, mode);
  if (!o.file) throw std::runtime_error("cannot open " + path);
  o.os = &o.file;
}

inline void write_pgms(const std::string& prefix, const std::vector<SpinVec>& xs, Index h, Index w) {
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const auto img = spins_to_image(xs[i]);
    std::ostringstream name;
    name << prefix << std::setw(4) << std::setfill('0') << i << ".pgm";
    write_pgm(name.str(), img.data(), h, w);
  }
}

inline Mask parse_mask(const std::string& spec, Index n_v, std::optional<std::pair<Index, Index>> geom) {
  Mask m;
  if (spec == "none") {
    m.observed.assign(static_cast<std::size_t>(n_v), true);
  } else if (spec == "all") {
    m.observed.assign(static_cast<std::size_t>(n_v), false);
  } else if (spec == "lower_half") {
    // for unshaped vectors the lower half is the second half of the positions
    m = geom ? lower_half_mask(geom->first, geom->second) : lower_half_mask(n_v, 1, 1);
  } else if (spec.rfind("rect:", 0) == 0) {
    if (!geom) throw ConfigError("rect masks need an image-shaped model (use --height/--width)");
    const auto v = parse_index_list(spec.substr(5));
    if (v.size() != 4) throw ConfigError("rect mask expects rect:r0,c0,r1,c1");
    m = rect_missing_mask(geom->first, geom->second, v[0], v[1], v[2], v[3]);
  } else {
    throw ConfigError("unknown mask '" + spec + "' (none, all, lower_half, rect:r0,c0,r1,c1, input)");
  }
  return m;
}

}  // namespace detail

/// Parses and runs one invocation. args[0] is the program name.
inline int run_cli(const std::vector<std::string>& args, std::ostream& out = std::cout,
                   std::ostream& err = std::cerr) {
  CLI::App app{"udbm: deep Boltzmann machines trained with coupled Metropolis-Hastings chains", "udbm"};
  app.require_subcommand(1);
  app.fallthrough();
  std::optional<std::uint64_t> seed_flag;
  unsigned threads = 0;
  app.add_option("--seed", seed_flag, "root seed for every random stream");
  app.add_option("--threads", threads, "worker threads (0 = hardware concurrency)");

  // train
  auto* train_cmd = app.add_subcommand("train", "train a model from a key=value config file");
  std::string config_path;
  std::vector<std::string> overrides;
  train_cmd->add_option("config", config_path, "config file")->required();
  train_cmd->add_option("--set", overrides, "key=value override, repeatable; beats the config file");

  // sample
  auto* sample_cmd = app.add_subcommand("sample", "draw visible vectors from a checkpoint");
  std::string ckpt, out_path = "-", pgm_prefix;
  std::size_t n_samples = 16;
  Index mh_steps = 0, height = 0, width = 0;
  sample_cmd->add_option("--checkpoint", ckpt, "model checkpoint")->required();
  sample_cmd->add_option("-n,--n", n_samples, "number of samples");
  sample_cmd->add_option("--mh-steps", mh_steps, "MH steps after the local search");
  sample_cmd->add_option("--out", out_path, "output bits file ('-' for stdout)");
  sample_cmd->add_option("--pgm-prefix", pgm_prefix, "write PGM images as <prefix>NNNN.pgm");
  sample_cmd->add_option("--height", height, "image height in pixels");
  sample_cmd->add_option("--width", width, "image width in pixels");

  // complete
  auto* complete_cmd = app.add_subcommand("complete", "fill in masked visible units");
  std::string input_path, input_format = "bits", mask_spec, out_format;
  Index downscale_side = 0;
  complete_cmd->add_option("--checkpoint", ckpt, "model checkpoint")->required();
  complete_cmd->add_option("--input", input_path, "input file")->required();
  complete_cmd->add_option("--format", input_format, "input format: bits or idx")
      ->check(CLI::IsMember({"bits", "idx"}));
  complete_cmd->add_option("--mask", mask_spec,
                           "none, all, lower_half, rect:r0,c0,r1,c1, or input ('?' marks missing; bits default)");
  complete_cmd->add_option("--out", out_path, "output file ('-' for stdout)");
  complete_cmd->add_option("--out-format", out_format, "bits or idx (default: input format)")
      ->check(CLI::IsMember({"bits", "idx"}));
  complete_cmd->add_option("--pgm-prefix", pgm_prefix, "also write completed images as PGM");
  complete_cmd->add_option("--downscale", downscale_side, "downscale idx input to this square side");
  complete_cmd->add_option("--height", height, "image height in pixels (bits input)");
  complete_cmd->add_option("--width", width, "image width in pixels (bits input)");

  // bench
  auto* bench_cmd = app.add_subcommand("bench", "coupling-time sweep over dimensions and arms");
  std::string dims_arg, arms_arg = "all";
  Index replicates = 200;
  BenchOptions bench_opt;
  bool bench_summary = false;
  bench_cmd->add_option("--dims", dims_arg, "comma-separated dimensions (default 1,5,10,25,50,100,200)");
  bench_cmd->add_option("--replicates", replicates, "replicates per arm and dimension");
  bench_cmd->add_option("--arms", arms_arg, "all, or a comma list of gibbs_uniform,gibbs_lmi,mh_uniform,mh_lmi");
  bench_cmd->add_option("--mh-tau-max", bench_opt.mh_tau_max, "MH coupling cap");
  bench_cmd->add_option("--gibbs-tau-max", bench_opt.gibbs_tau_max, "Gibbs coupling cap (sweeps)");
  bench_cmd->add_option("--out", out_path, "CSV output ('-' for stdout)");
  bench_cmd->add_flag("--summary", bench_summary, "print mean/median/p95 per arm and dimension to stderr");

  // oracle-check
  auto* oracle_cmd = app.add_subcommand("oracle-check", "z-test the estimators against exact enumeration");
  OracleCheckOptions oc;
  bool strict = true;
  oracle_cmd->add_option("-n,--n", oc.n, "draws per estimator");
  oracle_cmd->add_option("--sigma", oc.max_sigma, "z threshold");
  oracle_cmd->add_option("--min-n", oc.min_n, "draw count below which the check is flagged low power");
  oracle_cmd->add_flag("--strict,!--no-strict", strict, "fail when the check is low power (default on)");
  oracle_cmd->add_flag("--inject-bias", oc.inject_bias, "replace the negative phase by a short Gibbs chain");

  std::vector<std::string> argv_tail(args.begin() + (args.empty() ? 0 : 1), args.end());
  std::reverse(argv_tail.begin(), argv_tail.end());
  try {
    app.parse(argv_tail);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }
  const std::uint64_t seed = seed_flag.value_or(0);

  try {
    if (*train_cmd) {
      if (!std::filesystem::exists(config_path)) {
        err << "udbm train: config file not found: " << config_path << '\n';
        return kExitUsage;
      }
      TrainConfig cfg = load_config(config_path);
      for (const auto& o : overrides) {
        const auto [k, v] = split_assignment(o);
        set_config_value(cfg, k, v);
      }
      if (seed_flag) cfg.seed = *seed_flag;
      if (app.count("--threads")) cfg.threads = threads;
      const DbmParams p = run_training(cfg, err);
      out << "trained " << p.shape().str() << " for " << cfg.steps << " steps; log " << resolved_log_path(cfg)
          << '\n';
      return kExitOk;
    }

    if (*sample_cmd) {
      const DbmParams p = load_checkpoint(ckpt);
      std::vector<SpinVec> xs;
      xs.reserve(n_samples);
      for (std::size_t i = 0; i < n_samples; ++i) {
        Rng rng = Rng::stream(seed, {kSampleStreamTag, static_cast<std::uint64_t>(i)});
        xs.push_back(std::move(sample(p, 1, mh_steps, rng).front()));
      }
      detail::OpenOut o;
      detail::open_out(o, out_path, out);
      write_bits_file(*o.os, xs);
      const auto geom = image_geometry(p.W1.rows(), height, width);
      std::string prefix = pgm_prefix;
      if (prefix.empty() && out_path != "-") prefix = std::filesystem::path(out_path).replace_extension().string() + "_";
      if (geom && !prefix.empty()) detail::write_pgms(prefix, xs, geom->first, geom->second);
      return kExitOk;
    }

    if (*complete_cmd) {
      const DbmParams p = load_checkpoint(ckpt);
      const Index n_v = p.W1.rows();
      std::vector<SpinVec> xs;
      std::vector<Mask> input_masks;
      std::optional<std::pair<Index, Index>> geom;
      if (input_format == "idx") {
        RawImages raw = load_idx_images(input_path);
        if (downscale_side > 0) {
          raw = downscale(raw, static_cast<std::uint32_t>(downscale_side), static_cast<std::uint32_t>(downscale_side));
        }
        xs = to_spin_dataset(raw).examples;
        geom = std::pair<Index, Index>{raw.rows, raw.cols};
      } else {
        xs = read_bits_file(input_path, &input_masks);
        geom = (height > 0 || width > 0) ? image_geometry(n_v, height, width) : std::nullopt;
      }
      if (!xs.empty() && xs.front().size() != n_v) {
        throw ConfigError("input vectors have length " + std::to_string(xs.front().size()) + " but model n_v = " +
                          std::to_string(n_v));
      }
      if (mask_spec.empty()) mask_spec = input_format == "bits" ? "input" : "lower_half";
      if (mask_spec == "input" && input_format != "bits") throw ConfigError("--mask input needs bits input");
      std::optional<Mask> fixed;
      if (mask_spec != "input") fixed = detail::parse_mask(mask_spec, n_v, geom);
      std::vector<SpinVec> done(xs.size());
      for (std::size_t i = 0; i < xs.size(); ++i) {
        const Mask& m = fixed ? *fixed : input_masks[i];
        if (!input_masks.empty() && fixed) {
          for (std::size_t k = 0; k < m.observed.size(); ++k) {
            if (m.observed[k] && !input_masks[i].observed[k]) {
              throw ConfigError("row " + std::to_string(i) + " has '?' at an observed position");
            }
          }
        }
        Rng rng = Rng::stream(seed, {kCompleteStreamTag, static_cast<std::uint64_t>(i)});
        done[i] = complete(p, xs[i], m, rng);
      }
      if (out_format.empty()) out_format = input_format;
      if (out_format == "idx") {
        if (!geom) geom = image_geometry(n_v, height, width);
        if (!geom) throw ConfigError("idx output needs an image-shaped model");
        if (out_path.empty() || out_path == "-") throw ConfigError("idx output needs --out <file>");
        save_idx_images(out_path, from_spin_dataset(done, static_cast<std::uint32_t>(geom->first),
                                                    static_cast<std::uint32_t>(geom->second)));
      } else {
        detail::OpenOut o;
        detail::open_out(o, out_path, out);
        write_bits_file(*o.os, done);
      }
      if (!pgm_prefix.empty()) {
        if (!geom) throw ConfigError("PGM output needs an image-shaped model");
        detail::write_pgms(pgm_prefix, done, geom->first, geom->second);
      }
      return kExitOk;
    }

    if (*bench_cmd) {
      const std::vector<Index> dims = dims_arg.empty() ? default_bench_dims() : detail::parse_index_list(dims_arg);
      if (dims.empty()) throw ConfigError("--dims is empty");
      for (Index d : dims) {
        if (d < 1) throw ConfigError("--dims entries must be >= 1");
      }
      std::vector<BenchArm> arms;
      if (arms_arg == "all") {
        arms = all_bench_arms();
      } else {
        std::stringstream ss(arms_arg);
        std::string a;
        while (std::getline(ss, a, ',')) {
          const auto arm = parse_bench_arm(detail::trim(a));
          if (!arm) throw ConfigError("unknown arm '" + a + "'");
          arms.push_back(*arm);
        }
      }
      if (bench_opt.mh_tau_max < 1 || bench_opt.gibbs_tau_max < 1) throw ConfigError("tau caps must be >= 1");
      bench_opt.threads = threads;
      const auto records = run_coupling_sweep(dims, replicates, arms, seed, bench_opt);
      detail::OpenOut o;
      detail::open_out(o, out_path, out);
      emit_csv(records, *o.os);
      if (bench_summary) print_bench_summary(records, err);
      return kExitOk;
    }

    if (*oracle_cmd) {
      oc.seed = seed;
      oc.threads = threads;
      if (oc.n < 2) throw ConfigError("--n must be >= 2");
      const OracleCheckReport rep = run_oracle_check(oc);
      print_oracle_report(rep, oc, out);
      const bool ok = rep.all_pass() && !(strict && rep.low_power);
      out << (ok ? "oracle-check: PASS" : "oracle-check: FAIL") << '\n';
      return ok ? kExitOk : kExitFailure;
    }
  } catch (const ConfigError& e) {
    err << "udbm: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "udbm: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitUsage;
}

inline int run_cli(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  return run_cli(std::vector<std::string>(argv, argv + argc), out, err);
}

}  // namespace udbm

#endif  // UDBM_CLI_HPP
