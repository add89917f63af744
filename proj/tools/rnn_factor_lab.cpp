// Copyright 2026 The rnn-factor-lab Authors
// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


// rnn-factor-lab: parameter tables, training runs, throughput benchmarks and
// gradient checks for LSTMP, factorized and grouped LSTM language models.
//
//   rnn-factor-lab params    [--out FILE]
//   rnn-factor-lab train     --config FILE [--steps N] [--seed N] [--out FILE]
//                            [--resume CKPT] [--threads N]
//   rnn-factor-lab bench     [--steps N] [--seed N] [--out FILE] [--threads N]
//   rnn-factor-lab gradcheck [--seed N] [--out FILE]
//
// Exit codes: 0 success, 1 usage, 2 config, 3 data/io, 4 numeric failure
// (including a failed gradient or ordering check).

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "rnnlab/accounting.hpp"
#include "rnnlab/config.hpp"
#include "rnnlab/model.hpp"
#include "rnnlab/trainer.hpp"

namespace {

using namespace rnnlab;

int code(ExitCode c) { return static_cast<int>(c); }

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write " + path);
  out << text;
  if (!out) throw IoError("write failed: " + path);
}

int run_params(const std::string& out) {
  const auto reports = table1_report();
  std::cout << format_report_table(reports);
  if (!out.empty()) write_file(out, format_report_csv(reports));
  for (const auto& r : reports) {
    if (r.reference_params && *r.reference_params != r.total_rnn_params) {
      std::cerr << "count mismatch for " << r.label << "\n";
      return code(ExitCode::kNumeric);
    }
  }
  return 0;
}

int run_train(const std::string& config_path, std::optional<std::int64_t> steps,
              std::optional<std::uint64_t> seed, const std::string& out,
              const std::string& resume, std::optional<int> threads) {
  RunConfig config = load_run_config(config_path);
  if (steps) config.run.steps = *steps;
  if (seed) config.run.seed = *seed;
  if (threads) config.run.threads = *threads;
  if (!out.empty()) config.run.metrics_path = out;
  config.validate();
  run_training(config, resume, &std::cout);
  return 0;
}

int run_bench(int steps, std::uint64_t seed, const std::string& out,
              int threads) {
  BenchOptions options;
  options.steps = steps;
  options.seed = seed;
  options.threads = threads;
  if (steps == 0) options.warmup_steps = 0;
  const auto reports = throughput_bench(throughput_configs(options), options);
  std::cout << "p=" << options.input_dim << " n=" << options.cell_dim
            << " B=" << options.batch << " T=" << options.unroll
            << " steps=" << options.steps << " threads=" << options.threads
            << "\n"
            << format_report_table(reports);
  if (!out.empty()) write_file(out, format_report_csv(reports));
  const OrderingVerdict verdict = check_throughput_ordering(reports);
  if (!verdict.measured) {
    std::cout << "ordering: not checked (" << verdict.detail << ")\n";
    return 0;
  }
  std::cout << "ordering: " << (verdict.passed ? "ok" : "FAILED") << " "
            << verdict.detail << "\n";
  return verdict.passed ? 0 : code(ExitCode::kNumeric);
}

int run_gradcheck(std::uint64_t seed, const std::string& out) {
  std::ostringstream text;
  bool ok = true;
  for (const auto& suite : gradient_suites()) {
    const GradientCheckReport r = gradient_check(suite.config, seed);
    const bool pass = r.max_relative_error <= kGradientTolerance;
    ok = ok && pass;
    char line[256];
    std::snprintf(line, sizeof(line),
                  "%-16s max_rel_err=%.3e at %s[%lld] (%lld partials) %s\n",
                  suite.label.c_str(), r.max_relative_error, r.tensor.c_str(),
                  static_cast<long long>(r.index),
                  static_cast<long long>(r.coordinates), pass ? "ok" : "FAIL");
    text << line;
  }
  std::cout << text.str();
  if (!out.empty()) write_file(out, text.str());
  return ok ? 0 : code(ExitCode::kNumeric);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"LSTM factorization and grouping lab", "rnn-factor-lab"};
  app.require_subcommand(1);

  std::string out;
  std::string config_path;
  std::string resume;
  std::optional<std::int64_t> train_steps;
  std::optional<std::uint64_t> train_seed;
  std::optional<int> train_threads;
  int bench_steps = 5;
  std::uint64_t seed = 1;
  int threads = 1;

  auto* params = app.add_subcommand("params", "Table of RNN parameter counts");
  params->add_option("--out", out, "Also write the table as CSV");

  auto* train = app.add_subcommand("train", "Train a language model");
  train->add_option("--config", config_path, "Run configuration (JSON)")
      ->required()
      ->check(CLI::ExistingFile);
  train->add_option("--steps", train_steps, "Override run.steps");
  train->add_option("--seed", train_seed, "Override run.seed");
  train->add_option("--out", out, "Override run.metrics_path");
  train->add_option("--resume", resume, "Continue from a checkpoint")
      ->check(CLI::ExistingFile);
  train->add_option("--threads", train_threads, "Override run.threads");

  auto* bench = app.add_subcommand("bench", "Words/sec of each cell variant");
  bench->add_option("--steps", bench_steps, "Timed steps per config")
      ->check(CLI::NonNegativeNumber);
  bench->add_option("--seed", seed, "Seed for weights and tokens");
  bench->add_option("--out", out, "Also write the report as CSV");
  bench->add_option("--threads", threads, "Workers for grouped cells")
      ->check(CLI::PositiveNumber);

  auto* gradcheck =
      app.add_subcommand("gradcheck", "Finite-difference gradient checks");
  gradcheck->add_option("--seed", seed, "Seed for weights and tokens");
  gradcheck->add_option("--out", out, "Also write the report");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return code(ExitCode::kUsage);
  }

  try {
    if (*params) return run_params(out);
    if (*train) {
      return run_train(config_path, train_steps, train_seed, out, resume,
                       train_threads);
    }
    if (*bench) return run_bench(bench_steps, seed, out, threads);
    if (*gradcheck) return run_gradcheck(seed, out);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return code(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return code(ExitCode::kData);
  }
  return code(ExitCode::kUsage);
}
