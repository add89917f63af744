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

// Parameter and multiply-accumulate accounting for stacks of cells, and a
// words/sec harness that times complete training steps.

#ifndef RNNLAB_ACCOUNTING_HPP_
#define RNNLAB_ACCOUNTING_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rnnlab/cells.hpp"

namespace rnnlab {

struct NamedConfig {
  std::string label;
  std::vector<CellConfig> layers;
  // Published RNN parameter count, when there is one to compare against.
  std::optional<std::int64_t> reference_params;
};

struct BenchReport {
  std::string label;
  std::int64_t total_rnn_params = 0;
  std::int64_t gate_macs = 0;       // per token, summed over layers
  std::int64_t flops_per_step = 0;  // gate + projection MACs, summed over layers
  std::optional<std::int64_t> reference_params;
  std::optional<double> measured_words_per_sec;  // empty: no measurement
  std::int64_t steps_timed = 0;
};

struct MacCount {
  std::int64_t gate = 0;
  std::int64_t projection = 0;
  std::int64_t total() const { return gate + projection; }
};

/// MACs in the matrix products of one cell step for one token:
/// gate Dense 8np, Factorized 2pr + 4nr, Grouped 8np/k; projection np.
MacCount flops_per_step(const CellConfig& config);

/// Sum of param_count(layer, projection, bias) over the layers.
std::int64_t rnn_param_count(const NamedConfig& config);

/// Two-layer p=1024, n=8192 stacks: the five published configurations plus
/// the G4-G8 hierarchy (k=4 below, k=8 above).
std::vector<NamedConfig> table1_configs();

/// Counts only; words/sec is left empty.
std::vector<BenchReport> table1_report();

struct BenchOptions {
  Index input_dim = 256;
  Index cell_dim = 1024;
  Index batch = 32;
  Index unroll = 16;
  Index vocab = 128;
  Index layers = 2;
  int warmup_steps = 1;
  int steps = 5;
  std::uint64_t seed = 1;
  // Worker count for grouped cells; timings with threads > 1 are
  // informational only.
  int threads = 1;
};

/// Dense, G-2, G-4, G-8 and F with r = p/2, all at the benchmark dims.
std::vector<NamedConfig> throughput_configs(const BenchOptions& options);

/// Times `options.steps` full forward + backward + Adagrad steps per config
/// on synthetic tokens, after `warmup_steps` untimed ones. steps == 0 gives
/// reports without a measurement.
std::vector<BenchReport> throughput_bench(
    const std::vector<NamedConfig>& configs, const BenchOptions& options);

struct OrderingVerdict {
  bool measured = false;  // false when any report lacks a measurement
  bool passed = false;
  std::string detail;
};

/// Checks words/sec Dense < G2 < G4 < G8, each adjacent pair separated by at
/// least `min_separation` (relative), and every factorized config > Dense.
/// Reports are matched by the labels of throughput_configs().
OrderingVerdict check_throughput_ordering(
    const std::vector<BenchReport>& reports, double min_separation = 0.05);

/// Aligned plain-text table.
std::string format_report_table(const std::vector<BenchReport>& reports);

/// label,rnn_params,gate_macs,words_per_sec (empty words_per_sec when not
/// measured).
std::string format_report_csv(const std::vector<BenchReport>& reports);

}  // namespace rnnlab

#endif  // RNNLAB_ACCOUNTING_HPP_
