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

// Run configuration for the training driver. Parsed from JSON with four
// sections (model, optimizer, data, run); unknown keys are rejected.
//
//   {
//     "model": {"layers": [{"variant": "grouped", "input_dim": 64,
//                           "cell_dim": 256, "groups": 2}],
//               "unroll_length": 32, "batch_size": 16, "precision": "float"},
//     "optimizer": {"lr": 0.2, "clip_norm": 1.0, "initial_accumulator": 0.1,
//                   "epsilon": 1e-10},
//     "data": {"corpus": "data/macbeth.txt", "mode": "char", "max_vocab": 100,
//              "heldout_fraction": 0.1},
//     "run": {"steps": 5000, "seed": 1, "eval_interval": 100,
//             "checkpoint_path": "run.flm", "checkpoint_interval": 0,
//             "metrics_path": "metrics.csv", "threads": 1}
//   }
//
// Every key is optional and falls back to the defaults below. The vocabulary
// size is not configured directly: it is the size of the vocabulary built
// from the corpus, bounded by data.max_vocab.

#ifndef RNNLAB_CONFIG_HPP_
#define RNNLAB_CONFIG_HPP_

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "rnnlab/cells.hpp"
#include "rnnlab/corpus.hpp"
#include "rnnlab/optim.hpp"

namespace rnnlab {

enum class Precision { kFloat, kDouble };

struct ModelSection {
  std::vector<CellConfig> layers = {CellConfig::dense(64, 256)};
  Index unroll_length = 32;
  Index batch_size = 16;
  Precision precision = Precision::kFloat;
};

struct OptimizerSection {
  AdagradOptions adagrad;
  double clip_norm = 1.0;  // <= 0 disables clipping
};

struct DataSection {
  std::string corpus;
  TokenMode mode = TokenMode::kChar;
  Index max_vocab = 100;
  double heldout_fraction = 0.1;
};

struct RunSection {
  std::int64_t steps = 5000;
  std::uint64_t seed = 1;
  std::int64_t eval_interval = 100;
  std::string checkpoint_path;         // empty: no checkpoints
  std::int64_t checkpoint_interval = 0;  // 0: only after the last step
  std::string metrics_path;            // empty: no CSV
  int threads = 1;
};

struct RunConfig {
  ModelSection model;
  OptimizerSection optimizer;
  DataSection data;
  RunSection run;

  // Structural checks that need no file access: layer chain, positive
  // sizes, optimizer options. ConfigError on failure.
  void validate() const;

  // ModelConfig for a given vocabulary size.
  ModelConfig model_config(Index vocab_size) const;
};

/// Strict JSON parse; ConfigError names the offending key.
RunConfig parse_run_config(std::string_view json_text);

/// parse_run_config on a file's contents (IoError if unreadable). A relative
/// data.corpus is taken relative to the config file's directory; output
/// paths stay relative to the working directory.
RunConfig load_run_config(const std::filesystem::path& path);

/// Canonical JSON text of a config; parse_run_config inverts it.
std::string dump_run_config(const RunConfig& config);

std::string to_string(Precision precision);

}  // namespace rnnlab

#endif  // RNNLAB_CONFIG_HPP_
