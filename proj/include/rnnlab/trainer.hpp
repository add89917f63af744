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

// Training driver: corpus -> vocabulary -> stream batches -> train_step
// loop, with a metrics CSV, periodic checkpoints, resume, and a held-out
// evaluation at the end.

#ifndef RNNLAB_TRAINER_HPP_
#define RNNLAB_TRAINER_HPP_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "rnnlab/checkpoint.hpp"
#include "rnnlab/config.hpp"
#include "rnnlab/corpus.hpp"
#include "rnnlab/training.hpp"

namespace rnnlab {

inline constexpr const char* kMetricsHeader =
    "step,wall_time_s,train_loss,train_ppl,words_per_sec";

struct MetricsRow {
  std::int64_t step = 0;
  double wall_time_s = 0.0;
  double train_loss = 0.0;  // mean over the steps since the previous row
  double train_ppl = 0.0;   // exp(train_loss)
  double words_per_sec = 0.0;
};

std::string format_metrics_row(const MetricsRow& row);

struct TrainSummary {
  std::int64_t steps = 0;  // completed steps, counting resumed ones
  double best_train_ppl = std::numeric_limits<double>::infinity();
  std::optional<double> heldout_ppl;  // empty when nothing is held out
  std::vector<MetricsRow> rows;       // rows written by this invocation
  std::vector<double> step_losses;    // per-step loss, this invocation only
};

/// Perplexity over held-out sentences, pooled per token. Each line is scored
/// from a zero state as [EOS, tokens..., EOS], predicting everything after the
/// first EOS.
template <typename Scalar>
double heldout_perplexity(const LanguageModel<Scalar>& model,
                          const Vocabulary& vocab,
                          const std::vector<std::string_view>& lines,
                          TokenMode mode);

template <typename Scalar>
class Trainer {
 public:
  // Reads the corpus, builds the vocabulary and batcher, and initializes
  // the model from run.seed. ConfigError/DataError/IoError before any
  // training.
  explicit Trainer(RunConfig config);

  // Restores model, optimizer, carried state, batch cursor and metric
  // accumulators. The checkpoint must come from the same configuration.
  void resume(const std::filesystem::path& path);

  // Trains until run.steps steps are complete, appending CSV rows to
  // run.metrics_path (created with a header unless resuming) and writing
  // checkpoints. Progress lines go to `log` when it is non-null.
  TrainSummary run(std::ostream* log = nullptr);

  void save(const std::filesystem::path& path) const;

  std::int64_t step() const { return step_; }
  const LanguageModel<Scalar>& model() const { return model_; }
  const AdagradState<Scalar>& optimizer() const { return optimizer_; }
  const Vocabulary& vocabulary() const { return vocab_; }
  const RunConfig& config() const { return config_; }

 private:
  MetricsRow close_interval(double now_s);

  RunConfig config_;
  std::string corpus_;
  Vocabulary vocab_;
  CorpusSplit split_;
  ModelConfig model_config_;
  std::optional<StreamBatcher> batcher_;
  LanguageModel<Scalar> model_;
  AdagradState<Scalar> optimizer_;
  ModelState<Scalar> state_;

  std::int64_t step_ = 0;
  bool resumed_ = false;
  double elapsed_before_ = 0.0;  // wall time of earlier invocations
  double interval_loss_sum_ = 0.0;
  std::int64_t interval_steps_ = 0;
  double interval_start_s_ = 0.0;
  double best_ppl_ = std::numeric_limits<double>::infinity();
};

/// Runs Trainer<float> or Trainer<double> per model.precision.
TrainSummary run_training(const RunConfig& config,
                          const std::filesystem::path& resume_from,
                          std::ostream* log);

}  // namespace rnnlab

#endif  // RNNLAB_TRAINER_HPP_
