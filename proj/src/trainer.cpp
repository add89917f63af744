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

#include "rnnlab/trainer.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>

#include <nlohmann/json.hpp>

namespace rnnlab {

namespace {

using nlohmann::json;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

}  // namespace

std::string format_metrics_row(const MetricsRow& row) {
  char buf[160];
  std::snprintf(buf, sizeof(buf), "%lld,%.3f,%.6f,%.4f,%.1f",
                static_cast<long long>(row.step), row.wall_time_s,
                row.train_loss, row.train_ppl, row.words_per_sec);
  return buf;
}

template <typename Scalar>
double heldout_perplexity(const LanguageModel<Scalar>& model,
                          const Vocabulary& vocab,
                          const std::vector<std::string_view>& lines,
                          TokenMode mode) {
  double total_nll = 0.0;
  std::int64_t total_tokens = 0;
  for (const auto line : lines) {
    const std::vector<std::int32_t> ids = encode_line(vocab, line, mode);
    BatchSequence seq;
    seq.tokens.resize(1, static_cast<Index>(ids.size()) + 2);
    seq.tokens(0, 0) = Vocabulary::kEos;
    for (std::size_t i = 0; i < ids.size(); ++i) {
      seq.tokens(0, static_cast<Index>(i) + 1) = ids[i];
    }
    seq.tokens(0, seq.tokens.cols() - 1) = Vocabulary::kEos;
    const SequenceForward<Scalar> fwd = forward_sequence(
        model, seq, zero_state<Scalar>(model.config, 1));
    const LossResult<Scalar> loss =
        softmax_cross_entropy<Scalar>(fwd.logits, seq.targets());
    total_nll += loss.mean_nll * static_cast<double>(seq.steps());
    total_tokens += seq.steps();
  }
  if (total_tokens == 0) throw DataError("no held-out tokens to evaluate");
  return perplexity(total_nll / static_cast<double>(total_tokens));
}

template <typename Scalar>
Trainer<Scalar>::Trainer(RunConfig config) : config_(std::move(config)) {
  config_.validate();
  if (config_.data.corpus.empty()) throw ConfigError("data.corpus is not set");
  corpus_ = read_text_file(config_.data.corpus);
  vocab_ = build_vocab(corpus_, config_.data.mode, config_.data.max_vocab);
  split_ = split_heldout(corpus_, config_.data.heldout_fraction);
  model_config_ = config_.model_config(vocab_.size());
  model_config_.validate();
  batcher_.emplace(encode_stream(vocab_, split_.train, config_.data.mode),
                   model_config_.batch_size, model_config_.unroll_length);
  model_ = LanguageModel<Scalar>::init(model_config_, config_.run.seed);
  optimizer_ = AdagradState<Scalar>::init(model_, config_.optimizer.adagrad);
  state_ = zero_state<Scalar>(model_config_, model_config_.batch_size);
}

template <typename Scalar>
void Trainer<Scalar>::resume(const std::filesystem::path& path) {
  Checkpoint<Scalar> ck = load_checkpoint<Scalar>(path, model_config_);
  const json meta = json::parse(ck.metadata);
  try {
    if (meta.at("seed").get<std::uint64_t>() != config_.run.seed) {
      throw CheckpointError(path.string() +
                            ": checkpoint was written with a different seed");
    }
    batcher_->seek(meta.at("cursor").get<Index>());
    step_ = meta.at("step").get<std::int64_t>();
    interval_loss_sum_ = meta.at("interval_loss_sum").get<double>();
    interval_steps_ = meta.at("interval_steps").get<std::int64_t>();
    elapsed_before_ = meta.at("wall_time_s").get<double>();
    const json& best = meta.at("best_train_ppl");
    best_ppl_ = best.is_null() ? std::numeric_limits<double>::infinity()
                               : best.get<double>();
  } catch (const json::exception& e) {
    throw CheckpointError(path.string() + ": bad metadata: " + e.what());
  } catch (const IndexError& e) {
    throw CheckpointError(path.string() + ": " + e.what());
  }
  model_ = std::move(ck.model);
  optimizer_ = std::move(ck.optimizer);
  optimizer_.options = config_.optimizer.adagrad;
  state_ = std::move(ck.state);
  resumed_ = true;
}

template <typename Scalar>
void Trainer<Scalar>::save(const std::filesystem::path& path) const {
  Checkpoint<Scalar> ck{model_, optimizer_, state_, "{}"};
  json meta = {
      {"step", step_},
      {"cursor", batcher_->cursor()},
      {"seed", config_.run.seed},
      {"interval_loss_sum", interval_loss_sum_},
      {"interval_steps", interval_steps_},
      {"wall_time_s", elapsed_before_},
      {"best_train_ppl", nullptr},
      {"run_config", json::parse(dump_run_config(config_))},
  };
  if (std::isfinite(best_ppl_)) meta["best_train_ppl"] = best_ppl_;
  ck.metadata = meta.dump();
  save_checkpoint(path, ck);
}

template <typename Scalar>
MetricsRow Trainer<Scalar>::close_interval(double now_s) {
  MetricsRow row;
  row.step = step_;
  row.wall_time_s = elapsed_before_ + now_s;
  row.train_loss = interval_loss_sum_ / static_cast<double>(interval_steps_);
  row.train_ppl = perplexity(row.train_loss);
  const double words = static_cast<double>(model_config_.batch_size *
                                           model_config_.unroll_length) *
                       static_cast<double>(interval_steps_);
  row.words_per_sec = words / std::max(now_s - interval_start_s_, 1e-9);
  best_ppl_ = std::min(best_ppl_, row.train_ppl);
  interval_loss_sum_ = 0.0;
  interval_steps_ = 0;
  interval_start_s_ = now_s;
  return row;
}

template <typename Scalar>
TrainSummary Trainer<Scalar>::run(std::ostream* log) {
  const RunSection& rc = config_.run;
  const auto start = Clock::now();
  interval_start_s_ = 0.0;

  std::ofstream metrics;
  if (!rc.metrics_path.empty()) {
    metrics.open(rc.metrics_path,
                 resumed_ ? std::ios::app : std::ios::out | std::ios::trunc);
    if (!metrics) throw IoError("cannot write " + rc.metrics_path);
    if (!resumed_) metrics << kMetricsHeader << "\n";
  }
  TrainSummary summary;
  const auto emit = [&](const MetricsRow& row) {
    summary.rows.push_back(row);
    if (metrics.is_open()) {
      metrics << format_metrics_row(row) << "\n";
      metrics.flush();
      if (!metrics) throw IoError("write failed: " + rc.metrics_path);
    }
    if (log) *log << format_metrics_row(row) << "\n";
  };
  // Checkpoint wall time covers this invocation up to the save.
  const auto save_now = [&] {
    const double before = elapsed_before_;
    elapsed_before_ += seconds_since(start);
    save(rc.checkpoint_path);
    elapsed_before_ = before;
  };

  if (step_ == 0 && rc.steps > 0) {
    // Step-0 row: loss of the untrained model on the first window.
    const Index cursor = batcher_->cursor();
    const auto window = batcher_->next();
    batcher_->seek(cursor);
    const SequenceForward<Scalar> fwd =
        forward_sequence(model_, window.batch, state_);
    const double loss =
        softmax_cross_entropy<Scalar>(fwd.logits, window.batch.targets())
            .mean_nll;
    MetricsRow row;
    row.wall_time_s = elapsed_before_ + seconds_since(start);
    row.train_loss = loss;
    row.train_ppl = perplexity(loss);
    interval_start_s_ = seconds_since(start);
    emit(row);
  }

  TrainStepOptions step_options;
  step_options.clip_norm = config_.optimizer.clip_norm;
  step_options.execution.threads = rc.threads;
  while (step_ < rc.steps) {
    const auto window = batcher_->next();
    if (window.reset) {
      state_ = zero_state<Scalar>(model_config_, model_config_.batch_size);
    }
    TrainStepResult result;
    try {
      result = train_step(model_, optimizer_, window.batch, state_, step_options);
    } catch (const NumericError& e) {
      throw NumericError("training aborted at step " + std::to_string(step_ + 1) +
                         ": " + e.what());
    }
    ++step_;
    summary.step_losses.push_back(result.loss);
    interval_loss_sum_ += result.loss;
    ++interval_steps_;
    if (step_ % rc.eval_interval == 0) emit(close_interval(seconds_since(start)));
    if (!rc.checkpoint_path.empty() && rc.checkpoint_interval > 0 &&
        step_ % rc.checkpoint_interval == 0 && step_ < rc.steps) {
      save_now();
    }
  }
  if (!rc.checkpoint_path.empty()) save_now();

  summary.steps = step_;
  summary.best_train_ppl = best_ppl_;
  if (!split_.heldout.empty() && step_ > 0) {
    summary.heldout_ppl =
        heldout_perplexity(model_, vocab_, split_.heldout, config_.data.mode);
  }
  if (log) {
    *log << "done steps=" << summary.steps << " best_train_ppl=";
    if (std::isfinite(summary.best_train_ppl)) {
      *log << summary.best_train_ppl;
    } else {
      *log << "n/a";
    }
    *log << " heldout_ppl=";
    if (summary.heldout_ppl) {
      *log << *summary.heldout_ppl;
    } else {
      *log << "n/a";
    }
    *log << "\n";
  }
  return summary;
}

TrainSummary run_training(const RunConfig& config,
                          const std::filesystem::path& resume_from,
                          std::ostream* log) {
  const auto go = [&](auto trainer) {
    if (!resume_from.empty()) trainer.resume(resume_from);
    return trainer.run(log);
  };
  if (config.model.precision == Precision::kDouble) {
    return go(Trainer<double>(config));
  }
  return go(Trainer<float>(config));
}

template class Trainer<float>;
template class Trainer<double>;
template double heldout_perplexity(const LanguageModel<float>&,
                                   const Vocabulary&,
                                   const std::vector<std::string_view>&,
                                   TokenMode);
template double heldout_perplexity(const LanguageModel<double>&,
                                   const Vocabulary&,
                                   const std::vector<std::string_view>&,
                                   TokenMode);

}  // namespace rnnlab
