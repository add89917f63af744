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

// Word/character language model: embedding lookup, a stack of projected LSTM
// layers (each with its own variant, so group counts may differ per layer)
// and a full softmax over the vocabulary.
//
// Sequences are handled as one matrix per time step with the batch along
// the columns: embeddings and layer outputs are p x B, logits are V x B.

#ifndef RNNLAB_MODEL_HPP_
#define RNNLAB_MODEL_HPP_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "rnnlab/cells.hpp"

namespace rnnlab {

struct ModelConfig {
  Index vocab_size = 0;
  std::vector<CellConfig> layers;
  Index unroll_length = 1;
  Index batch_size = 1;

  Index embed_dim() const { return layers.front().input_dim; }
  Index output_dim() const { return layers.back().input_dim; }

  // Every layer valid; layer l+1 consumes the p of layer l; T, B, V >= 1.
  void validate() const;

  bool operator==(const ModelConfig&) const = default;
};

using TokenGrid =
    Eigen::Matrix<std::int32_t, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// B x (T + 1) token ids. Column t is the input at step t, column t + 1 its
// target.
struct BatchSequence {
  TokenGrid tokens;

  Index batch() const { return tokens.rows(); }
  Index steps() const { return tokens.cols() - 1; }
  TokenGrid inputs() const { return tokens.leftCols(steps()); }
  TokenGrid targets() const { return tokens.rightCols(steps()); }
};

template <typename Scalar>
struct LanguageModel {
  ModelConfig config;
  Matrix<Scalar> embedding;  // V x p
  std::vector<CellParams<Scalar>> layers;
  Matrix<Scalar> softmax_weights;  // V x p_top
  Vector<Scalar> softmax_bias;     // V

  // Weights uniform on [-0.05, 0.05] drawn in tensor order from one seeded
  // stream; biases zero.
  static LanguageModel init(const ModelConfig& config, std::uint64_t seed);

  LanguageModel zeros_like() const;

  // embedding, layers.<l>.<cell tensors>, softmax.W, softmax.b
  TensorList<Scalar> tensors();
  TensorList<const Scalar> tensors() const;

  std::int64_t rnn_param_count() const;
};

// Recurrent state of every layer.
template <typename Scalar>
using ModelState = std::vector<LSTMState<Scalar>>;

template <typename Scalar>
ModelState<Scalar> zero_state(const ModelConfig& config, Index batch);

/// One p x B matrix per column of `ids` (ids is B x T).
template <typename Scalar>
std::vector<Matrix<Scalar>> embed_lookup(const LanguageModel<Scalar>& model,
                                         const TokenGrid& ids);

template <typename Scalar>
struct SequenceForward {
  std::vector<Matrix<Scalar>> logits;                  // [t]: V x B
  std::vector<Matrix<Scalar>> top_outputs;             // [t]: p_top x B
  std::vector<std::vector<StepCache<Scalar>>> caches;  // [t][layer]
  ModelState<Scalar> final_state;
};

template <typename Scalar>
SequenceForward<Scalar> forward_sequence(const LanguageModel<Scalar>& model,
                                         const BatchSequence& batch,
                                         const ModelState<Scalar>& initial,
                                         const ExecutionOptions& options = {});

/// Starts from the zero state.
template <typename Scalar>
SequenceForward<Scalar> forward_sequence(const LanguageModel<Scalar>& model,
                                         const BatchSequence& batch);

template <typename Scalar>
struct LossResult {
  double mean_nll = 0.0;
  std::vector<Matrix<Scalar>> grad_logits;  // [t]: V x B
};

/// Mean negative log-likelihood (natural log) over all B x T positions and
/// its gradient (softmax - onehot) / (B T). targets is B x T.
template <typename Scalar>
LossResult<Scalar> softmax_cross_entropy(
    std::span<const Matrix<Scalar>> logits, const TokenGrid& targets);

inline double perplexity(double mean_nll) { return std::exp(mean_nll); }

/// Reverse pass through forward_sequence. Gradients are not propagated into
/// the initial state (truncated BPTT).
template <typename Scalar>
LanguageModel<Scalar> bptt_backward(const LanguageModel<Scalar>& model,
                                    const BatchSequence& batch,
                                    const SequenceForward<Scalar>& forward,
                                    std::span<const Matrix<Scalar>> grad_logits,
                                    const ExecutionOptions& options = {});

struct GradientCheckReport {
  double max_relative_error = 0.0;
  std::string tensor;  // offending coordinate
  Index index = 0;
  double analytic = 0.0;
  double numeric = 0.0;
  std::int64_t coordinates = 0;  // number of partials compared
};

/// |a - n| / max(|a|, |n|, floor). The floor keeps partials that are zero
/// up to finite-difference roundoff from dominating the maximum.
double gradient_relative_error(double analytic, double numeric);

inline constexpr double kGradientErrorFloor = 1e-4;

/// Builds a double-precision model from `config` and a random batch from
/// `seed`, then compares every analytic partial of the mean loss against a
/// central difference with step `eps`. Reports; never throws on a large
/// error.
GradientCheckReport gradient_check(const ModelConfig& config,
                                   std::uint64_t seed, double eps = 1e-6);

inline constexpr double kGradientTolerance = 1e-5;

struct GradientSuite {
  std::string label;
  ModelConfig config;
};

/// Tiny-dimension configs covering each cell variant and a two-layer
/// grouped hierarchy (k=2 below k=4).
std::vector<GradientSuite> gradient_suites();

}  // namespace rnnlab

#endif  // RNNLAB_MODEL_HPP_
