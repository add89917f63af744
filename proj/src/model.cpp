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

#include "rnnlab/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace rnnlab {

void ModelConfig::validate() const {
  if (vocab_size < 1) throw ConfigError("vocab_size must be positive");
  if (layers.empty()) throw ConfigError("model needs at least one layer");
  if (unroll_length < 1) throw ConfigError("unroll_length must be >= 1");
  if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
  for (std::size_t l = 0; l < layers.size(); ++l) {
    layers[l].validate();
    if (l > 0 && layers[l].input_dim != layers[l - 1].input_dim) {
      throw ConfigError("layer " + std::to_string(l) + " has input_dim " +
                        std::to_string(layers[l].input_dim) +
                        " but layer " + std::to_string(l - 1) +
                        " projects to " +
                        std::to_string(layers[l - 1].input_dim));
    }
  }
}

namespace {

template <typename Scalar>
void fill_uniform(Matrix<Scalar>& m, Rng& rng) {
  for (Index i = 0; i < m.size(); ++i) {
    m.data()[i] = static_cast<Scalar>(rng.uniform(-0.05, 0.05));
  }
}

void check_ids(const TokenGrid& ids, Index vocab) {
  for (Index i = 0; i < ids.size(); ++i) {
    const auto id = ids.data()[i];
    if (id < 0 || id >= vocab) {
      throw IndexError("token id " + std::to_string(id) +
                       " outside vocabulary [0, " + std::to_string(vocab) +
                       ")");
    }
  }
}

template <typename Model>
auto collect_model_tensors(Model& model) {
  auto out = std::vector{make_view("embedding", model.embedding)};
  for (std::size_t l = 0; l < model.layers.size(); ++l) {
    auto layer = model.layers[l].tensors("layers." + std::to_string(l) + ".");
    out.insert(out.end(), layer.begin(), layer.end());
  }
  out.push_back(make_view("softmax.W", model.softmax_weights));
  out.push_back(make_view("softmax.b", model.softmax_bias));
  return out;
}

}  // namespace

template <typename Scalar>
LanguageModel<Scalar> LanguageModel<Scalar>::init(const ModelConfig& config,
                                                  std::uint64_t seed) {
  config.validate();
  Rng rng(seed);
  LanguageModel model;
  model.config = config;
  model.embedding.resize(config.vocab_size, config.embed_dim());
  fill_uniform(model.embedding, rng);
  for (const auto& layer : config.layers) {
    model.layers.push_back(init_params<Scalar>(layer, rng));
  }
  model.softmax_weights.resize(config.vocab_size, config.output_dim());
  fill_uniform(model.softmax_weights, rng);
  model.softmax_bias = Vector<Scalar>::Zero(config.vocab_size);
  return model;
}

template <typename Scalar>
LanguageModel<Scalar> LanguageModel<Scalar>::zeros_like() const {
  LanguageModel out;
  out.config = config;
  out.embedding = Matrix<Scalar>::Zero(embedding.rows(), embedding.cols());
  for (const auto& layer : layers) out.layers.push_back(layer.zeros_like());
  out.softmax_weights =
      Matrix<Scalar>::Zero(softmax_weights.rows(), softmax_weights.cols());
  out.softmax_bias = Vector<Scalar>::Zero(softmax_bias.size());
  return out;
}

template <typename Scalar>
TensorList<Scalar> LanguageModel<Scalar>::tensors() {
  return collect_model_tensors(*this);
}

template <typename Scalar>
TensorList<const Scalar> LanguageModel<Scalar>::tensors() const {
  return collect_model_tensors(*this);
}

template <typename Scalar>
std::int64_t LanguageModel<Scalar>::rnn_param_count() const {
  std::int64_t total = 0;
  for (const auto& layer : layers) total += layer.scalar_count();
  return total;
}

template <typename Scalar>
ModelState<Scalar> zero_state(const ModelConfig& config, Index batch) {
  ModelState<Scalar> state;
  for (const auto& layer : config.layers) {
    state.push_back(
        LSTMState<Scalar>::zeros(layer.input_dim, layer.cell_dim, batch));
  }
  return state;
}

template <typename Scalar>
std::vector<Matrix<Scalar>> embed_lookup(const LanguageModel<Scalar>& model,
                                         const TokenGrid& ids) {
  check_ids(ids, model.embedding.rows());
  const Index p = model.embedding.cols();
  std::vector<Matrix<Scalar>> out;
  out.reserve(ids.cols());
  for (Index t = 0; t < ids.cols(); ++t) {
    Matrix<Scalar> x(p, ids.rows());
    for (Index b = 0; b < ids.rows(); ++b) {
      x.col(b) = model.embedding.row(ids(b, t)).transpose();
    }
    out.push_back(std::move(x));
  }
  return out;
}

template <typename Scalar>
SequenceForward<Scalar> forward_sequence(const LanguageModel<Scalar>& model,
                                         const BatchSequence& batch,
                                         const ModelState<Scalar>& initial,
                                         const ExecutionOptions& options) {
  if (batch.tokens.cols() < 2 || batch.tokens.rows() < 1) {
    throw ConfigError("forward_sequence: batch must be B x (T+1) with T >= 1, "
                      "got " + shape_string(batch.tokens));
  }
  if (initial.size() != model.layers.size()) {
    throw ConfigError("forward_sequence: initial state has " +
                      std::to_string(initial.size()) + " layers, model has " +
                      std::to_string(model.layers.size()));
  }
  const Index steps = batch.steps();
  const Index vocab = model.softmax_weights.rows();
  const Index top_dim = model.softmax_weights.cols();
  const Index width = batch.batch();
  check_ids(batch.tokens, vocab);
  const std::vector<Matrix<Scalar>> inputs =
      embed_lookup(model, batch.inputs());

  SequenceForward<Scalar> out;
  out.final_state = initial;
  out.logits.reserve(steps);
  out.top_outputs.reserve(steps);
  out.caches.resize(steps);
  for (Index t = 0; t < steps; ++t) {
    const Matrix<Scalar>* x = &inputs[t];
    for (std::size_t l = 0; l < model.layers.size(); ++l) {
      StepOutput<Scalar> step =
          cell_forward(model.layers[l], *x, out.final_state[l], options);
      out.final_state[l] = std::move(step.state);
      out.caches[t].push_back(std::move(step.cache));
      x = &out.final_state[l].h;
    }
    out.top_outputs.push_back(*x);
    Matrix<Scalar> logits = Matrix<Scalar>::Zero(vocab, width);
    kernels::gemm_nn(vocab, width, top_dim, model.softmax_weights.data(),
                     top_dim, x->data(), width, logits.data(), width);
    logits.colwise() += model.softmax_bias;
    out.logits.push_back(std::move(logits));
  }
  return out;
}

template <typename Scalar>
SequenceForward<Scalar> forward_sequence(const LanguageModel<Scalar>& model,
                                         const BatchSequence& batch) {
  return forward_sequence(model, batch,
                          zero_state<Scalar>(model.config, batch.batch()));
}

template <typename Scalar>
LossResult<Scalar> softmax_cross_entropy(
    std::span<const Matrix<Scalar>> logits, const TokenGrid& targets) {
  const Index steps = static_cast<Index>(logits.size());
  if (steps == 0 || targets.cols() != steps) {
    throw ShapeError("softmax_cross_entropy: " + std::to_string(steps) +
                     " logit steps but targets are " + shape_string(targets));
  }
  const Index vocab = logits[0].rows();
  const Index width = logits[0].cols();
  if (targets.rows() != width) {
    throw ShapeError("softmax_cross_entropy: logits have batch " +
                     std::to_string(width) + ", targets " +
                     shape_string(targets));
  }
  check_ids(targets, vocab);
  const double positions = static_cast<double>(steps * width);
  LossResult<Scalar> out;
  out.grad_logits.reserve(steps);
  double total = 0.0;
  for (Index t = 0; t < steps; ++t) {
    const Matrix<Scalar>& z = logits[t];
    if (z.rows() != vocab || z.cols() != width) {
      throw ShapeError("softmax_cross_entropy: logits at step " +
                       std::to_string(t) + " are " + shape_string(z));
    }
    if (!z.allFinite()) {
      throw NumericError("softmax_cross_entropy: non-finite logits at step " +
                         std::to_string(t));
    }
    Matrix<Scalar> grad(vocab, width);
    for (Index b = 0; b < width; ++b) {
      double peak = -std::numeric_limits<double>::infinity();
      for (Index v = 0; v < vocab; ++v) {
        peak = std::max(peak, static_cast<double>(z(v, b)));
      }
      double norm = 0.0;
      for (Index v = 0; v < vocab; ++v) {
        norm += std::exp(static_cast<double>(z(v, b)) - peak);
      }
      const double log_norm = peak + std::log(norm);
      const Index target = targets(b, t);
      total += log_norm - static_cast<double>(z(target, b));
      for (Index v = 0; v < vocab; ++v) {
        const double prob = std::exp(static_cast<double>(z(v, b)) - log_norm);
        const double onehot = v == target ? 1.0 : 0.0;
        grad(v, b) = static_cast<Scalar>((prob - onehot) / positions);
      }
    }
    out.grad_logits.push_back(std::move(grad));
  }
  out.mean_nll = total / positions;
  return out;
}

template <typename Scalar>
LanguageModel<Scalar> bptt_backward(const LanguageModel<Scalar>& model,
                                    const BatchSequence& batch,
                                    const SequenceForward<Scalar>& forward,
                                    std::span<const Matrix<Scalar>> grad_logits,
                                    const ExecutionOptions& options) {
  const Index steps = batch.steps();
  const Index width = batch.batch();
  const std::size_t depth = model.layers.size();
  if (static_cast<Index>(forward.caches.size()) != steps ||
      static_cast<Index>(grad_logits.size()) != steps ||
      static_cast<Index>(forward.top_outputs.size()) != steps) {
    throw UsageError("bptt_backward: forward caches / gradients cover a "
                     "different number of steps than the batch");
  }
  for (const auto& per_step : forward.caches) {
    if (per_step.size() != depth) {
      throw UsageError("bptt_backward: caches do not match the model depth");
    }
  }
  const Index vocab = model.softmax_weights.rows();
  const Index top_dim = model.softmax_weights.cols();

  LanguageModel<Scalar> grads = model.zeros_like();
  std::vector<Matrix<Scalar>> dh_next;
  std::vector<Matrix<Scalar>> dc_next;
  for (const auto& layer : model.config.layers) {
    dh_next.push_back(Matrix<Scalar>::Zero(layer.input_dim, width));
    dc_next.push_back(Matrix<Scalar>::Zero(layer.cell_dim, width));
  }

  for (Index t = steps - 1; t >= 0; --t) {
    const Matrix<Scalar>& dlogits = grad_logits[t];
    if (dlogits.rows() != vocab || dlogits.cols() != width) {
      throw ShapeError("bptt_backward: grad_logits at step " +
                       std::to_string(t) + " is " + shape_string(dlogits));
    }
    const Matrix<Scalar>& top = forward.top_outputs[t];
    kernels::gemm_nt(vocab, top_dim, width, dlogits.data(), width, top.data(),
                     width, grads.softmax_weights.data(), top_dim);
    for (Index v = 0; v < vocab; ++v) {
      Scalar acc = grads.softmax_bias(v);
      for (Index b = 0; b < width; ++b) acc += dlogits(v, b);
      grads.softmax_bias(v) = acc;
    }
    Matrix<Scalar> upstream = Matrix<Scalar>::Zero(top_dim, width);
    kernels::gemm_tn(top_dim, width, vocab, model.softmax_weights.data(),
                     top_dim, dlogits.data(), width, upstream.data(), width);

    for (std::size_t l = depth; l-- > 0;) {
      Matrix<Scalar> dh = upstream + dh_next[l];
      StepGradients<Scalar> step = cell_backward_accumulate(
          model.layers[l], forward.caches[t][l], dh, dc_next[l],
          grads.layers[l], options);
      dh_next[l] = std::move(step.grad_prev.h);
      dc_next[l] = std::move(step.grad_prev.c);
      upstream = std::move(step.grad_x);
    }

    for (Index b = 0; b < width; ++b) {
      const auto id = batch.tokens(b, t);
      grads.embedding.row(id) += upstream.col(b).transpose();
    }
  }
  return grads;
}

double gradient_relative_error(double analytic, double numeric) {
  const double scale =
      std::max({std::abs(analytic), std::abs(numeric), kGradientErrorFloor});
  return std::abs(analytic - numeric) / scale;
}

GradientCheckReport gradient_check(const ModelConfig& config,
                                   std::uint64_t seed, double eps) {
  config.validate();
  LanguageModel<double> model = LanguageModel<double>::init(config, seed);
  Rng rng(seed ^ 0x9e3779b97f4a7c15ULL);
  // Redraw everything (biases included) on a wider range than training
  // init so gates leave their linear regime and partials are well above
  // finite-difference roundoff.
  for (auto& t : model.tensors()) {
    for (double& v : t.values()) v = rng.uniform(-0.5, 0.5);
  }
  BatchSequence batch;
  batch.tokens.resize(config.batch_size, config.unroll_length + 1);
  for (Index i = 0; i < batch.tokens.size(); ++i) {
    batch.tokens.data()[i] = static_cast<std::int32_t>(
        rng.below(static_cast<std::uint64_t>(config.vocab_size)));
  }
  const TokenGrid targets = batch.targets();

  auto loss = [&]() {
    SequenceForward<double> fwd = forward_sequence(model, batch);
    return softmax_cross_entropy<double>(fwd.logits, targets).mean_nll;
  };

  SequenceForward<double> fwd = forward_sequence(model, batch);
  LossResult<double> result =
      softmax_cross_entropy<double>(fwd.logits, targets);
  const LanguageModel<double> grads =
      bptt_backward<double>(model, batch, fwd, result.grad_logits);

  GradientCheckReport report;
  report.max_relative_error = -1.0;
  auto params = model.tensors();
  const auto analytic = grads.tensors();
  for (std::size_t ti = 0; ti < params.size(); ++ti) {
    for (Index i = 0; i < params[ti].size(); ++i) {
      double& theta = params[ti].data[i];
      const double saved = theta;
      theta = saved + eps;
      const double up = loss();
      theta = saved - eps;
      const double down = loss();
      theta = saved;
      const double numeric = (up - down) / (2.0 * eps);
      const double a = analytic[ti].data[i];
      const double err = gradient_relative_error(a, numeric);
      ++report.coordinates;
      if (err > report.max_relative_error) {
        report.max_relative_error = err;
        report.tensor = params[ti].name;
        report.index = i;
        report.analytic = a;
        report.numeric = numeric;
      }
    }
  }
  return report;
}

#define RNNLAB_INSTANTIATE_MODEL(Scalar)                                      \
  template struct LanguageModel<Scalar>;                                      \
  template ModelState<Scalar> zero_state<Scalar>(const ModelConfig&, Index);  \
  template std::vector<Matrix<Scalar>> embed_lookup(                          \
      const LanguageModel<Scalar>&, const TokenGrid&);                        \
  template SequenceForward<Scalar> forward_sequence(                          \
      const LanguageModel<Scalar>&, const BatchSequence&,                     \
      const ModelState<Scalar>&, const ExecutionOptions&);                    \
  template SequenceForward<Scalar> forward_sequence(                          \
      const LanguageModel<Scalar>&, const BatchSequence&);                    \
  template LossResult<Scalar> softmax_cross_entropy(                          \
      std::span<const Matrix<Scalar>>, const TokenGrid&);                     \
  template LanguageModel<Scalar> bptt_backward(                               \
      const LanguageModel<Scalar>&, const BatchSequence&,                     \
      const SequenceForward<Scalar>&, std::span<const Matrix<Scalar>>,        \
      const ExecutionOptions&);

RNNLAB_INSTANTIATE_MODEL(float)
RNNLAB_INSTANTIATE_MODEL(double)

#undef RNNLAB_INSTANTIATE_MODEL

std::vector<GradientSuite> gradient_suites() {
  const auto model = [](std::vector<CellConfig> layers) {
    return ModelConfig{/*vocab_size=*/5, std::move(layers), /*unroll_length=*/3,
                       /*batch_size=*/2};
  };
  return {
      {"dense", model({CellConfig::dense(2, 3)})},
      {"factorized", model({CellConfig::factorized(4, 8, 2)})},
      {"grouped", model({CellConfig::grouped(4, 8, 2)})},
      {"hierarchy G2-G4",
       model({CellConfig::grouped(4, 8, 2), CellConfig::grouped(4, 8, 4)})},
  };
}

}  // namespace rnnlab
