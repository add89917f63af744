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

#include "rnnlab/optim.hpp"

#include <cmath>
#include <limits>

namespace rnnlab {

namespace {

template <typename A, typename B>
void require_same_layout(const char* who, const TensorList<A>& a,
                         const TensorList<B>& b) {
  if (a.size() != b.size()) {
    throw UsageError(std::string(who) + ": " + std::to_string(a.size()) +
                     " tensors vs " + std::to_string(b.size()));
  }
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].rows != b[i].rows || a[i].cols != b[i].cols) {
      throw UsageError(std::string(who) + ": tensor " + a[i].name + " is " +
                       shape_string(a[i].rows, a[i].cols) + " but " +
                       b[i].name + " is " + shape_string(b[i].rows, b[i].cols));
    }
  }
}

template <typename Scalar>
TensorList<const Scalar> as_const(const TensorList<Scalar>& list) {
  TensorList<const Scalar> out;
  out.reserve(list.size());
  for (const auto& t : list) out.push_back({t.name, t.rows, t.cols, t.data});
  return out;
}

// Norm of the values the gradients would hold after scaling by `scale`.
template <typename Scalar>
double scaled_norm(const TensorList<Scalar>& grads, double scale) {
  double sum = 0.0;
  for (const auto& t : grads) {
    for (const Scalar g : t.values()) {
      const double v = static_cast<double>(static_cast<Scalar>(g * scale));
      sum += v * v;
    }
  }
  return std::sqrt(sum);
}

}  // namespace

template <typename Scalar>
AdagradState<Scalar> AdagradState<Scalar>::init(
    const LanguageModel<Scalar>& params, const AdagradOptions& options) {
  if (!(options.learning_rate > 0.0) || options.initial_accumulator < 0.0 ||
      !(options.epsilon > 0.0)) {
    throw ConfigError("adagrad: need learning_rate > 0, epsilon > 0 and "
                      "initial_accumulator >= 0");
  }
  AdagradState state;
  state.options = options;
  state.accumulators = params.zeros_like();
  for (auto& t : state.accumulators.tensors()) {
    for (Scalar& v : t.values()) {
      v = static_cast<Scalar>(options.initial_accumulator);
    }
  }
  return state;
}

template <typename Scalar>
void adagrad_update(const TensorList<Scalar>& params,
                    const TensorList<const Scalar>& grads,
                    const TensorList<Scalar>& accumulators,
                    const AdagradOptions& options) {
  require_same_layout("adagrad_step", params, grads);
  require_same_layout("adagrad_step", params, accumulators);
  for (const auto& g : grads) {
    for (const Scalar v : g.values()) {
      if (!std::isfinite(v)) {
        throw NumericError("adagrad_step: non-finite gradient in " + g.name +
                           "; step refused");
      }
    }
  }
  const Scalar lr = static_cast<Scalar>(options.learning_rate);
  const Scalar eps = static_cast<Scalar>(options.epsilon);
  for (std::size_t t = 0; t < params.size(); ++t) {
    Scalar* theta = params[t].data;
    const Scalar* g = grads[t].data;
    Scalar* acc = accumulators[t].data;
    for (Index i = 0; i < params[t].size(); ++i) {
      acc[i] += g[i] * g[i];
      theta[i] -= lr * g[i] / (std::sqrt(acc[i]) + eps);
    }
  }
}

template <typename Scalar>
void adagrad_step(LanguageModel<Scalar>& params,
                  const LanguageModel<Scalar>& grads,
                  AdagradState<Scalar>& state) {
  adagrad_update(params.tensors(), grads.tensors(),
                 state.accumulators.tensors(), state.options);
}

template <typename Scalar>
double global_norm(const TensorList<const Scalar>& grads) {
  double sum = 0.0;
  for (const auto& t : grads) {
    for (const Scalar g : t.values()) {
      sum += static_cast<double>(g) * static_cast<double>(g);
    }
  }
  return std::sqrt(sum);
}

template <typename Scalar>
double clip_global_norm(const TensorList<Scalar>& grads, double max_norm) {
  if (!(max_norm > 0.0)) {
    throw ConfigError("clip_global_norm: max_norm must be positive");
  }
  const double norm = global_norm(as_const(grads));
  if (!(norm > max_norm)) return norm;
  double scale = max_norm / norm;
  for (int attempt = 0; attempt < 64 && scaled_norm(grads, scale) > max_norm;
       ++attempt) {
    scale *= 1.0 - std::numeric_limits<Scalar>::epsilon();
  }
  for (const auto& t : grads) {
    for (Scalar& g : t.values()) g = static_cast<Scalar>(g * scale);
  }
  return norm;
}

#define RNNLAB_INSTANTIATE_OPTIM(Scalar)                                    \
  template struct AdagradState<Scalar>;                                     \
  template void adagrad_update(const TensorList<Scalar>&,                   \
                               const TensorList<const Scalar>&,             \
                               const TensorList<Scalar>&,                   \
                               const AdagradOptions&);                      \
  template void adagrad_step(LanguageModel<Scalar>&,                        \
                             const LanguageModel<Scalar>&,                  \
                             AdagradState<Scalar>&);                        \
  template double global_norm(const TensorList<const Scalar>&);             \
  template double clip_global_norm(const TensorList<Scalar>&, double);

RNNLAB_INSTANTIATE_OPTIM(float)
RNNLAB_INSTANTIATE_OPTIM(double)

#undef RNNLAB_INSTANTIATE_OPTIM

}  // namespace rnnlab
