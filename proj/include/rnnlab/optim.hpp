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

#ifndef RNNLAB_OPTIM_HPP_
#define RNNLAB_OPTIM_HPP_

#include "rnnlab/model.hpp"
#include "rnnlab/tensor.hpp"

namespace rnnlab {

struct AdagradOptions {
  double learning_rate = 0.2;
  double initial_accumulator = 0.1;
  double epsilon = 1e-10;
};

// Per-coordinate squared-gradient sums, shaped exactly like the model.
template <typename Scalar>
struct AdagradState {
  AdagradOptions options;
  LanguageModel<Scalar> accumulators;

  static AdagradState init(const LanguageModel<Scalar>& params,
                           const AdagradOptions& options);
};

// acc += g^2; theta -= lr * g / (sqrt(acc) + eps), elementwise over
// matching tensor lists. Every gradient is checked before anything is
// written: a non-finite gradient throws NumericError and leaves params and
// accumulators untouched.
template <typename Scalar>
void adagrad_update(const TensorList<Scalar>& params,
                    const TensorList<const Scalar>& grads,
                    const TensorList<Scalar>& accumulators,
                    const AdagradOptions& options);

template <typename Scalar>
void adagrad_step(LanguageModel<Scalar>& params,
                  const LanguageModel<Scalar>& grads,
                  AdagradState<Scalar>& state);

// Global L2 norm over every tensor in the list, accumulated in double.
template <typename Scalar>
double global_norm(const TensorList<const Scalar>& grads);

// If the joint norm exceeds max_norm, scales every gradient by
// max_norm / norm. The scale is nudged down until the stored (rounded)
// result has norm <= max_norm, which makes clipping idempotent. Returns the
// norm before clipping.
template <typename Scalar>
double clip_global_norm(const TensorList<Scalar>& grads, double max_norm);

template <typename Scalar>
double clip_global_norm(LanguageModel<Scalar>& grads, double max_norm) {
  return clip_global_norm(grads.tensors(), max_norm);
}

}  // namespace rnnlab

#endif  // RNNLAB_OPTIM_HPP_
