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

#include "rnnlab/training.hpp"

#include <cmath>
#include <utility>

namespace rnnlab {

template <typename Scalar>
TrainStepResult train_step(LanguageModel<Scalar>& model,
                           AdagradState<Scalar>& optimizer,
                           const BatchSequence& batch,
                           ModelState<Scalar>& state,
                           const TrainStepOptions& options) {
  SequenceForward<Scalar> fwd =
      forward_sequence(model, batch, state, options.execution);
  LossResult<Scalar> loss =
      softmax_cross_entropy<Scalar>(fwd.logits, batch.targets());
  if (!std::isfinite(loss.mean_nll)) {
    throw NumericError("train_step: non-finite loss");
  }
  // Sum over time, mean over batch; see the header.
  const Scalar scale = static_cast<Scalar>(batch.steps());
  for (Matrix<Scalar>& g : loss.grad_logits) g *= scale;
  LanguageModel<Scalar> grads = bptt_backward<Scalar>(
      model, batch, fwd, loss.grad_logits, options.execution);
  TrainStepResult result;
  result.loss = loss.mean_nll;
  if (options.clip_norm > 0.0) {
    result.grad_norm = clip_global_norm(grads, options.clip_norm);
  } else {
    result.grad_norm = global_norm(std::as_const(grads).tensors());
  }
  adagrad_step(model, grads, optimizer);
  state = std::move(fwd.final_state);
  return result;
}

template TrainStepResult train_step(LanguageModel<float>&,
                                    AdagradState<float>&,
                                    const BatchSequence&, ModelState<float>&,
                                    const TrainStepOptions&);
template TrainStepResult train_step(LanguageModel<double>&,
                                    AdagradState<double>&,
                                    const BatchSequence&, ModelState<double>&,
                                    const TrainStepOptions&);

}  // namespace rnnlab
