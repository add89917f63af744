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

#ifndef RNNLAB_TENSOR_HPP_
#define RNNLAB_TENSOR_HPP_

#include <span>
#include <string>
#include <vector>

#include "rnnlab/numerics.hpp"

namespace rnnlab {

/// Named, non-owning view of one parameter array. Scalar may be const.
/// Parameter containers expose their arrays as a list of these in a fixed
/// canonical order; optimizers, clipping and checkpoints all walk that list.
template <typename Scalar>
struct TensorView {
  std::string name;
  Index rows = 0;
  Index cols = 0;
  Scalar* data = nullptr;

  Index size() const { return rows * cols; }
  std::span<Scalar> values() const {
    return {data, static_cast<std::size_t>(size())};
  }
};

template <typename Scalar>
using TensorList = std::vector<TensorView<Scalar>>;

template <typename Derived>
auto make_view(std::string name, Eigen::PlainObjectBase<Derived>& m) {
  return TensorView<typename Derived::Scalar>{std::move(name), m.rows(),
                                              m.cols(), m.data()};
}

template <typename Derived>
auto make_view(std::string name, const Eigen::PlainObjectBase<Derived>& m) {
  return TensorView<const typename Derived::Scalar>{std::move(name), m.rows(),
                                                    m.cols(), m.data()};
}

}  // namespace rnnlab

#endif  // RNNLAB_TENSOR_HPP_
