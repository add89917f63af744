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


// Helpers shared by the unit tests: seeded random arrays, bitwise
// comparison, and the naive triple-loop product used as an oracle.

#ifndef RNNLAB_TESTS_TEST_SUPPORT_HPP_
#define RNNLAB_TESTS_TEST_SUPPORT_HPP_

#include <algorithm>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>

#include <gtest/gtest.h>

#include "rnnlab/numerics.hpp"
#include "rnnlab/rng.hpp"
#include "rnnlab/tensor.hpp"

namespace rnnlab::testing {

template <typename Scalar = double>
Matrix<Scalar> random_matrix(Index rows, Index cols, Rng& rng,
                             double lo = -1.0, double hi = 1.0) {
  Matrix<Scalar> m(rows, cols);
  for (Index i = 0; i < m.size(); ++i) {
    m.data()[i] = static_cast<Scalar>(rng.uniform(lo, hi));
  }
  return m;
}

template <typename Scalar = double>
Vector<Scalar> random_vector(Index n, Rng& rng, double lo = -1.0,
                             double hi = 1.0) {
  Vector<Scalar> v(n);
  for (Index i = 0; i < n; ++i) v[i] = static_cast<Scalar>(rng.uniform(lo, hi));
  return v;
}

// Same shape and the same bytes.
template <typename A, typename B>
bool bitwise_equal(const Eigen::DenseBase<A>& a, const Eigen::DenseBase<B>& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
  const auto ea = a.derived().eval();
  const auto eb = b.derived().eval();
  for (Index i = 0; i < ea.rows(); ++i) {
    for (Index j = 0; j < ea.cols(); ++j) {
      const auto x = ea(i, j);
      const auto y = eb(i, j);
      if (std::memcmp(&x, &y, sizeof(x)) != 0) return false;
    }
  }
  return true;
}

template <typename Scalar>
bool bitwise_equal(const TensorList<const Scalar>& a,
                   const TensorList<const Scalar>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].name != b[i].name || a[i].rows != b[i].rows ||
        a[i].cols != b[i].cols) {
      return false;
    }
    if (std::memcmp(a[i].data, b[i].data, a[i].size() * sizeof(Scalar)) != 0) {
      return false;
    }
  }
  return true;
}

// C[i][j] = sum over t of A[i][t] * B[t][j], t ascending, starting from 0.
template <typename Scalar>
Matrix<Scalar> triple_loop(const Matrix<Scalar>& a, const Matrix<Scalar>& b) {
  Matrix<Scalar> c(a.rows(), b.cols());
  for (Index i = 0; i < a.rows(); ++i) {
    for (Index j = 0; j < b.cols(); ++j) {
      Scalar s = 0;
      for (Index t = 0; t < a.cols(); ++t) s += a(i, t) * b(t, j);
      c(i, j) = s;
    }
  }
  return c;
}

template <typename A, typename B>
double max_relative_difference(const Eigen::MatrixBase<A>& a,
                               const Eigen::MatrixBase<B>& b) {
  double worst = 0.0;
  for (Index i = 0; i < a.rows(); ++i) {
    for (Index j = 0; j < a.cols(); ++j) {
      const double x = static_cast<double>(a(i, j));
      const double y = static_cast<double>(b(i, j));
      const double scale = std::max({std::abs(x), std::abs(y), 1e-300});
      worst = std::max(worst, std::abs(x - y) / scale);
    }
  }
  return worst;
}

// Per-test scratch directory under the system temp dir, removed on exit.
class TempDir {
 public:
  TempDir() {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    path_ = std::filesystem::temp_directory_path() /
            ("rnnlab_" + std::string(info->test_suite_name()) + "_" +
             info->name());
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const {
    return path_ / name;
  }

 private:
  std::filesystem::path path_;
};

inline void write_text(const std::filesystem::path& path,
                       const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
}

}  // namespace rnnlab::testing

#endif  // RNNLAB_TESTS_TEST_SUPPORT_HPP_
