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


#include "rnnlab/numerics.hpp"

#include <cmath>
#include <limits>

#include <gtest/gtest.h>

#include "test_support.hpp"

namespace rnnlab {
namespace {

using testing::bitwise_equal;
using testing::random_matrix;
using testing::triple_loop;

TEST(Matmul, IdentityTimesColumn) {
  Matrix<double> eye = Matrix<double>::Identity(2, 2);
  Matrix<double> x(2, 1);
  x << 0.25, -3.5;
  EXPECT_TRUE(bitwise_equal(matmul(eye, x), x));
}

TEST(Matmul, OneByOne) {
  Matrix<double> a(1, 1), b(1, 1);
  a << 2.0;
  b << 3.0;
  EXPECT_EQ(matmul(a, b)(0, 0), 6.0);
}

TEST(Matmul, MatchesTripleLoopOn3x2By2x4) {
  Rng rng(11);
  const Matrix<double> a = random_matrix(3, 2, rng);
  const Matrix<double> b = random_matrix(2, 4, rng);
  EXPECT_TRUE(bitwise_equal(matmul(a, b), triple_loop(a, b)));
}

TEST(Matmul, BitwiseAgainstTripleLoopSmallShapes) {
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    Rng rng(seed);
    const Index m = 1 + static_cast<Index>(rng.below(8));
    const Index k = 1 + static_cast<Index>(rng.below(8));
    const Index n = 1 + static_cast<Index>(rng.below(8));
    const Matrix<double> a = random_matrix(m, k, rng);
    const Matrix<double> b = random_matrix(k, n, rng);
    ASSERT_TRUE(bitwise_equal(matmul(a, b), triple_loop(a, b)))
        << "seed " << seed << " shape " << m << "x" << k << "x" << n;
  }
}

// Shapes that reach the blocked tiles (4 rows by one or two SIMD widths) as
// well as their ragged edges.
TEST(Matmul, BitwiseAgainstTripleLoopBlockedShapes) {
  const Index shapes[][3] = {{4, 16, 8},   {8, 32, 16},  {5, 17, 9},
                             {13, 33, 48}, {64, 40, 70}, {3, 5, 100},
                             {37, 1, 65}};
  std::uint64_t seed = 100;
  for (const auto& s : shapes) {
    Rng rng(seed++);
    const Matrix<double> a = random_matrix(s[0], s[1], rng);
    const Matrix<double> b = random_matrix(s[1], s[2], rng);
    EXPECT_TRUE(bitwise_equal(matmul(a, b), triple_loop(a, b)))
        << s[0] << "x" << s[1] << "x" << s[2];
    const Matrix<float> af = a.cast<float>();
    const Matrix<float> bf = b.cast<float>();
    EXPECT_TRUE(bitwise_equal(matmul(af, bf), triple_loop(af, bf)))
        << "float " << s[0] << "x" << s[1] << "x" << s[2];
  }
}

TEST(Matmul, TransposedVariantsMatchOracle) {
  Rng rng(5);
  for (const Index m : {1, 4, 7, 20}) {
    for (const Index n : {1, 16, 33}) {
      for (const Index k : {1, 3, 12}) {
        const Matrix<double> at = random_matrix(k, m, rng);  // A stored k x m
        const Matrix<double> b = random_matrix(k, n, rng);
        Matrix<double> c = Matrix<double>::Zero(m, n);
        matmul_tn_accumulate<double>(at, b, c);
        const Matrix<double> a = at.transpose();
        EXPECT_TRUE(bitwise_equal(c, triple_loop(a, b)));

        const Matrix<double> bt = random_matrix(n, k, rng);  // B stored n x k
        Matrix<double> d = Matrix<double>::Zero(m, n);
        matmul_nt_accumulate<double>(a, bt, d);
        const Matrix<double> bn = bt.transpose();
        EXPECT_TRUE(bitwise_equal(d, triple_loop(a, bn)));
      }
    }
  }
}

TEST(Matmul, AccumulateAddsToExistingValues) {
  Rng rng(3);
  const Matrix<double> a = random_matrix(5, 6, rng);
  const Matrix<double> b = random_matrix(6, 7, rng);
  const Matrix<double> c0 = random_matrix(5, 7, rng);
  Matrix<double> c = c0;
  matmul_accumulate<double>(a, b, c);
  Matrix<double> expected = c0;
  for (Index i = 0; i < 5; ++i) {
    for (Index j = 0; j < 7; ++j) {
      for (Index t = 0; t < 6; ++t) expected(i, j) += a(i, t) * b(t, j);
    }
  }
  EXPECT_TRUE(bitwise_equal(c, expected));
}

TEST(Matmul, BatchedColumnsEqualPerColumnProducts) {
  Rng rng(8);
  const Matrix<double> a = random_matrix(24, 10, rng);
  const Matrix<double> x = random_matrix(10, 19, rng);
  const Matrix<double> full = matmul(a, x);
  for (Index j = 0; j < x.cols(); ++j) {
    const Matrix<double> col = x.col(j);
    EXPECT_TRUE(bitwise_equal(full.col(j), matmul(a, col))) << "column " << j;
  }
}

TEST(Matmul, AssociativeWithinRounding) {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    Rng rng(seed);
    const Index m = 1 + static_cast<Index>(rng.below(8));
    const Index k = 1 + static_cast<Index>(rng.below(8));
    const Index l = 1 + static_cast<Index>(rng.below(8));
    const Index n = 1 + static_cast<Index>(rng.below(8));
    // Positive entries keep the products away from cancellation, where a
    // relative comparison is meaningless.
    const Matrix<double> a = random_matrix(m, k, rng, 0.0, 1.0);
    const Matrix<double> b = random_matrix(k, l, rng, 0.0, 1.0);
    const Matrix<double> c = random_matrix(l, n, rng, 0.0, 1.0);
    const Matrix<double> left = matmul(matmul(a, b), c);
    const Matrix<double> right = matmul(a, matmul(b, c));
    EXPECT_LE(testing::max_relative_difference(left, right), 1e-12)
        << "seed " << seed;
  }
}

TEST(Matmul, ShapeErrorNamesBothOperands) {
  const Matrix<double> a = Matrix<double>::Zero(2, 3);
  const Matrix<double> b = Matrix<double>::Zero(4, 5);
  try {
    matmul(a, b);
    FAIL() << "expected ShapeError";
  } catch (const ShapeError& e) {
    const std::string what = e.what();
    EXPECT_NE(what.find("2x3"), std::string::npos) << what;
    EXPECT_NE(what.find("4x5"), std::string::npos) << what;
    EXPECT_EQ(e.code(), ExitCode::kConfig);
  }
}

TEST(Affine, ZeroWeightsGiveBias) {
  Rng rng(1);
  const Matrix<double> w = Matrix<double>::Zero(4, 3);
  const Matrix<double> x = random_matrix(3, 1, rng);
  const Vector<double> b = testing::random_vector(4, rng);
  EXPECT_TRUE(bitwise_equal(affine(w, x, b), b));
}

TEST(Affine, IdentityWeightsGiveInput) {
  Rng rng(2);
  const Matrix<double> w = Matrix<double>::Identity(3, 3);
  const Matrix<double> x = random_matrix(3, 2, rng);
  const Vector<double> b = Vector<double>::Zero(3);
  EXPECT_TRUE(bitwise_equal(affine(w, x, b), x));
}

TEST(Affine, MatchesProductThenAdd) {
  Rng rng(4);
  const Matrix<double> w = random_matrix(4, 3, rng);
  const Matrix<double> x = random_matrix(3, 1, rng);
  const Vector<double> b = testing::random_vector(4, rng);
  Matrix<double> expected = triple_loop(w, x);
  for (Index i = 0; i < 4; ++i) expected(i, 0) += b[i];
  EXPECT_TRUE(bitwise_equal(affine(w, x, b), expected));
}

TEST(Affine, RejectsMismatchedBias) {
  const Matrix<double> w = Matrix<double>::Zero(4, 3);
  const Matrix<double> x = Matrix<double>::Zero(3, 1);
  const Vector<double> b = Vector<double>::Zero(5);
  EXPECT_THROW(affine(w, x, b), ShapeError);
}

TEST(Elementwise, ActivationValuesAtZero) {
  EXPECT_EQ(sigmoid(0.0), 0.5);
  EXPECT_EQ(rnnlab::tanh(0.0), 0.0);
}

TEST(Elementwise, SigmoidSaturates) {
  EXPECT_NEAR(sigmoid(40.0), 1.0, 1e-12);
  EXPECT_NEAR(sigmoid(-40.0), 0.0, 1e-12);
}

TEST(Elementwise, ActivationsFiniteForHugeInputs) {
  for (const double z : {700.0, -700.0, 750.0, -750.0, 1e300, -1e300,
                         std::numeric_limits<double>::max(),
                         -std::numeric_limits<double>::max()}) {
    EXPECT_TRUE(std::isfinite(sigmoid(z))) << z;
    EXPECT_TRUE(std::isfinite(rnnlab::tanh(z))) << z;
    EXPECT_GE(sigmoid(z), 0.0);
    EXPECT_LE(sigmoid(z), 1.0);
  }
  for (const float z : {100.0f, -100.0f, 1e30f, -1e30f}) {
    EXPECT_TRUE(std::isfinite(sigmoid(z))) << z;
  }
}

// In double, tanh rounds to +-1 beyond |z| ~ 19.1 and sigmoid to 1 beyond
// z ~ 36.7, so the open bounds are checked inside that range.
TEST(Elementwise, OpenIntervalsForModerateInputs) {
  Rng rng(6);
  for (int i = 0; i < 1000; ++i) {
    const double z = rng.uniform(-18.0, 18.0);
    EXPECT_GT(sigmoid(z), 0.0);
    EXPECT_LT(sigmoid(z), 1.0);
    EXPECT_GT(rnnlab::tanh(z), -1.0);
    EXPECT_LT(rnnlab::tanh(z), 1.0);
  }
}

TEST(Elementwise, UnaryAndBinaryForms) {
  Matrix<double> a(1, 3), b(1, 3);
  a << -1.0, 0.0, 2.0;
  b << 3.0, 5.0, -0.5;
  const Matrix<double> s = elementwise(Elementwise::kSigmoid, a);
  const Matrix<double> t = elementwise(Elementwise::kTanh, a);
  for (Index j = 0; j < 3; ++j) {
    EXPECT_EQ(s(0, j), sigmoid(a(0, j)));
    EXPECT_EQ(t(0, j), std::tanh(a(0, j)));
  }
  const Matrix<double> m = elementwise(Elementwise::kMul, a, b);
  const Matrix<double> p = elementwise(Elementwise::kAdd, a, b);
  EXPECT_EQ(m(0, 0), -3.0);
  EXPECT_EQ(m(0, 2), -1.0);
  EXPECT_EQ(p(0, 1), 5.0);
  EXPECT_EQ(p(0, 2), 1.5);
}

TEST(Elementwise, MismatchedOperandsRejected) {
  const Matrix<double> a = Matrix<double>::Zero(2, 1);
  const Matrix<double> b = Matrix<double>::Zero(3, 1);
  EXPECT_THROW(elementwise(Elementwise::kMul, a, b), ShapeError);
  EXPECT_THROW(elementwise(Elementwise::kMul, a), UsageError);
}

}  // namespace
}  // namespace rnnlab
