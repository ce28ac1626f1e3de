// Copyright (c) 2026 The nedict Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include "gtest/gtest.h"

#include "nedict/numerics/autodiff.h"
#include "nedict/numerics/checkpoint.h"
#include "nedict/numerics/gradcheck.h"
#include "nedict/numerics/layers.h"
#include "nedict/numerics/optimizer.h"

namespace nedict::numerics {
namespace {

Matrix RandomMatrix(int rows, int cols, Rng& rng, double scale = 1.0) {
  return NormalInit(rows, cols, scale, rng);
}

// Straight per-head triple loop used as the attention oracle.
Matrix NaiveAttention(const Matrix& q, const Matrix& k, const Matrix& v,
                      const Mask* mask, int heads) {
  const int d = static_cast<int>(q.cols());
  const int dk = d / heads;
  Matrix out = Matrix::Zero(q.rows(), d);
  for (int h = 0; h < heads; ++h) {
    for (int i = 0; i < q.rows(); ++i) {
      std::vector<double> w(k.rows(), 0.0);
      double mx = -1e300;
      for (int j = 0; j < k.rows(); ++j) {
        if (mask && !(*mask)(i, j)) continue;
        double s = 0.0;
        for (int c = 0; c < dk; ++c) s += q(i, h * dk + c) * k(j, h * dk + c);
        w[j] = s / std::sqrt(static_cast<double>(dk));
        mx = std::max(mx, w[j]);
      }
      double z = 0.0;
      for (int j = 0; j < k.rows(); ++j) {
        if (mask && !(*mask)(i, j)) {
          w[j] = 0.0;
          continue;
        }
        w[j] = std::exp(w[j] - mx);
        z += w[j];
      }
      for (int j = 0; j < k.rows(); ++j) {
        for (int c = 0; c < dk; ++c) {
          out(i, h * dk + c) += w[j] / z * v(j, h * dk + c);
        }
      }
    }
  }
  return out;
}

TEST(TensorTest, ShapeMustMatchData) {
  EXPECT_THROW(Tensor::FromShape({2, 3}, std::vector<double>(5)),
               std::invalid_argument);
  Tensor t = Tensor::FromShape({4}, {1, 2, 3, 4});
  EXPECT_EQ(t.shape(), (std::vector<int>{1, 4}));
  EXPECT_DOUBLE_EQ(t(0, 2), 3.0);
}

TEST(TensorTest, CosineRejectsZeroVector) {
  RowVector a = RowVector::Zero(3);
  RowVector b = RowVector::Ones(3);
  EXPECT_THROW(Cosine(a, b), std::invalid_argument);
  EXPECT_NEAR(Cosine(b, b), 1.0, 1e-15);
}

TEST(AttentionTest, SingleKeyReturnsValueRow) {
  Rng rng(1);
  Var q(RandomMatrix(3, 8, rng));
  Var k(RandomMatrix(1, 8, rng));
  Var v(RandomMatrix(1, 8, rng));
  Var out = ops::MultiHeadAttention(q, k, v, nullptr, 2);
  for (int r = 0; r < 3; ++r) {
    EXPECT_TRUE(out.value().row(r).isApprox(v.value().row(0), 1e-14));
  }
}

TEST(AttentionTest, IdenticalKeysAverageValues) {
  Rng rng(2);
  Var q(RandomMatrix(2, 4, rng));
  Matrix kk(2, 4);
  kk.row(0) = RandomMatrix(1, 4, rng);
  kk.row(1) = kk.row(0);
  Var k(kk);
  Var v(RandomMatrix(2, 4, rng));
  Var out = ops::MultiHeadAttention(q, k, v, nullptr, 1);
  Matrix expected = (v.value().row(0) + v.value().row(1)) / 2.0;
  for (int r = 0; r < 2; ++r) {
    EXPECT_TRUE(out.value().row(r).isApprox(expected, 1e-14));
  }
}

TEST(AttentionTest, MatchesNaiveLoopOracle) {
  Rng rng(3);
  for (int trial = 0; trial < 5; ++trial) {
    Matrix q = RandomMatrix(4, 8, rng);
    Matrix k = RandomMatrix(4, 8, rng);
    Matrix v = RandomMatrix(4, 8, rng);
    Mask mask = Mask::Constant(4, 4, true);
    if (trial % 2 == 1) {
      mask(0, 1) = mask(2, 3) = mask(3, 0) = false;
    }
    Var out = ops::MultiHeadAttention(Var(q), Var(k), Var(v), &mask, 2);
    Matrix oracle = NaiveAttention(q, k, v, &mask, 2);
    EXPECT_LT((out.value() - oracle).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(AttentionTest, MaskedKeysGetExactlyZeroWeight) {
  Rng rng(4);
  Mask mask = Mask::Constant(3, 5, true);
  mask(0, 4) = mask(1, 0) = mask(1, 1) = false;
  Var scores(RandomMatrix(3, 5, rng, 3.0));
  Var w = ops::MaskedSoftmax(scores, &mask);
  EXPECT_EQ(w.value()(0, 4), 0.0);
  EXPECT_EQ(w.value()(1, 0), 0.0);
  EXPECT_EQ(w.value()(1, 1), 0.0);
  for (int r = 0; r < 3; ++r) EXPECT_NEAR(w.value().row(r).sum(), 1.0, 1e-9);
}

TEST(AttentionTest, FullyMaskedRowIsAnError) {
  Mask mask = Mask::Constant(2, 3, true);
  mask.row(1).setConstant(false);
  Var scores(Matrix::Zero(2, 3));
  EXPECT_THROW(ops::MaskedSoftmax(scores, &mask), std::invalid_argument);
}

TEST(AttentionTest, ShapeMismatchIsAnError) {
  Var q(Matrix::Zero(2, 6));
  Var k(Matrix::Zero(3, 6));
  Var v(Matrix::Zero(2, 6));
  EXPECT_THROW(ops::MultiHeadAttention(q, k, v, nullptr, 2),
               std::invalid_argument);
  EXPECT_THROW(ops::MultiHeadAttention(q, k, k, nullptr, 4),
               std::invalid_argument);
}

TEST(EncoderLayerTest, ZeroOutputProjectionsGiveIdentity) {
  Rng rng(5);
  ParameterSet params;
  EncoderLayer layer(params, "l", {16, 4, 32}, rng);
  for (const char* name : {"l.attn.o.weight", "l.attn.o.bias",
                           "l.ffn.out.weight", "l.ffn.out.bias"}) {
    Var p = params.Get(name);
    p.mutable_value().setZero();
  }
  Var x(RandomMatrix(5, 16, rng));
  Var y = layer.Forward(x, nullptr);
  EXPECT_EQ(y.value(), x.value());
}

TEST(EncoderLayerTest, BlockDiagonalMaskMatchesSeparateSegments) {
  Rng rng(6);
  ParameterSet params;
  EncoderLayer layer(params, "l", {16, 4, 32}, rng);
  Matrix a = RandomMatrix(3, 16, rng);
  Matrix b = RandomMatrix(4, 16, rng);
  Matrix joint(7, 16);
  joint << a, b;
  Mask block = Mask::Constant(7, 7, false);
  block.topLeftCorner(3, 3).setConstant(true);
  block.bottomRightCorner(4, 4).setConstant(true);
  Matrix together = layer.Forward(Var(joint), &block).value();
  Matrix sep_a = layer.Forward(Var(a), nullptr).value();
  Matrix sep_b = layer.Forward(Var(b), nullptr).value();
  EXPECT_LT((together.topRows(3) - sep_a).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LT((together.bottomRows(4) - sep_b).cwiseAbs().maxCoeff(), 1e-12);
  // An all-true mask mixes the segments.
  Matrix mixed = layer.Forward(Var(joint), nullptr).value();
  EXPECT_GT((mixed.topRows(3) - sep_a).cwiseAbs().maxCoeff(), 1e-6);
}

TEST(EncoderLayerTest, DeterministicForFixedSeed) {
  auto run = [] {
    Rng rng(42);
    ParameterSet params;
    EncoderLayer layer(params, "l", {16, 4, 32}, rng);
    Var x(RandomMatrix(5, 16, rng));
    return layer.Forward(x, nullptr).value();
  };
  EXPECT_EQ(run(), run());
}

TEST(GradCheckTest, SquareAtThree) {
  ParameterSet params;
  Var x = params.Create("x", Matrix::Constant(1, 1, 3.0));
  auto f = [&] { return ops::Mul(x, x); };
  params.ZeroGrad();
  Backward(f());
  EXPECT_DOUBLE_EQ(x.grad()(0, 0), 6.0);
  GradCheckResult r = FiniteDifferenceCheck(f, params, {.eps = 1e-5});
  EXPECT_NEAR(r.worst_numeric, 6.0, 1e-8);
  EXPECT_LT(r.max_rel_error, 1e-9);
}

TEST(GradCheckTest, BceAtZeroLogit) {
  ParameterSet params;
  Var z = params.Create("z", Matrix::Zero(1, 1));
  auto f = [&] { return ops::BceWithLogits(z, 1.0); };
  params.ZeroGrad();
  Backward(f());
  EXPECT_DOUBLE_EQ(z.grad()(0, 0), -0.5);
  EXPECT_LT(FiniteDifferenceCheck(f, params).max_rel_error, 1e-8);
}

TEST(GradCheckTest, RejectsEpsOutOfRange) {
  ParameterSet params;
  Var x = params.Create("x", Matrix::Ones(1, 1));
  auto f = [&] { return ops::Mul(x, x); };
  EXPECT_THROW(FiniteDifferenceCheck(f, params, {.eps = 1e-2}),
               std::invalid_argument);
}

TEST(GradCheckTest, NonFiniteLossIsAnError) {
  ParameterSet params;
  Var x = params.Create("x", Matrix::Constant(1, 1, 1e300));
  auto f = [&] { return ops::Mul(x, x); };
  EXPECT_THROW(FiniteDifferenceCheck(f, params), std::domain_error);
}

// Every primitive, composed into one scalar, on randomized small shapes.
TEST(GradCheckTest, PrimitiveOpsOnRandomShapes) {
  Rng rng(7);
  for (int trial = 0; trial < 4; ++trial) {
    std::uniform_int_distribution<int> dim(2, 6);
    const int r = dim(rng);
    const int c = 2 * dim(rng);
    ParameterSet params;
    Var a = params.Create("a", RandomMatrix(r, c, rng));
    Var b = params.Create("b", RandomMatrix(c, r, rng));
    Var row = params.Create("row", RandomMatrix(1, c, rng));
    Var gain = params.Create("gain", RandomMatrix(1, c, rng));
    Var table = params.Create("table", RandomMatrix(7, c, rng));
    std::vector<int> ids = {1, 3, 3, 6};
    std::vector<int> targets(r);
    for (int i = 0; i < r; ++i) targets[i] = i % c;
    Mask mask = Mask::Constant(r, r, true);
    mask(0, r - 1) = false;
    auto f = [&] {
      Var x = ops::LayerNorm(ops::AddRow(a, row), gain, row);
      Var s = ops::MaskedSoftmax(ops::MatMul(x, b), &mask);
      Var y = ops::Gelu(ops::MatMul(s, a));
      Var t = ops::MeanRows(ops::GatherRows(table, ids));
      Var n = ops::NormalizeRows(ops::Add(y, ops::Scale(x, 0.5)));
      Var dots = ops::RowDot(n, ops::ConcatRows(std::vector<Var>{
                                    ops::SliceRows(x, 0, r - 1), t}));
      Var ce = ops::CrossEntropy(ops::Sub(y, x), targets);
      Var cols = ops::ConcatCols(std::vector<Var>{
          ops::SliceCols(y, 0, 2), ops::SliceCols(x, 2, c - 2)});
      Var bce = ops::BceWithLogits(ops::Mean(ops::Sigmoid(cols)), 1.0);
      Var rl = ops::Relu(ops::AddScalar(ops::Mean(dots), 0.5));
      Var mt = ops::Mean(ops::MatMulT(y, x));
      return ops::Add(ops::Add(ops::Add(ce, bce), rl), mt);
    };
    GradCheckResult res = FiniteDifferenceCheck(f, params,
                                                {.eps = 1e-5,
                                                 .max_entries_per_param = 0});
    EXPECT_LT(res.max_rel_error, 1e-4)
        << res.worst_param << "[" << res.worst_index << "] analytic "
        << res.worst_analytic << " numeric " << res.worst_numeric;
  }
}

TEST(GradCheckTest, EncoderLayerWithMask) {
  Rng rng(8);
  ParameterSet params;
  EncoderLayer layer(params, "l", {8, 2, 12}, rng);
  Var x = params.Create("x", RandomMatrix(5, 8, rng));
  Mask mask = Mask::Constant(5, 5, true);
  mask(4, 0) = mask(0, 4) = false;
  std::vector<int> targets = {0, 1, 2, 3, 4};
  auto f = [&] { return ops::CrossEntropy(layer.Forward(x, &mask), targets); };
  GradCheckResult res = FiniteDifferenceCheck(f, params);
  EXPECT_LT(res.max_rel_error, 1e-4) << res.worst_param;
}

TEST(ParameterSetTest, FrozenParametersAreNotUpdated) {
  Rng rng(9);
  ParameterSet params;
  Linear lin(params, "frozen", 3, 3, rng);
  Linear head(params, "head", 3, 1, rng);
  params.SetTrainable("frozen", false);
  const uint64_t frozen_before = params.Fingerprint("frozen");
  const uint64_t head_before = params.Fingerprint("head");
  Adam adam({.lr = 0.1});
  Var x(RandomMatrix(4, 3, rng));
  for (int step = 0; step < 3; ++step) {
    params.ZeroGrad();
    Backward(ops::Mean(head.Forward(lin.Forward(x))));
    EXPECT_EQ(params.Get("frozen.weight").grad().size(), 0);
    adam.Step(params);
  }
  EXPECT_EQ(params.Fingerprint("frozen"), frozen_before);
  EXPECT_NE(params.Fingerprint("head"), head_before);
}

TEST(ParameterSetTest, DuplicateNamesRejected) {
  ParameterSet params;
  params.Create("w", Matrix::Zero(1, 1));
  EXPECT_THROW(params.Create("w", Matrix::Zero(1, 1)), std::invalid_argument);
}

TEST(CheckpointTest, RoundTripAndVersionCheck) {
  Rng rng(10);
  ParameterSet params;
  Linear lin(params, "lin", 4, 2, rng);
  auto path = std::filesystem::temp_directory_path() / "nedict_ckpt_test.bin";
  SaveCheckpoint(path, params, R"({"kind":"test"})");

  Rng other(11);
  ParameterSet restored;
  Linear lin2(restored, "lin", 4, 2, other);
  EXPECT_NE(restored.Fingerprint(), params.Fingerprint());
  EXPECT_EQ(LoadCheckpoint(path, restored), R"({"kind":"test"})");
  EXPECT_EQ(restored.Fingerprint(), params.Fingerprint());

  // Bump the version field in place.
  {
    std::fstream f(path, std::ios::in | std::ios::out | std::ios::binary);
    f.seekp(8);
    const uint32_t bad = 99;
    f.write(reinterpret_cast<const char*>(&bad), 4);
  }
  EXPECT_THROW(LoadCheckpoint(path, restored), std::runtime_error);
  std::filesystem::remove(path);
}

TEST(NoGradTest, InferenceRecordsNoGraph) {
  ParameterSet params;
  Var w = params.Create("w", Matrix::Ones(2, 2));
  NoGradGuard guard;
  Var y = ops::MatMul(w, w);
  EXPECT_FALSE(y.requires_grad());
  EXPECT_TRUE(y.node()->inputs.empty());
}

}  // namespace
}  // namespace nedict::numerics
