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

#include "nedict/numerics/layers.h"

#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

namespace nedict::numerics {

namespace {
thread_local double g_dropout_p = 0.0;
thread_local Rng* g_dropout_rng = nullptr;
}  // namespace

DropoutScope::DropoutScope(double p, Rng* rng)
    : previous_p_(g_dropout_p), previous_rng_(g_dropout_rng) {
  if (p < 0.0 || p >= 1.0) {
    throw std::invalid_argument("dropout probability must lie in [0, 1)");
  }
  if (p > 0.0 && rng == nullptr) {
    throw std::invalid_argument("dropout needs a random source");
  }
  g_dropout_p = p;
  g_dropout_rng = rng;
}

DropoutScope::~DropoutScope() {
  g_dropout_p = previous_p_;
  g_dropout_rng = previous_rng_;
}

namespace ops {

Var Dropout(const Var& x) {
  if (g_dropout_p <= 0.0 || !GradEnabled()) return x;
  std::bernoulli_distribution keep(1.0 - g_dropout_p);
  const double scale = 1.0 / (1.0 - g_dropout_p);
  Matrix mask(x.rows(), x.cols());
  for (Eigen::Index i = 0; i < mask.size(); ++i) {
    mask.data()[i] = keep(*g_dropout_rng) ? scale : 0.0;
  }
  return Mul(x, Var(std::move(mask)));
}

Var MultiHeadAttention(const Var& query, const Var& key, const Var& value,
                       const Mask* mask, int heads, AttentionTrace* trace) {
  const int d = query.cols();
  if (heads <= 0 || d % heads != 0) {
    throw std::invalid_argument("MultiHeadAttention: dim " +
                                std::to_string(d) +
                                " not divisible by heads " +
                                std::to_string(heads));
  }
  if (key.cols() != d || value.cols() != d || key.rows() != value.rows()) {
    throw std::invalid_argument("MultiHeadAttention: key/value shape mismatch");
  }
  const int dk = d / heads;
  const double scale = 1.0 / std::sqrt(static_cast<double>(dk));
  std::vector<Var> outs;
  outs.reserve(heads);
  for (int h = 0; h < heads; ++h) {
    Var qh = heads == 1 ? query : SliceCols(query, h * dk, dk);
    Var kh = heads == 1 ? key : SliceCols(key, h * dk, dk);
    Var vh = heads == 1 ? value : SliceCols(value, h * dk, dk);
    Var weights = MaskedSoftmax(Scale(MatMulT(qh, kh), scale), mask);
    if (trace != nullptr) trace->weights.push_back(weights.value());
    outs.push_back(MatMul(weights, vh));
  }
  return heads == 1 ? outs[0] : ConcatCols(outs);
}

}  // namespace ops

Matrix SinusoidalPositions(int length, int dim, int offset) {
  Matrix pe(length, dim);
  for (int pos = 0; pos < length; ++pos) {
    for (int i = 0; i < dim; ++i) {
      const double rate =
          std::pow(10000.0, -static_cast<double>(2 * (i / 2)) / dim);
      const double angle = (pos + offset) * rate;
      pe(pos, i) = (i % 2 == 0) ? std::sin(angle) : std::cos(angle);
    }
  }
  return pe;
}

Linear::Linear(ParameterSet& params, const std::string& prefix, int in,
               int out, Rng& rng)
    : weight_(params.Create(prefix + ".weight", XavierUniform(in, out, rng))),
      bias_(params.Create(prefix + ".bias", Matrix::Zero(1, out))) {}

Var Linear::Forward(const Var& x) const {
  return ops::AddRow(ops::MatMul(x, weight_), bias_);
}

LayerNorm::LayerNorm(ParameterSet& params, const std::string& prefix,
                     int dim)
    : gain_(params.Create(prefix + ".gain", Matrix::Ones(1, dim))),
      bias_(params.Create(prefix + ".bias", Matrix::Zero(1, dim))) {}

Var LayerNorm::Forward(const Var& x) const {
  return ops::LayerNorm(x, gain_, bias_);
}

FeedForward::FeedForward(ParameterSet& params, const std::string& prefix,
                         int dim, int hidden, Rng& rng)
    : in_(params, prefix + ".in", dim, hidden, rng),
      out_(params, prefix + ".out", hidden, dim, rng) {}

Var FeedForward::Forward(const Var& x) const {
  return out_.Forward(ops::Gelu(in_.Forward(x)));
}

MultiHeadAttention::MultiHeadAttention(ParameterSet& params,
                                       const std::string& prefix, int dim,
                                       int heads, Rng& rng)
    : q_(params, prefix + ".q", dim, dim, rng),
      k_(params, prefix + ".k", dim, dim, rng),
      v_(params, prefix + ".v", dim, dim, rng),
      o_(params, prefix + ".o", dim, dim, rng),
      heads_(heads) {
  if (dim % heads != 0) {
    throw std::invalid_argument(prefix + ": dim " + std::to_string(dim) +
                                " not divisible by " + std::to_string(heads) +
                                " heads");
  }
}

Var MultiHeadAttention::Forward(const Var& query, const Var& memory,
                                const Mask* mask,
                                AttentionTrace* trace) const {
  Var q = q_.Forward(query);
  Var k = k_.Forward(memory);
  Var v = v_.Forward(memory);
  return o_.Forward(ops::MultiHeadAttention(q, k, v, mask, heads_, trace));
}

EncoderLayer::EncoderLayer(ParameterSet& params, const std::string& prefix,
                           const LayerShape& shape, Rng& rng)
    : attn_norm_(params, prefix + ".attn_norm", shape.dim),
      attn_(params, prefix + ".attn", shape.dim, shape.heads, rng),
      ffn_norm_(params, prefix + ".ffn_norm", shape.dim),
      ffn_(params, prefix + ".ffn", shape.dim, shape.ffn, rng) {}

Var EncoderLayer::Forward(const Var& x, const Mask* mask,
                          AttentionTrace* trace) const {
  Var h = attn_norm_.Forward(x);
  Var y = ops::Add(x, ops::Dropout(attn_.Forward(h, h, mask, trace)));
  return ops::Add(y, ops::Dropout(ffn_.Forward(ffn_norm_.Forward(y))));
}

std::vector<EncoderLayer> MakeEncoderStack(ParameterSet& params,
                                           const std::string& prefix,
                                           const LayerShape& shape, int count,
                                           Rng& rng) {
  std::vector<EncoderLayer> layers;
  layers.reserve(count);
  for (int i = 0; i < count; ++i) {
    layers.emplace_back(params, prefix + "." + std::to_string(i), shape, rng);
  }
  return layers;
}

}  // namespace nedict::numerics
