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

// Transformer building blocks. All layers register their weights in a
// caller-owned ParameterSet under a name prefix and hold shared handles to
// them, so a layer is only meaningful alongside the set it was built with.

#ifndef NEDICT_NUMERICS_LAYERS_H_
#define NEDICT_NUMERICS_LAYERS_H_

#include <string>
#include <vector>

#include "nedict/numerics/autodiff.h"
#include "nedict/numerics/parameters.h"

namespace nedict::numerics {

// Enables inverted dropout on residual branches for the current thread
// while gradients are being recorded. Scopes nest; the innermost wins.
class DropoutScope {
 public:
  DropoutScope(double p, Rng* rng);
  ~DropoutScope();
  DropoutScope(const DropoutScope&) = delete;
  DropoutScope& operator=(const DropoutScope&) = delete;

 private:
  double previous_p_;
  Rng* previous_rng_;
};

namespace ops {
// Identity unless a DropoutScope is active and gradients are enabled.
Var Dropout(const Var& x);

// Multi-head scaled dot-product attention without projections. Columns are
// split into `heads` equal groups; the same mask applies to every head.
Var MultiHeadAttention(const Var& query, const Var& key, const Var& value,
                       const Mask* mask, int heads,
                       AttentionTrace* trace = nullptr);
}  // namespace ops

// Fixed sinusoidal position table, rows = positions.
Matrix SinusoidalPositions(int length, int dim, int offset = 0);

class Linear {
 public:
  Linear() = default;
  Linear(ParameterSet& params, const std::string& prefix, int in, int out,
         Rng& rng);
  Var Forward(const Var& x) const;

  const Var& weight() const { return weight_; }
  const Var& bias() const { return bias_; }

 private:
  Var weight_;  // in x out
  Var bias_;    // 1 x out
};

class LayerNorm {
 public:
  LayerNorm() = default;
  LayerNorm(ParameterSet& params, const std::string& prefix, int dim);
  Var Forward(const Var& x) const;

 private:
  Var gain_;
  Var bias_;
};

class FeedForward {
 public:
  FeedForward() = default;
  FeedForward(ParameterSet& params, const std::string& prefix, int dim,
              int hidden, Rng& rng);
  Var Forward(const Var& x) const;

 private:
  Linear in_;
  Linear out_;
};

// Projected multi-head attention: Q/K/V projections, attention, output
// projection.
class MultiHeadAttention {
 public:
  MultiHeadAttention() = default;
  MultiHeadAttention(ParameterSet& params, const std::string& prefix, int dim,
                     int heads, Rng& rng);
  Var Forward(const Var& query, const Var& memory, const Mask* mask,
              AttentionTrace* trace = nullptr) const;
  int heads() const { return heads_; }

 private:
  Linear q_;
  Linear k_;
  Linear v_;
  Linear o_;
  int heads_ = 1;
};

struct LayerShape {
  int dim = 64;
  int heads = 4;
  int ffn = 128;
};

// Pre-norm transformer encoder layer:
//   x = x + MHA(LN(x)); x = x + FFN(LN(x)).
class EncoderLayer {
 public:
  EncoderLayer() = default;
  EncoderLayer(ParameterSet& params, const std::string& prefix,
               const LayerShape& shape, Rng& rng);
  Var Forward(const Var& x, const Mask* mask,
              AttentionTrace* trace = nullptr) const;

 private:
  LayerNorm attn_norm_;
  MultiHeadAttention attn_;
  LayerNorm ffn_norm_;
  FeedForward ffn_;
};

// A stack of encoder layers without positional handling.
std::vector<EncoderLayer> MakeEncoderStack(ParameterSet& params,
                                           const std::string& prefix,
                                           const LayerShape& shape, int count,
                                           Rng& rng);

}  // namespace nedict::numerics

#endif  // NEDICT_NUMERICS_LAYERS_H_
