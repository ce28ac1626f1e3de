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

#ifndef NEDICT_BIASDEC_DECODER_H_
#define NEDICT_BIASDEC_DECODER_H_

#include <span>
#include <string>
#include <vector>

#include "nedict/numerics/layers.h"

namespace nedict::biasdec {

enum class BiasMethod { kNone, kParallel, kSequential };

std::string BiasMethodName(BiasMethod method);
BiasMethod ParseBiasMethod(const std::string& name);

struct DecoderConfig {
  int vocab_size = 0;
  int dim = 64;
  int heads = 4;
  int ffn = 128;
  int layers = 2;
};

// Pre-norm decoder layer with causal self-attention, encoder attention and
// an optional bias attention over a set of NE vectors.
//   parallel:   x += CrossMHA(LN x, enc) + BiasMHA(LN x, bias)
//   sequential: x += CrossMHA(LN x, enc); x += BiasMHA(LN' x, bias)
class DecoderLayer {
 public:
  DecoderLayer() = default;
  DecoderLayer(numerics::ParameterSet& params, const std::string& prefix,
               const numerics::LayerShape& shape, BiasMethod method,
               numerics::Rng& rng);

  // `bias` must be non-null exactly when the layer has bias attention.
  numerics::Var Forward(const numerics::Var& x, const numerics::Var& memory,
                        const numerics::Var* bias,
                        numerics::AttentionTrace* bias_trace = nullptr) const;

 private:
  BiasMethod method_ = BiasMethod::kNone;
  numerics::LayerNorm self_norm_;
  numerics::MultiHeadAttention self_attn_;
  numerics::LayerNorm cross_norm_;
  numerics::MultiHeadAttention cross_attn_;
  numerics::LayerNorm bias_norm_;  // sequential only
  numerics::MultiHeadAttention bias_attn_;
  numerics::LayerNorm ffn_norm_;
  numerics::FeedForward ffn_;
};

// Autoregressive target-token decoder. Parameters live under "decoder.";
// bias attention weights use the "bias_" sublayer prefix inside each layer.
class Decoder {
 public:
  Decoder() = default;
  Decoder(numerics::ParameterSet& params, const DecoderConfig& config,
          BiasMethod method, numerics::Rng& rng);

  // Logits for every position of `inputs` (which starts with BOS); row t
  // predicts token t + 1.
  numerics::Var Forward(std::span<const int> inputs,
                        const numerics::Var& memory, const numerics::Var* bias,
                        numerics::AttentionTrace* bias_trace = nullptr) const;

  numerics::Var Embed(std::span<const int> tokens) const;

  const DecoderConfig& config() const { return config_; }
  BiasMethod method() const { return method_; }

 private:
  DecoderConfig config_;
  BiasMethod method_ = BiasMethod::kNone;
  numerics::Var embedding_;
  std::vector<DecoderLayer> layers_;
  numerics::LayerNorm final_norm_;
  numerics::Linear output_;
};

// True for parameters that only exist because of bias attention.
bool IsBiasAttentionParam(const std::string& name);

}  // namespace nedict::biasdec

#endif  // NEDICT_BIASDEC_DECODER_H_
