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

#include "nedict/biasdec/decoder.h"

#include <stdexcept>

namespace nedict::biasdec {

using numerics::Var;
namespace ops = numerics::ops;

std::string BiasMethodName(BiasMethod method) {
  switch (method) {
    case BiasMethod::kNone:
      return "none";
    case BiasMethod::kParallel:
      return "parallel";
    case BiasMethod::kSequential:
      return "sequential";
  }
  return "none";
}

BiasMethod ParseBiasMethod(const std::string& name) {
  if (name == "none") return BiasMethod::kNone;
  if (name == "parallel") return BiasMethod::kParallel;
  if (name == "sequential") return BiasMethod::kSequential;
  throw std::invalid_argument("unknown bias method: " + name);
}

bool IsBiasAttentionParam(const std::string& name) {
  return name.find(".bias_attn.") != std::string::npos ||
         name.find(".bias_norm.") != std::string::npos;
}

DecoderLayer::DecoderLayer(numerics::ParameterSet& params,
                           const std::string& prefix,
                           const numerics::LayerShape& shape,
                           BiasMethod method, numerics::Rng& rng)
    : method_(method),
      self_norm_(params, prefix + ".self_norm", shape.dim),
      self_attn_(params, prefix + ".self_attn", shape.dim, shape.heads, rng),
      cross_norm_(params, prefix + ".cross_norm", shape.dim),
      cross_attn_(params, prefix + ".cross_attn", shape.dim, shape.heads,
                  rng),
      ffn_norm_(params, prefix + ".ffn_norm", shape.dim),
      ffn_(params, prefix + ".ffn", shape.dim, shape.ffn, rng) {
  if (method == BiasMethod::kNone) return;
  if (method == BiasMethod::kSequential) {
    bias_norm_ = numerics::LayerNorm(params, prefix + ".bias_norm", shape.dim);
  }
  bias_attn_ = numerics::MultiHeadAttention(params, prefix + ".bias_attn",
                                            shape.dim, shape.heads, rng);
}

Var DecoderLayer::Forward(const Var& x, const Var& memory, const Var* bias,
                          numerics::AttentionTrace* bias_trace) const {
  if ((bias != nullptr) != (method_ != BiasMethod::kNone)) {
    throw std::invalid_argument(
        method_ == BiasMethod::kNone
            ? "bias vectors given to a decoder without bias attention"
            : "decoder with bias attention needs a bias set");
  }
  const int t = x.rows();
  numerics::Mask causal = numerics::Mask::Constant(t, t, false);
  for (int i = 0; i < t; ++i) causal.row(i).head(i + 1).setConstant(true);

  Var h = self_norm_.Forward(x);
  Var y = ops::Add(x, ops::Dropout(self_attn_.Forward(h, h, &causal)));
  Var c = cross_norm_.Forward(y);
  Var cross = ops::Dropout(cross_attn_.Forward(c, memory, nullptr));
  switch (method_) {
    case BiasMethod::kNone:
      y = ops::Add(y, cross);
      break;
    case BiasMethod::kParallel:
      y = ops::Add(y, ops::Add(cross, ops::Dropout(bias_attn_.Forward(
                                          c, *bias, nullptr, bias_trace))));
      break;
    case BiasMethod::kSequential: {
      y = ops::Add(y, cross);
      Var b = bias_norm_.Forward(y);
      y = ops::Add(y, ops::Dropout(
                          bias_attn_.Forward(b, *bias, nullptr, bias_trace)));
      break;
    }
  }
  return ops::Add(y, ops::Dropout(ffn_.Forward(ffn_norm_.Forward(y))));
}

Decoder::Decoder(numerics::ParameterSet& params, const DecoderConfig& config,
                 BiasMethod method, numerics::Rng& rng)
    : config_(config), method_(method) {
  if (config.vocab_size <= 2) {
    throw std::invalid_argument("decoder vocabulary is too small");
  }
  embedding_ = params.Create(
      "decoder.embedding",
      numerics::NormalInit(config.vocab_size, config.dim, 1.0, rng));
  const numerics::LayerShape shape{config.dim, config.heads, config.ffn};
  for (int i = 0; i < config.layers; ++i) {
    layers_.emplace_back(params, "decoder.layers." + std::to_string(i), shape,
                         method, rng);
  }
  final_norm_ = numerics::LayerNorm(params, "decoder.final_norm", config.dim);
  output_ = numerics::Linear(params, "decoder.output", config.dim,
                             config.vocab_size, rng);
}

Var Decoder::Embed(std::span<const int> tokens) const {
  for (int t : tokens) {
    if (t < 0 || t >= config_.vocab_size) {
      throw std::out_of_range("token id " + std::to_string(t) +
                              " outside the decoder vocabulary");
    }
  }
  return ops::GatherRows(embedding_, tokens);
}

Var Decoder::Forward(std::span<const int> inputs, const Var& memory,
                     const Var* bias,
                     numerics::AttentionTrace* bias_trace) const {
  if (inputs.empty()) throw std::invalid_argument("empty decoder input");
  Var x = ops::Add(
      Embed(inputs),
      Var(numerics::SinusoidalPositions(static_cast<int>(inputs.size()),
                                        config_.dim)));
  for (const auto& layer : layers_) {
    x = layer.Forward(x, memory, bias, bias_trace);
  }
  return output_.Forward(final_norm_.Forward(x));
}

}  // namespace nedict::biasdec
