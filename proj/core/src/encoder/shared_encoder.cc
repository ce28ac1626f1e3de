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

#include "nedict/encoder/shared_encoder.h"

#include <cmath>
#include <random>
#include <stdexcept>

namespace nedict::encoder {

using numerics::Matrix;
using numerics::Var;
namespace ops = numerics::ops;

namespace {
constexpr double kPositionSpan = 48.0;
}  // namespace

Matrix NormalizedPositions(int length, int dim) {
  Matrix pe(length, dim);
  for (int pos = 0; pos < length; ++pos) {
    const double p = kPositionSpan * (pos + 0.5) / length;
    for (int i = 0; i < dim; ++i) {
      const double rate =
          std::pow(10000.0, -static_cast<double>(2 * (i / 2)) / dim);
      pe(pos, i) = (i % 2 == 0) ? std::sin(p * rate) : std::cos(p * rate);
    }
  }
  return pe;
}

SharedEncoder::SharedEncoder(const EncoderConfig& config, uint64_t seed)
    : config_(config) {
  numerics::Rng rng(seed);
  phoneme_embedding_ = params_.Create(
      "encoder.phoneme_embedding",
      numerics::NormalInit(config.num_phonemes, config.dim, 1.0, rng));
  speech_projection_ = numerics::Linear(params_, "encoder.speech_projection",
                                        config.frame_dim, config.dim, rng);
  layers_ = numerics::MakeEncoderStack(
      params_, "encoder.layers", {config.dim, config.heads, config.ffn},
      config.layers, rng);
  final_norm_ = numerics::LayerNorm(params_, "encoder.final_norm", config.dim);
}

Var SharedEncoder::RunStack(Var x, double layerdrop_p, numerics::Rng* rng,
                            int* skipped) const {
  if (layerdrop_p < 0.0 || layerdrop_p > 1.0) {
    throw std::invalid_argument("layerdrop probability must lie in [0, 1]");
  }
  if (layerdrop_p > 0.0 && rng == nullptr) {
    throw std::invalid_argument("layerdrop needs a random source");
  }
  x = ops::Add(x, Var(config_.normalized_positions
                          ? NormalizedPositions(x.rows(), config_.dim)
                          : numerics::SinusoidalPositions(x.rows(),
                                                          config_.dim)));
  int dropped = 0;
  for (const auto& layer : layers_) {
    if (layerdrop_p > 0.0 &&
        std::bernoulli_distribution(layerdrop_p)(*rng)) {
      ++dropped;
      continue;
    }
    x = layer.Forward(x, nullptr);
  }
  if (skipped != nullptr) *skipped = dropped;
  return final_norm_.Forward(x);
}

Var SharedEncoder::ForwardText(std::span<const int> phonemes,
                               double layerdrop_p, numerics::Rng* rng,
                               int* skipped) const {
  if (phonemes.empty()) {
    throw std::invalid_argument("cannot encode an empty phoneme sequence");
  }
  for (int p : phonemes) {
    if (p < 0 || p >= config_.num_phonemes) {
      throw std::out_of_range("unknown phoneme id " + std::to_string(p));
    }
  }
  return RunStack(ops::GatherRows(phoneme_embedding_, phonemes), layerdrop_p,
                  rng, skipped);
}

Var SharedEncoder::ForwardSpeech(const numerics::Tensor& frames,
                                 double layerdrop_p, numerics::Rng* rng,
                                 int* skipped) const {
  if (frames.rows() == 0) {
    throw std::invalid_argument("cannot encode an empty frame sequence");
  }
  if (frames.cols() != config_.frame_dim) {
    throw std::invalid_argument("frame dimension " +
                                std::to_string(frames.cols()) +
                                " != encoder frame_dim " +
                                std::to_string(config_.frame_dim));
  }
  return RunStack(speech_projection_.Forward(Var(frames)), layerdrop_p, rng,
                  skipped);
}

EncoderOutput SharedEncoder::EncodeText(std::span<const int> phonemes,
                                        double layerdrop_p,
                                        uint64_t seed) const {
  numerics::NoGradGuard no_grad;
  numerics::Rng rng(seed);
  return {ForwardText(phonemes, layerdrop_p, &rng).ToTensor(), Modality::kText,
          ""};
}

EncoderOutput SharedEncoder::EncodeSpeech(const numerics::Tensor& frames,
                                          double layerdrop_p,
                                          uint64_t seed) const {
  numerics::NoGradGuard no_grad;
  numerics::Rng rng(seed);
  return {ForwardSpeech(frames, layerdrop_p, &rng).ToTensor(),
          Modality::kSpeech, ""};
}

}  // namespace nedict::encoder
