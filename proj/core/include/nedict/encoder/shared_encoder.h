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

#ifndef NEDICT_ENCODER_SHARED_ENCODER_H_
#define NEDICT_ENCODER_SHARED_ENCODER_H_

#include <cstdint>
#include <span>
#include <string>

#include "nedict/numerics/layers.h"

namespace nedict::encoder {

struct EncoderConfig {
  int num_phonemes = 40;
  int frame_dim = 32;
  int dim = 64;
  int heads = 4;
  int ffn = 128;
  int layers = 4;
  // Position signal over (i + 0.5) / L instead of the integer index i.
  bool normalized_positions = true;
};

enum class Modality { kText, kSpeech };

struct EncoderOutput {
  numerics::Tensor vectors;  // L x dim, one row per input position
  Modality modality = Modality::kText;
  std::string source_id;
};

// One transformer stack shared by phoneme text and speech frames. Text
// enters through a phoneme embedding table, speech through a linear frame
// projection; both then get a length-normalized sinusoidal position signal
// so that aligned text and speech positions receive the same encoding.
class SharedEncoder {
 public:
  SharedEncoder(const EncoderConfig& config, uint64_t seed);
  SharedEncoder(SharedEncoder&&) = default;
  SharedEncoder& operator=(SharedEncoder&&) = default;
  SharedEncoder(const SharedEncoder&) = delete;
  SharedEncoder& operator=(const SharedEncoder&) = delete;

  // Graph-building forwards. With layerdrop_p > 0 each layer is skipped
  // independently with that probability, drawn from `rng`; `skipped`
  // receives the number of skipped layers when non-null.
  numerics::Var ForwardText(std::span<const int> phonemes, double layerdrop_p,
                            numerics::Rng* rng, int* skipped = nullptr) const;
  numerics::Var ForwardSpeech(const numerics::Tensor& frames,
                              double layerdrop_p, numerics::Rng* rng,
                              int* skipped = nullptr) const;

  // Inference wrappers; no graph is recorded.
  EncoderOutput EncodeText(std::span<const int> phonemes,
                           double layerdrop_p = 0.0, uint64_t seed = 0) const;
  EncoderOutput EncodeSpeech(const numerics::Tensor& frames,
                             double layerdrop_p = 0.0,
                             uint64_t seed = 0) const;

  const EncoderConfig& config() const { return config_; }
  numerics::ParameterSet& params() { return params_; }
  const numerics::ParameterSet& params() const { return params_; }

 private:
  numerics::Var RunStack(numerics::Var x, double layerdrop_p,
                         numerics::Rng* rng, int* skipped) const;

  EncoderConfig config_;
  numerics::ParameterSet params_;
  numerics::Var phoneme_embedding_;
  numerics::Linear speech_projection_;
  std::vector<numerics::EncoderLayer> layers_;
  numerics::LayerNorm final_norm_;
};

// Sinusoidal encoding of fractional positions (i + 0.5) / length, stretched
// to a fixed span so every sequence covers the same phase range.
numerics::Matrix NormalizedPositions(int length, int dim);

}  // namespace nedict::encoder

#endif  // NEDICT_ENCODER_SHARED_ENCODER_H_
