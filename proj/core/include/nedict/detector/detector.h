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

#ifndef NEDICT_DETECTOR_DETECTOR_H_
#define NEDICT_DETECTOR_DETECTOR_H_

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "nedict/corpus/types.h"
#include "nedict/encoder/shared_encoder.h"
#include "nedict/numerics/layers.h"

namespace nedict::detector {

inline constexpr int kDetectorLayers = 3;
inline constexpr double kDefaultThreshold = 0.86;

struct DetectorConfig {
  int dim = 64;
  int heads = 4;
  int ffn = 128;
  int window_mult = 2;
  bool modality_embedding = true;
  bool attention_mask = true;
};

// Speech-speech attention is limited to |q - k| <= window_mult * P; every
// other pair (anything involving CLS, SEP or a text position) is allowed.
numerics::Mask BuildAttentionMask(int ne_length, int speech_length,
                                  int window_mult = 2);

// Binary classifier over [CLS, NE text encodings, SEP, speech encodings]
// that predicts whether the NE occurs in the utterance.
class DetectorModel {
 public:
  DetectorModel(const DetectorConfig& config, uint64_t seed);
  DetectorModel(DetectorModel&&) = default;
  DetectorModel& operator=(DetectorModel&&) = default;

  // Layout [CLS, text_1 + TXT, ..., text_P + TXT, SEP, speech_1 + SPC, ...].
  numerics::Var BuildInput(const numerics::Var& text,
                           const numerics::Var& speech) const;

  // Detection logit (1 x 1). `head_layerdrop` skips detector layers at
  // random when positive (training only).
  numerics::Var Logit(const numerics::Var& text, const numerics::Var& speech,
                      numerics::AttentionTrace* trace = nullptr,
                      double head_layerdrop = 0.0,
                      numerics::Rng* rng = nullptr) const;

  // Probability in (0, 1); records no graph.
  double Score(const numerics::Tensor& text,
               const numerics::Tensor& speech) const;

  const DetectorConfig& config() const { return config_; }
  numerics::ParameterSet& params() { return params_; }
  const numerics::ParameterSet& params() const { return params_; }

  void Save(const std::filesystem::path& path) const;
  static DetectorModel Load(const std::filesystem::path& path);

 private:
  DetectorConfig config_;
  numerics::ParameterSet params_;
  numerics::Var cls_;
  numerics::Var sep_;
  numerics::Var txt_;
  numerics::Var spc_;
  std::vector<numerics::EncoderLayer> layers_;
  numerics::LayerNorm final_norm_;
  numerics::Linear output_;
};

// Text encoding of one dictionary entry.
struct EncodedEntity {
  const corpus::NamedEntity* entity = nullptr;
  numerics::Tensor text;
};

// Encodes every dictionary entry from its source tokens. With
// `mimic_acronym_failure` acronyms are read like their lower-case homograph.
std::vector<EncodedEntity> EncodeDictionary(
    const encoder::SharedEncoder& encoder,
    std::span<const corpus::NamedEntity> dictionary,
    const corpus::Lexicon& lexicon, bool mimic_acronym_failure = false);

struct DetectionResult {
  std::string ne_id;
  double probability = 0.0;
  bool detected = false;
};

// One result per dictionary entry, in dictionary order.
std::vector<DetectionResult> Detect(std::span<const EncodedEntity> dictionary,
                                    const numerics::Tensor& speech,
                                    const DetectorModel& model,
                                    double threshold = kDefaultThreshold);

// Baseline: mean over NE positions of the best frame cosine similarity.
std::vector<DetectionResult> CosineBaselineDetect(
    std::span<const EncodedEntity> dictionary, const numerics::Tensor& speech,
    double threshold);

// Re-thresholds scored results without rescoring.
std::vector<DetectionResult> ApplyThreshold(
    std::span<const DetectionResult> results, double threshold);

// Zeroes one contiguous span of ceil(fraction * S) speech positions.
numerics::Tensor SpeechSpanMask(const numerics::Tensor& speech,
                                double fraction, numerics::Rng& rng);

}  // namespace nedict::detector

#endif  // NEDICT_DETECTOR_DETECTOR_H_
