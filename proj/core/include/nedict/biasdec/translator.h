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

#ifndef NEDICT_BIASDEC_TRANSLATOR_H_
#define NEDICT_BIASDEC_TRANSLATOR_H_

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "nedict/biasdec/decoder.h"
#include "nedict/corpus/types.h"
#include "nedict/encoder/shared_encoder.h"

namespace nedict::biasdec {

// Encoded NE list for bias attention. Row 0 is the learned no-bias vector;
// row i > 0 encodes entity ne_ids[i - 1].
struct BiasSet {
  numerics::Tensor vectors;
  std::vector<std::string> ne_ids;
  size_t size() const { return ne_ids.size(); }
};

struct TranslatorConfig {
  encoder::EncoderConfig encoder;
  DecoderConfig decoder;
  BiasMethod method = BiasMethod::kNone;
  int bias_layers = 3;
};

// Shared encoder + target decoder, optionally with a CLAS bias encoder and
// bias attention in every decoder layer. With method kNone this is the plain
// speech/text-to-text model.
class SpeechTranslator {
 public:
  SpeechTranslator(const TranslatorConfig& config, uint64_t seed);
  SpeechTranslator(SpeechTranslator&&) = default;
  SpeechTranslator& operator=(SpeechTranslator&&) = default;

  // A bias-enabled model whose encoder and decoder weights are copied from
  // `base`. The bias attention output projections start at zero so the new
  // model initially reproduces the base model.
  static SpeechTranslator WithBias(const SpeechTranslator& base,
                                   BiasMethod method, uint64_t seed,
                                   int bias_layers = 3);

  const TranslatorConfig& config() const { return config_; }
  bool has_bias() const { return config_.method != BiasMethod::kNone; }
  const encoder::SharedEncoder& encoder() const { return encoder_; }
  const Decoder& decoder() const { return decoder_; }
  numerics::ParameterSet& params() { return params_; }
  const numerics::ParameterSet& params() const { return params_; }

  // (B + 1) x dim bias vectors for the given target token sequences.
  numerics::Var BiasVectors(
      const std::vector<std::vector<int>>& target_forms) const;
  // Encodes entities through their target-language form.
  BiasSet EncodeBias(std::span<const corpus::NamedEntity* const> entities,
                     const corpus::Vocabulary& vocab) const;

  void Save(const std::filesystem::path& path) const;
  static SpeechTranslator Load(const std::filesystem::path& path);

 private:
  TranslatorConfig config_;
  encoder::SharedEncoder encoder_;
  numerics::ParameterSet params_;
  Decoder decoder_;
  std::vector<numerics::EncoderLayer> bias_layers_;
  numerics::LayerNorm bias_norm_;
  numerics::Var no_bias_;
};

// Teacher-forced mean cross-entropy of BOS + target -> target + EOS.
numerics::Var SequenceLoss(const SpeechTranslator& model,
                           const numerics::Var& memory,
                           const numerics::Var* bias,
                           std::span<const int> target);

std::string TranslatorConfigToJson(const TranslatorConfig& config);
TranslatorConfig TranslatorConfigFromJson(const std::string& text);

}  // namespace nedict::biasdec

#endif  // NEDICT_BIASDEC_TRANSLATOR_H_
