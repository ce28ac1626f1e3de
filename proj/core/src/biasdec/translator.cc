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

#include "nedict/biasdec/translator.h"

#include <stdexcept>

#include "json.hpp"
#include "nedict/numerics/checkpoint.h"

namespace nedict::biasdec {

using numerics::Var;
namespace ops = numerics::ops;
using json = nlohmann::json;

SpeechTranslator::SpeechTranslator(const TranslatorConfig& config,
                                   uint64_t seed)
    : config_(config), encoder_(config.encoder, seed) {
  if (config.encoder.dim != config.decoder.dim) {
    throw std::invalid_argument("encoder and decoder widths differ");
  }
  params_.Adopt(encoder_.params());
  numerics::Rng rng(seed ^ 0x5bd1e995ULL);
  decoder_ = Decoder(params_, config.decoder, config.method, rng);
  if (config.method == BiasMethod::kNone) return;
  const numerics::LayerShape shape{config.decoder.dim, config.decoder.heads,
                                   config.decoder.ffn};
  bias_layers_ = numerics::MakeEncoderStack(
      params_, "bias_encoder.layers", shape, config.bias_layers, rng);
  bias_norm_ = numerics::LayerNorm(params_, "bias_encoder.final_norm",
                                   config.decoder.dim);
  no_bias_ = params_.Create(
      "bias_encoder.no_bias",
      numerics::NormalInit(1, config.decoder.dim, 1.0, rng));
}

SpeechTranslator SpeechTranslator::WithBias(const SpeechTranslator& base,
                                            BiasMethod method, uint64_t seed,
                                            int bias_layers) {
  if (method == BiasMethod::kNone) {
    throw std::invalid_argument("WithBias needs a bias method");
  }
  TranslatorConfig config = base.config_;
  config.method = method;
  config.bias_layers = bias_layers;
  SpeechTranslator model(config, seed);
  model.params_.CopyValuesFrom(base.params_, "encoder.");
  model.params_.CopyValuesFrom(base.params_, "decoder.");
  for (const auto& name : model.params_.Names()) {
    if (name.find(".bias_attn.o.") != std::string::npos) {
      numerics::Var weight = model.params_.Get(name);
      weight.mutable_value().setZero();
    }
  }
  return model;
}

Var SpeechTranslator::BiasVectors(
    const std::vector<std::vector<int>>& target_forms) const {
  if (!has_bias()) {
    throw std::logic_error("model has no bias encoder");
  }
  std::vector<Var> rows;
  rows.reserve(target_forms.size() + 1);
  rows.push_back(no_bias_);
  for (const auto& form : target_forms) {
    if (form.empty()) throw std::invalid_argument("empty NE target form");
    Var x = ops::Add(decoder_.Embed(form),
                     Var(numerics::SinusoidalPositions(
                         static_cast<int>(form.size()), config_.decoder.dim)));
    for (const auto& layer : bias_layers_) x = layer.Forward(x, nullptr);
    rows.push_back(ops::MeanRows(bias_norm_.Forward(x)));
  }
  return ops::ConcatRows(rows);
}

BiasSet SpeechTranslator::EncodeBias(
    std::span<const corpus::NamedEntity* const> entities,
    const corpus::Vocabulary& vocab) const {
  numerics::NoGradGuard no_grad;
  std::vector<std::vector<int>> forms;
  BiasSet out;
  for (const auto* ne : entities) {
    forms.push_back(vocab.Encode(ne->TargetTokens()));
    out.ne_ids.push_back(ne->id);
  }
  out.vectors = BiasVectors(forms).ToTensor();
  return out;
}

Var SequenceLoss(const SpeechTranslator& model, const Var& memory,
                 const Var* bias, std::span<const int> target) {
  std::vector<int> inputs{corpus::Vocabulary::kBos};
  inputs.insert(inputs.end(), target.begin(), target.end());
  std::vector<int> labels(target.begin(), target.end());
  labels.push_back(corpus::Vocabulary::kEos);
  return ops::CrossEntropy(model.decoder().Forward(inputs, memory, bias),
                           labels);
}

std::string TranslatorConfigToJson(const TranslatorConfig& c) {
  json j;
  j["encoder"] = {{"num_phonemes", c.encoder.num_phonemes},
                  {"frame_dim", c.encoder.frame_dim},
                  {"dim", c.encoder.dim},
                  {"heads", c.encoder.heads},
                  {"ffn", c.encoder.ffn},
                  {"layers", c.encoder.layers}};
  j["decoder"] = {{"vocab_size", c.decoder.vocab_size},
                  {"dim", c.decoder.dim},
                  {"heads", c.decoder.heads},
                  {"ffn", c.decoder.ffn},
                  {"layers", c.decoder.layers}};
  j["method"] = BiasMethodName(c.method);
  j["bias_layers"] = c.bias_layers;
  return j.dump();
}

TranslatorConfig TranslatorConfigFromJson(const std::string& text) {
  TranslatorConfig c;
  try {
    const json j = json::parse(text);
    const auto& e = j.at("encoder");
    c.encoder.num_phonemes = e.at("num_phonemes");
    c.encoder.frame_dim = e.at("frame_dim");
    c.encoder.dim = e.at("dim");
    c.encoder.heads = e.at("heads");
    c.encoder.ffn = e.at("ffn");
    c.encoder.layers = e.at("layers");
    const auto& d = j.at("decoder");
    c.decoder.vocab_size = d.at("vocab_size");
    c.decoder.dim = d.at("dim");
    c.decoder.heads = d.at("heads");
    c.decoder.ffn = d.at("ffn");
    c.decoder.layers = d.at("layers");
    c.method = ParseBiasMethod(j.at("method"));
    c.bias_layers = j.at("bias_layers");
  } catch (const json::exception& ex) {
    throw std::runtime_error(std::string("bad translator config: ") +
                             ex.what());
  }
  return c;
}

void SpeechTranslator::Save(const std::filesystem::path& path) const {
  numerics::SaveCheckpoint(path, params_, TranslatorConfigToJson(config_));
}

SpeechTranslator SpeechTranslator::Load(const std::filesystem::path& path) {
  SpeechTranslator model(
      TranslatorConfigFromJson(numerics::ReadCheckpointHeader(path)), 0);
  numerics::LoadCheckpoint(path, model.params_);
  return model;
}

}  // namespace nedict::biasdec
