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

#include "nedict/detector/detector.h"

#include <cmath>
#include <random>
#include <stdexcept>

#include "json.hpp"
#include "nedict/encoder/heatmap.h"
#include "nedict/numerics/checkpoint.h"

namespace nedict::detector {

using numerics::Matrix;
using numerics::Var;
namespace ops = numerics::ops;
using json = nlohmann::json;

numerics::Mask BuildAttentionMask(int ne_length, int speech_length,
                                  int window_mult) {
  if (ne_length < 1 || speech_length < 1) {
    throw std::invalid_argument("attention mask needs P >= 1 and S >= 1");
  }
  const int n = ne_length + speech_length + 2;
  const int first_speech = ne_length + 2;
  const int window = window_mult * ne_length;
  numerics::Mask mask = numerics::Mask::Constant(n, n, true);
  for (int q = first_speech; q < n; ++q) {
    for (int k = first_speech; k < n; ++k) {
      if (std::abs(q - k) > window) mask(q, k) = false;
    }
  }
  return mask;
}

DetectorModel::DetectorModel(const DetectorConfig& config, uint64_t seed)
    : config_(config) {
  numerics::Rng rng(seed);
  cls_ = params_.Create("detector.cls",
                        numerics::NormalInit(1, config.dim, 1.0, rng));
  sep_ = params_.Create("detector.sep",
                        numerics::NormalInit(1, config.dim, 1.0, rng));
  txt_ = params_.Create("detector.txt",
                        numerics::NormalInit(1, config.dim, 0.5, rng));
  spc_ = params_.Create("detector.spc",
                        numerics::NormalInit(1, config.dim, 0.5, rng));
  layers_ = numerics::MakeEncoderStack(
      params_, "detector.layers", {config.dim, config.heads, config.ffn},
      kDetectorLayers, rng);
  final_norm_ = numerics::LayerNorm(params_, "detector.final_norm", config.dim);
  output_ = numerics::Linear(params_, "detector.output", config.dim, 1, rng);
}

Var DetectorModel::BuildInput(const Var& text, const Var& speech) const {
  if (text.rows() == 0) throw std::invalid_argument("empty NE encoding");
  if (speech.rows() == 0) throw std::invalid_argument("empty speech encoding");
  if (text.cols() != config_.dim || speech.cols() != config_.dim) {
    throw std::invalid_argument("encoding width differs from detector width");
  }
  Var t = config_.modality_embedding ? ops::AddRow(text, txt_) : text;
  Var s = config_.modality_embedding ? ops::AddRow(speech, spc_) : speech;
  const Var parts[] = {cls_, t, sep_, s};
  return ops::ConcatRows(parts);
}

Var DetectorModel::Logit(const Var& text, const Var& speech,
                         numerics::AttentionTrace* trace,
                         double head_layerdrop, numerics::Rng* rng) const {
  Var x = BuildInput(text, speech);
  numerics::Mask mask;
  if (config_.attention_mask) {
    mask = BuildAttentionMask(text.rows(), speech.rows(), config_.window_mult);
  }
  const numerics::Mask* m = config_.attention_mask ? &mask : nullptr;
  for (const auto& layer : layers_) {
    if (head_layerdrop > 0.0 &&
        std::bernoulli_distribution(head_layerdrop)(*rng)) {
      continue;
    }
    x = layer.Forward(x, m, trace);
  }
  return output_.Forward(final_norm_.Forward(ops::SliceRows(x, 0, 1)));
}

double DetectorModel::Score(const numerics::Tensor& text,
                            const numerics::Tensor& speech) const {
  numerics::NoGradGuard no_grad;
  const double logit = Logit(Var(text), Var(speech)).scalar();
  return 1.0 / (1.0 + std::exp(-logit));
}

void DetectorModel::Save(const std::filesystem::path& path) const {
  json header = {{"kind", "detector"},
                 {"dim", config_.dim},
                 {"heads", config_.heads},
                 {"ffn", config_.ffn},
                 {"layers", kDetectorLayers},
                 {"window_mult", config_.window_mult},
                 {"modality_embedding", config_.modality_embedding},
                 {"attention_mask", config_.attention_mask}};
  numerics::SaveCheckpoint(path, params_, header.dump());
}

DetectorModel DetectorModel::Load(const std::filesystem::path& path) {
  DetectorConfig config;
  try {
    const json h = json::parse(numerics::ReadCheckpointHeader(path));
    if (h.at("kind") != "detector" || h.at("layers") != kDetectorLayers) {
      throw std::runtime_error("not a detector checkpoint: " + path.string());
    }
    config.dim = h.at("dim");
    config.heads = h.at("heads");
    config.ffn = h.at("ffn");
    config.window_mult = h.at("window_mult");
    config.modality_embedding = h.at("modality_embedding");
    config.attention_mask = h.at("attention_mask");
  } catch (const json::exception& e) {
    throw std::runtime_error("bad detector checkpoint header: " +
                             std::string(e.what()));
  }
  DetectorModel model(config, 0);
  numerics::LoadCheckpoint(path, model.params_);
  return model;
}

std::vector<EncodedEntity> EncodeDictionary(
    const encoder::SharedEncoder& encoder,
    std::span<const corpus::NamedEntity> dictionary,
    const corpus::Lexicon& lexicon, bool mimic_acronym_failure) {
  std::vector<EncodedEntity> out;
  out.reserve(dictionary.size());
  for (const auto& ne : dictionary) {
    const auto phonemes =
        lexicon.Phonemize(ne.SourceTokens(), mimic_acronym_failure);
    out.push_back({&ne, encoder.EncodeText(phonemes).vectors});
  }
  return out;
}

std::vector<DetectionResult> ApplyThreshold(
    std::span<const DetectionResult> results, double threshold) {
  if (!(threshold > 0.0 && threshold < 1.0)) {
    throw std::invalid_argument("threshold must lie in (0, 1)");
  }
  std::vector<DetectionResult> out(results.begin(), results.end());
  for (auto& r : out) r.detected = r.probability >= threshold;
  return out;
}

std::vector<DetectionResult> Detect(std::span<const EncodedEntity> dictionary,
                                    const numerics::Tensor& speech,
                                    const DetectorModel& model,
                                    double threshold) {
  if (!(threshold > 0.0 && threshold < 1.0)) {
    throw std::invalid_argument("threshold must lie in (0, 1)");
  }
  std::vector<DetectionResult> out;
  out.reserve(dictionary.size());
  for (const auto& e : dictionary) {
    const double p = model.Score(e.text, speech);
    out.push_back({e.entity->id, p, p >= threshold});
  }
  return out;
}

std::vector<DetectionResult> CosineBaselineDetect(
    std::span<const EncodedEntity> dictionary, const numerics::Tensor& speech,
    double threshold) {
  if (!(threshold > 0.0 && threshold < 1.0)) {
    throw std::invalid_argument("threshold must lie in (0, 1)");
  }
  const encoder::EncoderOutput s{speech, encoder::Modality::kSpeech, ""};
  std::vector<DetectionResult> out;
  out.reserve(dictionary.size());
  for (const auto& e : dictionary) {
    const Matrix heat = encoder::SimilarityHeatmap(
        {e.text, encoder::Modality::kText, e.entity->id}, s);
    const double score = heat.colwise().maxCoeff().mean();
    out.push_back({e.entity->id, score, score >= threshold});
  }
  return out;
}

numerics::Tensor SpeechSpanMask(const numerics::Tensor& speech,
                                double fraction, numerics::Rng& rng) {
  if (fraction < 0.0 || fraction > 0.5) {
    throw std::invalid_argument("speech mask fraction must lie in [0, 0.5]");
  }
  const int s = speech.rows();
  const int span = static_cast<int>(std::ceil(fraction * s - 1e-9));
  if (span == 0) return speech;
  const int start = std::uniform_int_distribution<int>(0, s - span)(rng);
  Matrix m = speech.matrix();
  m.middleRows(start, span).setZero();
  return numerics::Tensor(std::move(m));
}

}  // namespace nedict::detector
