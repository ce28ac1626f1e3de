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

#include "nedict/biasdec/beam_search.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <tuple>

namespace nedict::biasdec {

using numerics::Var;

namespace {

struct Hypothesis {
  std::vector<int> tokens;
  double score = 0.0;
};

struct Candidate {
  double score;
  int parent;
  int token;
};

bool Better(const Candidate& a, const Candidate& b) {
  if (a.score != b.score) return a.score > b.score;
  if (a.token != b.token) return a.token < b.token;
  return a.parent < b.parent;
}

numerics::RowVector LogSoftmax(const numerics::RowVector& logits) {
  const double m = logits.maxCoeff();
  const double lse = m + std::log((logits.array() - m).exp().sum());
  return (logits.array() - lse).matrix();
}

}  // namespace

BeamResult BeamSearch(const SpeechTranslator& model, const Var& memory,
                      const Var* bias, const BeamOptions& options,
                      const StepScorer* scorer) {
  if (options.beam < 1) throw std::invalid_argument("beam must be >= 1");
  if (options.max_length < 1) {
    throw std::invalid_argument("max_length must be >= 1");
  }
  numerics::NoGradGuard no_grad;
  const int bos = corpus::Vocabulary::kBos;
  const int eos = corpus::Vocabulary::kEos;

  std::vector<Hypothesis> live{{{}, 0.0}};
  std::vector<BeamResult> finished;
  auto final_score = [&](double score, size_t length) {
    return options.length_normalize ? score / static_cast<double>(length)
                                    : score;
  };

  for (int step = 0; step < options.max_length && !live.empty(); ++step) {
    std::vector<Candidate> candidates;
    for (size_t h = 0; h < live.size(); ++h) {
      std::vector<int> inputs{bos};
      inputs.insert(inputs.end(), live[h].tokens.begin(),
                    live[h].tokens.end());
      Var logits = model.decoder().Forward(inputs, memory, bias);
      numerics::RowVector scores =
          LogSoftmax(logits.value().row(logits.rows() - 1));
      if (scorer != nullptr) (*scorer)(live[h].tokens, scores);
      for (int v = 0; v < scores.cols(); ++v) {
        if (v == bos || !std::isfinite(scores(v))) continue;
        candidates.push_back({live[h].score + scores(v), static_cast<int>(h),
                              v});
      }
    }
    const size_t keep =
        std::min(candidates.size(), static_cast<size_t>(options.beam));
    std::partial_sort(candidates.begin(), candidates.begin() + keep,
                      candidates.end(), Better);
    std::vector<Hypothesis> next;
    for (size_t i = 0; i < keep; ++i) {
      const auto& c = candidates[i];
      Hypothesis hyp{live[c.parent].tokens, c.score};
      if (c.token == eos) {
        finished.push_back({hyp.tokens,
                            final_score(c.score, hyp.tokens.size() + 1),
                            true});
      } else {
        hyp.tokens.push_back(c.token);
        next.push_back(std::move(hyp));
      }
    }
    live = std::move(next);
    if (static_cast<int>(finished.size()) >= options.beam) break;
  }
  if (finished.empty()) {
    for (const auto& h : live) {
      finished.push_back({h.tokens, final_score(h.score, h.tokens.size()),
                          false});
    }
  }
  if (finished.empty()) return {};
  return *std::min_element(
      finished.begin(), finished.end(),
      [](const BeamResult& a, const BeamResult& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.tokens < b.tokens;
      });
}

BeamResult Translate(const SpeechTranslator& model,
                     const corpus::Utterance& utterance, const BiasSet* bias,
                     const BeamOptions& options, const StepScorer* scorer) {
  if (model.has_bias() && bias == nullptr) {
    throw std::invalid_argument("bias-enabled model needs a bias set");
  }
  numerics::NoGradGuard no_grad;
  Var memory =
      model.encoder().ForwardSpeech(utterance.speech_frames, 0.0, nullptr);
  if (!model.has_bias()) {
    return BeamSearch(model, memory, nullptr, options, scorer);
  }
  Var bias_vectors(bias->vectors);
  return BeamSearch(model, memory, &bias_vectors, options, scorer);
}

}  // namespace nedict::biasdec
