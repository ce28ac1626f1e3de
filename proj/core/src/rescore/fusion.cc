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

#include "nedict/rescore/fusion.h"

#include <stdexcept>

namespace nedict::rescore {

FusionState FusionState::FromPrefix(std::span<const int> prefix,
                                    const corpus::Vocabulary& vocab) {
  FusionState state;
  for (int t : prefix) state.Advance(t, vocab);
  return state;
}

void FusionState::Advance(int token, const corpus::Vocabulary& vocab) {
  const auto tag = corpus::ParseTag(vocab.Token(token));
  if (!tag) {
    if (inside_tag) since_open.push_back(token);
    return;
  }
  if (tag->second) {
    inside_tag = tag->first;
    since_open.clear();
  } else if (inside_tag) {
    inside_tag.reset();
    since_open.clear();
  }
}

void FusedScores(numerics::RowVector& model_logprobs,
                 std::span<const int> prefix, const NgramLM& class_lm,
                 const NgramLM& generic_lm, const corpus::Vocabulary& vocab,
                 double lambda, FusionCounters* counters) {
  if (lambda < 0.0) throw std::invalid_argument("lambda must be >= 0");
  if (lambda == 0.0) return;
  const FusionState state = FusionState::FromPrefix(prefix, vocab);
  const NgramLM& lm = state.inside_tag ? class_lm : generic_lm;
  if (counters != nullptr) {
    ++(state.inside_tag ? counters->class_lm : counters->generic_lm);
  }
  const numerics::RowVector lm_logprobs = lm.LogProbs(LmContext(prefix, vocab));
  for (Eigen::Index v = 0; v < model_logprobs.cols(); ++v) {
    if (lm.InVocabulary(static_cast<int>(v))) {
      model_logprobs(v) += lambda * lm_logprobs(v);
    }
  }
}

biasdec::StepScorer MakeFusionScorer(const NgramLM& class_lm,
                                     const NgramLM& generic_lm,
                                     const corpus::Vocabulary& vocab,
                                     double lambda,
                                     FusionCounters* counters) {
  return [&class_lm, &generic_lm, &vocab, lambda, counters](
             std::span<const int> prefix, numerics::RowVector& scores) {
    FusedScores(scores, prefix, class_lm, generic_lm, vocab, lambda, counters);
  };
}

biasdec::BeamResult BeamSearchFused(const biasdec::SpeechTranslator& model,
                                    const corpus::Utterance& utterance,
                                    const NgramLM& class_lm,
                                    const NgramLM& generic_lm,
                                    const corpus::Vocabulary& vocab,
                                    double lambda,
                                    const biasdec::BeamOptions& options,
                                    FusionCounters* counters) {
  if (model.has_bias()) {
    throw std::invalid_argument("fused decoding expects the base model");
  }
  const biasdec::StepScorer scorer =
      MakeFusionScorer(class_lm, generic_lm, vocab, lambda, counters);
  return biasdec::Translate(model, utterance, nullptr, options, &scorer);
}

}  // namespace nedict::rescore
