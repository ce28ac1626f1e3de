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

#ifndef NEDICT_RESCORE_FUSION_H_
#define NEDICT_RESCORE_FUSION_H_

#include <optional>
#include <span>
#include <vector>

#include "nedict/biasdec/beam_search.h"
#include "nedict/rescore/ngram_lm.h"

namespace nedict::rescore {

// NE-tag bookkeeping for one hypothesis.
struct FusionState {
  std::optional<corpus::Category> inside_tag;
  std::vector<int> since_open;  // tokens emitted since the open tag

  // Replays the hypothesis tokens. A close tag ends the innermost open NE;
  // a stray close tag outside any NE is ignored.
  static FusionState FromPrefix(std::span<const int> prefix,
                                const corpus::Vocabulary& vocab);
  void Advance(int token, const corpus::Vocabulary& vocab);
};

struct FusionCounters {
  long class_lm = 0;
  long generic_lm = 0;
};

// model_logprobs + lambda * lm_logprobs with the LM picked by the tag state
// (class LM inside an NE, generic LM outside). Tag tokens and tokens outside
// the LM vocabulary keep the model score. With lambda == 0 the input is
// returned unchanged.
void FusedScores(numerics::RowVector& model_logprobs,
                 std::span<const int> prefix, const NgramLM& class_lm,
                 const NgramLM& generic_lm, const corpus::Vocabulary& vocab,
                 double lambda, FusionCounters* counters = nullptr);

biasdec::StepScorer MakeFusionScorer(const NgramLM& class_lm,
                                     const NgramLM& generic_lm,
                                     const corpus::Vocabulary& vocab,
                                     double lambda,
                                     FusionCounters* counters = nullptr);

// Base-model beam search with shallow fusion at every step.
biasdec::BeamResult BeamSearchFused(const biasdec::SpeechTranslator& model,
                                    const corpus::Utterance& utterance,
                                    const NgramLM& class_lm,
                                    const NgramLM& generic_lm,
                                    const corpus::Vocabulary& vocab,
                                    double lambda,
                                    const biasdec::BeamOptions& options,
                                    FusionCounters* counters = nullptr);

}  // namespace nedict::rescore

#endif  // NEDICT_RESCORE_FUSION_H_
