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

#ifndef NEDICT_BIASDEC_BEAM_SEARCH_H_
#define NEDICT_BIASDEC_BEAM_SEARCH_H_

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "nedict/biasdec/translator.h"

namespace nedict::biasdec {

// Adjusts next-token scores in place. `prefix` holds the hypothesis tokens
// emitted so far (no BOS); `scores` arrives as decoder log-probabilities.
using StepScorer =
    std::function<void(std::span<const int> prefix, numerics::RowVector& scores)>;

struct BeamOptions {
  int beam = 5;
  int max_length = 48;
  bool length_normalize = true;
};

struct BeamResult {
  std::vector<int> tokens;  // without BOS/EOS
  double score = 0.0;       // final (normalized when enabled) score
  bool finished = false;    // ended with EOS
};

// Beam search over the decoder. Equal scores are broken towards the lower
// token id, then the earlier hypothesis, so results are deterministic.
BeamResult BeamSearch(const SpeechTranslator& model,
                      const numerics::Var& memory, const numerics::Var* bias,
                      const BeamOptions& options,
                      const StepScorer* scorer = nullptr);

// Encodes the utterance speech and decodes it, with bias attention over
// `bias` when the model has it.
BeamResult Translate(const SpeechTranslator& model,
                     const corpus::Utterance& utterance, const BiasSet* bias,
                     const BeamOptions& options,
                     const StepScorer* scorer = nullptr);

}  // namespace nedict::biasdec

#endif  // NEDICT_BIASDEC_BEAM_SEARCH_H_
