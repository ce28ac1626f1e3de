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

// Fixed-seed CLAS fixtures and the bias-order invariance probe, shared by
// the unit tests and the acceptance runner.

#ifndef NEDICT_TESTS_ACCEPTANCE_IDENTITY_SUITE_H_
#define NEDICT_TESTS_ACCEPTANCE_IDENTITY_SUITE_H_

#include <array>
#include <cstdint>
#include <vector>

#include "nedict/biasdec/beam_search.h"
#include "nedict/biasdec/translator.h"
#include "nedict/corpus/types.h"

namespace nedict::checks {

// Tiny translator shape over the tiny test corpus.
biasdec::TranslatorConfig TinyArch();

// A bias-enabled tiny model with every weight moved off its initial value
// so the bias path is active.
biasdec::SpeechTranslator ActiveClas(biasdec::BiasMethod method,
                                     uint64_t seed);

std::vector<const corpus::NamedEntity*> FirstEntities(int n);

numerics::Matrix LogSoftmaxRows(const numerics::Matrix& logits);

// Recorded empty-bias decode of ActiveClas(kParallel, 21) on the first tiny
// test utterance with max_length 8.
inline constexpr uint64_t kGoldenSeed = 21;
inline constexpr std::array<int, 8> kGoldenEmptyBiasTokens = {
    50, 33, 12, 122, 33, 12, 33, 12};
inline constexpr double kGoldenEmptyBiasScore = -2.2195285619838692;

struct GoldenDecode {
  std::vector<int> tokens;
  double score = 0.0;
  bool matches = false;
};
GoldenDecode DecodeGoldenEmptyBias();

struct PermutationProbe {
  double max_log_prob_gap = 0.0;  // over every decoder step of the reference
  bool same_tokens = false;       // beam outputs of both orders
};

// Scores the utterance's reference under `entities` and under a fixed
// permutation of them.
PermutationProbe ProbeBiasPermutation(
    const biasdec::SpeechTranslator& model, const corpus::Utterance& utt,
    std::vector<const corpus::NamedEntity*> entities,
    const corpus::Vocabulary& vocab, const biasdec::BeamOptions& opts);

// The same probe on the first tiny test utterance with ActiveClas(method, 11)
// and the first five tiny-corpus entities.
PermutationProbe ProbeTinyPermutation(biasdec::BiasMethod method);

}  // namespace nedict::checks

#endif  // NEDICT_TESTS_ACCEPTANCE_IDENTITY_SUITE_H_
