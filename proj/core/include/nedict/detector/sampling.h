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

#ifndef NEDICT_DETECTOR_SAMPLING_H_
#define NEDICT_DETECTOR_SAMPLING_H_

#include <span>
#include <string>
#include <vector>

#include "nedict/corpus/types.h"
#include "nedict/numerics/parameters.h"

namespace nedict::detector {

enum class Provenance { kNe, kRandomWords };

struct TextSample {
  std::vector<int> phonemes;
  Provenance provenance = Provenance::kRandomWords;
  std::string source;  // NE id, or the sampled surface words
  int words = 0;
};

struct TrainingPair {
  std::string utterance_id;
  TextSample positive;
  TextSample negative;
};

struct SamplingConfig {
  double ne_prob = 0.8;  // chance of an NE positive when the utterance has one
  int max_words = 5;
  int max_retries = 64;
};

// Draws a positive from batch[index] and a negative from another batch
// member. Negatives are rejected while their phonemes occur contiguously in
// the examined transcript. Throws std::runtime_error when no valid negative
// is found within the retry budget.
TrainingPair SampleTrainingPair(
    std::span<const corpus::Utterance* const> batch, size_t index,
    const corpus::Corpus& corpus, const SamplingConfig& config,
    numerics::Rng& rng);

}  // namespace nedict::detector

#endif  // NEDICT_DETECTOR_SAMPLING_H_
