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

#ifndef NEDICT_CORPUS_GENERATOR_H_
#define NEDICT_CORPUS_GENERATOR_H_

#include <cstdint>

#include "nedict/corpus/types.h"

namespace nedict::corpus {

// Inclusive count range.
struct CountRange {
  int min = 1;
  int max = 1;
};

struct CorpusConfig {
  int num_phonemes = 40;  // at most 40: fixed consonant/vowel name table
  int frame_dim = 32;
  int num_syllables = 48;
  int num_common_words = 150;
  int spelling_variants = 3;  // homophone spellings per syllable

  int dictionary_size = 294;
  double org_share = 0.15;
  int num_acronyms = 4;
  // Share of PER first names reused across several people.
  double shared_first_name_share = 0.4;
  // Share of GPE/LOC entities derived from another by swapping one syllable.
  double similar_phonetic_share = 0.1;

  int num_train = 2000;
  int num_dev = 100;
  int num_test = 200;
  CountRange words_per_utterance{3, 6};
  int max_entities_per_utterance = 2;

  // Training mentions per dictionary entity, by category.
  CountRange train_mentions_gpe{3, 10};
  CountRange train_mentions_loc{3, 10};
  CountRange train_mentions_per{1, 3};
  CountRange train_mentions_org{1, 3};

  // Mean GPE/LOC/PER mentions per dev/test utterance.
  double test_ne_density = 0.34;
  // Additional ORG mentions per dev/test utterance.
  double test_org_density = 0.03;

  double noise_sigma = 0.3;
  int min_duration = 1;
  int max_duration = 4;
};

// Builds a synthetic corpus. Throws std::invalid_argument when the config
// cannot be realized (for example more entities than distinct names).
Corpus GenerateCorpus(const CorpusConfig& config, uint64_t seed);

}  // namespace nedict::corpus

#endif  // NEDICT_CORPUS_GENERATOR_H_
