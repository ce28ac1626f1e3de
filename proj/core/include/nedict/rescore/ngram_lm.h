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

#ifndef NEDICT_RESCORE_NGRAM_LM_H_
#define NEDICT_RESCORE_NGRAM_LM_H_

#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "nedict/corpus/types.h"
#include "nedict/numerics/tensor.h"

namespace nedict::rescore {

struct NgramOptions {
  int order = 3;
  double add_k = 0.1;     // unigram smoothing constant
  double backoff = 0.4;   // stupid-backoff multiplier per dropped order
};

// Token n-gram LM over a target vocabulary. Scores follow stupid backoff
// (relative frequency at the longest seen context, times `backoff` per
// dropped order, add-k unigrams at the bottom) and are renormalized over the
// LM vocabulary per context, so every context gives a proper distribution.
// BOS and NE tag tokens are outside the LM vocabulary; tags reset context.
class NgramLM {
 public:
  NgramLM(const corpus::Vocabulary& vocab, const NgramOptions& options);

  // Adds one sentence. Tag tokens split it into independently-counted
  // segments; EOS is appended to the last segment.
  void AddSentence(std::span<const int> tokens);

  // Log-probabilities over the full target vocabulary for the next token
  // after `context` (only its last order-1 tokens matter). Entries outside
  // the LM vocabulary are -infinity.
  numerics::RowVector LogProbs(std::span<const int> context) const;
  double LogProb(std::span<const int> context, int token) const;

  // True for tokens the LM scores.
  bool InVocabulary(int token) const;
  const NgramOptions& options() const { return options_; }
  long total_tokens() const { return total_; }

  // Per-token perplexity of sentences under the same segmentation rules.
  double Perplexity(std::span<const std::vector<int>> sentences) const;

  void Save(const std::filesystem::path& path) const;
  static NgramLM Load(const std::filesystem::path& path,
                      const corpus::Vocabulary& vocab);

 private:
  void CountSegment(std::span<const int> segment, bool append_eos);

  const corpus::Vocabulary* vocab_;
  NgramOptions options_;
  std::vector<bool> in_vocab_;
  int lm_vocab_size_ = 0;
  // Context (oldest first) -> successor counts; the empty context holds
  // unigram counts.
  std::map<std::vector<int>, std::map<int, long>> counts_;
  std::map<std::vector<int>, long> context_totals_;
  long total_ = 0;
};

// Class LM over dictionary NE target forms (one sentence per form).
NgramLM TrainClassLm(std::span<const corpus::NamedEntity> entities,
                     const corpus::Vocabulary& vocab,
                     const NgramOptions& options = {});

// Generic LM over the target side of utterances.
NgramLM TrainGenericLm(std::span<const corpus::Utterance> utterances,
                       const corpus::Vocabulary& vocab,
                       const NgramOptions& options = {});

// Tokens after the most recent tag (or from the start).
std::vector<int> LmContext(std::span<const int> prefix,
                           const corpus::Vocabulary& vocab);

}  // namespace nedict::rescore

#endif  // NEDICT_RESCORE_NGRAM_LM_H_
