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

#include "nedict/detector/sampling.h"

#include <algorithm>
#include <random>
#include <stdexcept>

namespace nedict::detector {

namespace {

TextSample RandomWords(const corpus::Utterance& u,
                       const corpus::Lexicon& lexicon, int max_words,
                       numerics::Rng& rng) {
  const auto& tokens = u.transcript_tokens;
  const int n = static_cast<int>(tokens.size());
  const int longest = std::min(max_words, n);
  const int len = std::uniform_int_distribution<int>(1, longest)(rng);
  const int start = std::uniform_int_distribution<int>(0, n - len)(rng);
  const auto offsets = lexicon.PhonemeOffsets(tokens);
  TextSample s;
  s.provenance = Provenance::kRandomWords;
  s.words = len;
  s.phonemes.assign(u.transcript_phonemes.begin() + offsets[start],
                    u.transcript_phonemes.begin() + offsets[start + len]);
  s.source = corpus::JoinTokens(
      std::span<const std::string>(tokens).subspan(start, len));
  return s;
}

TextSample GoldEntity(const corpus::Utterance& u, const corpus::Corpus& corpus,
                      numerics::Rng& rng) {
  const auto& g = u.gold_entities[std::uniform_int_distribution<size_t>(
      0, u.gold_entities.size() - 1)(rng)];
  const auto& ne = corpus.Entity(g.ne_id);
  TextSample s;
  s.provenance = Provenance::kNe;
  s.phonemes = ne.phonemes;
  s.source = ne.id;
  s.words = g.end - g.begin;
  return s;
}

}  // namespace

TrainingPair SampleTrainingPair(
    std::span<const corpus::Utterance* const> batch, size_t index,
    const corpus::Corpus& corpus, const SamplingConfig& config,
    numerics::Rng& rng) {
  if (batch.size() < 2) {
    throw std::invalid_argument("pair sampling needs at least 2 utterances");
  }
  if (index >= batch.size()) throw std::out_of_range("batch index");
  if (config.max_words < 1) throw std::invalid_argument("max_words < 1");
  const corpus::Utterance& u = *batch[index];
  if (u.transcript_tokens.empty()) {
    throw std::invalid_argument("utterance " + u.id + " has no words");
  }

  TrainingPair pair;
  pair.utterance_id = u.id;
  const bool use_ne = !u.gold_entities.empty() &&
                      std::bernoulli_distribution(config.ne_prob)(rng);
  pair.positive = use_ne ? GoldEntity(u, corpus, rng)
                         : RandomWords(u, corpus.lexicon, config.max_words,
                                       rng);

  std::uniform_int_distribution<size_t> other(0, batch.size() - 2);
  for (int attempt = 0; attempt < config.max_retries; ++attempt) {
    size_t j = other(rng);
    if (j >= index) ++j;
    const corpus::Utterance& v = *batch[j];
    if (v.transcript_tokens.empty()) continue;
    TextSample neg = (use_ne && !v.gold_entities.empty())
                         ? GoldEntity(v, corpus, rng)
                         : RandomWords(v, corpus.lexicon, config.max_words,
                                       rng);
    if (!corpus::ContainsSubsequence(u.transcript_phonemes, neg.phonemes)) {
      pair.negative = std::move(neg);
      return pair;
    }
  }
  throw std::runtime_error("no negative absent from utterance " + u.id +
                           " after " + std::to_string(config.max_retries) +
                           " attempts");
}

}  // namespace nedict::detector
