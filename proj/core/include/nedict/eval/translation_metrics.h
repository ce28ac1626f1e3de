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

#ifndef NEDICT_EVAL_TRANSLATION_METRICS_H_
#define NEDICT_EVAL_TRANSLATION_METRICS_H_

#include <map>
#include <span>
#include <string>
#include <vector>

#include "nedict/corpus/types.h"

namespace nedict::eval {

using TokenSeq = std::vector<std::string>;

// Corpus BLEU in [0, 100]: clipped 1-4 gram precisions, geometric mean,
// brevity penalty. An n-gram order with zero matches gets precision
// 1 / (2^k * total) where k counts zero-match orders so far. Orders with no
// hypothesis n-grams at all (every hypothesis shorter than n) are skipped.
double CorpusBleu(std::span<const TokenSeq> hypotheses,
                  std::span<const TokenSeq> references);

// Drops NE tag tokens.
TokenSeq StripTags(std::span<const std::string> tokens);

struct EntityAccuracy {
  std::map<corpus::Category, double> accuracy;  // categories with gold only
  std::map<corpus::Category, std::pair<long, long>> counts;  // correct, total
  // Mean over the scored categories that have gold mentions.
  double macro = 0.0;
};

// A gold mention is correct when its target form occurs, case-sensitively,
// as a contiguous token run of the hypothesis.
EntityAccuracy ComputeEntityAccuracy(
    std::span<const TokenSeq> hypotheses,
    std::span<const corpus::Utterance> utterances,
    const corpus::Corpus& corpus);

struct TranslationReport {
  double bleu = 0.0;
  EntityAccuracy entities;
};

TranslationReport EvaluateTranslations(
    std::span<const TokenSeq> hypotheses,
    std::span<const corpus::Utterance> utterances,
    const corpus::Corpus& corpus);

enum class FalsePositiveKind {
  kPartialMatch,
  kSimilarPhonetic,
  kAcronym,
  kDifferentFormOrPartial,
  kOther
};

std::string FalsePositiveKindName(FalsePositiveKind kind);

// Heuristic triage of a confirmed false positive, first rule wins:
// a source token shared with the transcript -> partial match; an all-caps
// surface of at most 4 characters -> acronym; phoneme edit distance below
// 0.4 of the NE length to some transcript span -> similar phonetic; a
// target token shared with the reference translation -> different form or
// partial; otherwise other.
FalsePositiveKind CategorizeFalsePositive(const corpus::NamedEntity& ne,
                                          const corpus::Utterance& utterance);

// Levenshtein distance over phoneme ids.
int EditDistance(std::span<const int> a, std::span<const int> b);

}  // namespace nedict::eval

#endif  // NEDICT_EVAL_TRANSLATION_METRICS_H_
