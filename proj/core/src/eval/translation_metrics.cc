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

#include "nedict/eval/translation_metrics.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <stdexcept>

namespace nedict::eval {

namespace {

constexpr int kMaxOrder = 4;

std::map<std::vector<std::string>, int> NgramCounts(const TokenSeq& tokens,
                                                    int n) {
  std::map<std::vector<std::string>, int> counts;
  for (size_t i = 0; i + n <= tokens.size(); ++i) {
    ++counts[std::vector<std::string>(tokens.begin() + i,
                                      tokens.begin() + i + n)];
  }
  return counts;
}

bool ContainsRun(const TokenSeq& haystack, const TokenSeq& needle) {
  if (needle.empty() || needle.size() > haystack.size()) return false;
  return std::search(haystack.begin(), haystack.end(), needle.begin(),
                     needle.end()) != haystack.end();
}

}  // namespace

double CorpusBleu(std::span<const TokenSeq> hypotheses,
                  std::span<const TokenSeq> references) {
  if (hypotheses.size() != references.size()) {
    throw std::invalid_argument("BLEU: hypothesis/reference count mismatch");
  }
  if (hypotheses.empty()) throw std::invalid_argument("BLEU: empty corpus");
  long matches[kMaxOrder] = {};
  long totals[kMaxOrder] = {};
  long hyp_len = 0;
  long ref_len = 0;
  for (size_t s = 0; s < hypotheses.size(); ++s) {
    hyp_len += static_cast<long>(hypotheses[s].size());
    ref_len += static_cast<long>(references[s].size());
    for (int n = 1; n <= kMaxOrder; ++n) {
      const auto hyp = NgramCounts(hypotheses[s], n);
      const auto ref = NgramCounts(references[s], n);
      for (const auto& [gram, c] : hyp) {
        totals[n - 1] += c;
        auto it = ref.find(gram);
        if (it != ref.end()) matches[n - 1] += std::min(c, it->second);
      }
    }
  }
  if (hyp_len == 0) return 0.0;
  // Orders longer than every hypothesis have no n-grams and are left out.
  int orders = 0;
  while (orders < kMaxOrder && totals[orders] > 0) ++orders;
  double log_precision = 0.0;
  double zero_factor = 1.0;
  for (int n = 0; n < orders; ++n) {
    double p;
    if (matches[n] == 0) {
      zero_factor *= 2.0;
      p = 1.0 / (zero_factor * static_cast<double>(totals[n]));
    } else {
      p = static_cast<double>(matches[n]) / static_cast<double>(totals[n]);
    }
    log_precision += std::log(p) / orders;
  }
  const double bp =
      hyp_len < ref_len
          ? std::exp(1.0 - static_cast<double>(ref_len) / hyp_len)
          : 1.0;
  return 100.0 * bp * std::exp(log_precision);
}

TokenSeq StripTags(std::span<const std::string> tokens) {
  TokenSeq out;
  for (const auto& t : tokens) {
    if (!corpus::ParseTag(t)) out.push_back(t);
  }
  return out;
}

EntityAccuracy ComputeEntityAccuracy(
    std::span<const TokenSeq> hypotheses,
    std::span<const corpus::Utterance> utterances,
    const corpus::Corpus& corpus) {
  if (hypotheses.size() != utterances.size()) {
    throw std::invalid_argument("hypotheses do not cover the utterances");
  }
  EntityAccuracy out;
  for (size_t i = 0; i < utterances.size(); ++i) {
    for (const auto& g : utterances[i].gold_entities) {
      const auto& ne = corpus.Entity(g.ne_id);
      auto& [correct, total] = out.counts[ne.category];
      ++total;
      if (ContainsRun(hypotheses[i], ne.TargetTokens())) ++correct;
    }
  }
  double sum = 0.0;
  int present = 0;
  for (const auto& [cat, c] : out.counts) {
    const double acc = static_cast<double>(c.first) / c.second;
    out.accuracy[cat] = acc;
    if (cat != corpus::Category::kOrg) {
      sum += acc;
      ++present;
    }
  }
  out.macro = present ? sum / present : 0.0;
  return out;
}

TranslationReport EvaluateTranslations(
    std::span<const TokenSeq> hypotheses,
    std::span<const corpus::Utterance> utterances,
    const corpus::Corpus& corpus) {
  std::vector<TokenSeq> hyp;
  std::vector<TokenSeq> ref;
  for (size_t i = 0; i < utterances.size(); ++i) {
    hyp.push_back(StripTags(hypotheses[i]));
    ref.push_back(StripTags(utterances[i].target_tokens));
  }
  TranslationReport report;
  report.bleu = CorpusBleu(hyp, ref);
  report.entities = ComputeEntityAccuracy(hypotheses, utterances, corpus);
  return report;
}

std::string FalsePositiveKindName(FalsePositiveKind kind) {
  switch (kind) {
    case FalsePositiveKind::kPartialMatch:
      return "partial_match";
    case FalsePositiveKind::kSimilarPhonetic:
      return "similar_phonetic";
    case FalsePositiveKind::kAcronym:
      return "acronym";
    case FalsePositiveKind::kDifferentFormOrPartial:
      return "different_form_or_partial";
    case FalsePositiveKind::kOther:
      return "other";
  }
  return "other";
}

int EditDistance(std::span<const int> a, std::span<const int> b) {
  std::vector<int> prev(b.size() + 1);
  std::vector<int> cur(b.size() + 1);
  for (size_t j = 0; j <= b.size(); ++j) prev[j] = static_cast<int>(j);
  for (size_t i = 1; i <= a.size(); ++i) {
    cur[0] = static_cast<int>(i);
    for (size_t j = 1; j <= b.size(); ++j) {
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1,
                         prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1)});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

FalsePositiveKind CategorizeFalsePositive(const corpus::NamedEntity& ne,
                                          const corpus::Utterance& utterance) {
  const auto source = ne.SourceTokens();
  for (const auto& t : source) {
    if (std::find(utterance.transcript_tokens.begin(),
                  utterance.transcript_tokens.end(),
                  t) != utterance.transcript_tokens.end()) {
      return FalsePositiveKind::kPartialMatch;
    }
  }
  const std::string& surface = ne.source_surface;
  if (!surface.empty() && surface.size() <= 4 &&
      std::all_of(surface.begin(), surface.end(),
                  [](unsigned char c) { return std::isupper(c); })) {
    return FalsePositiveKind::kAcronym;
  }
  const auto& ph = utterance.transcript_phonemes;
  const int p = static_cast<int>(ne.phonemes.size());
  if (p > 0) {
    int best = p;
    const int lo = std::max(1, p / 2);
    const int hi = std::min<int>(2 * p, static_cast<int>(ph.size()));
    for (int len = lo; len <= hi; ++len) {
      for (size_t s = 0; s + len <= ph.size(); ++s) {
        best = std::min(best,
                        EditDistance(ne.phonemes,
                                     std::span<const int>(ph).subspan(s, len)));
      }
    }
    if (static_cast<double>(best) / p < 0.4) {
      return FalsePositiveKind::kSimilarPhonetic;
    }
  }
  for (const auto& t : ne.TargetTokens()) {
    if (std::find(utterance.target_tokens.begin(),
                  utterance.target_tokens.end(),
                  t) != utterance.target_tokens.end()) {
      return FalsePositiveKind::kDifferentFormOrPartial;
    }
  }
  return FalsePositiveKind::kOther;
}

}  // namespace nedict::eval
