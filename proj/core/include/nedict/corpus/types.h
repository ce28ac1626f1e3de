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

#ifndef NEDICT_CORPUS_TYPES_H_
#define NEDICT_CORPUS_TYPES_H_

#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "nedict/numerics/tensor.h"

namespace nedict::corpus {

enum class Category { kGpe, kLoc, kPer, kOrg };

inline constexpr Category kAllCategories[] = {Category::kGpe, Category::kLoc,
                                              Category::kPer, Category::kOrg};
// The three categories the metrics report on.
inline constexpr Category kScoredCategories[] = {
    Category::kGpe, Category::kLoc, Category::kPer};

std::string_view CategoryName(Category c);
Category ParseCategory(std::string_view name);
std::string OpenTag(Category c);
std::string CloseTag(Category c);
// Category of a tag token, and whether it opens.
std::optional<std::pair<Category, bool>> ParseTag(std::string_view token);

struct NamedEntity {
  std::string id;
  std::string source_surface;  // space-separated source tokens
  std::vector<int> phonemes;   // canonical pronunciation
  std::string target_form;     // space-separated target tokens
  Category category = Category::kGpe;

  std::vector<std::string> SourceTokens() const;
  std::vector<std::string> TargetTokens() const;
  bool operator==(const NamedEntity&) const = default;
};

// A mention of a dictionary entity over transcript tokens [begin, end).
struct GoldEntity {
  std::string ne_id;
  int begin = 0;
  int end = 0;
  bool operator==(const GoldEntity&) const = default;
};

struct Utterance {
  std::string id;
  std::vector<std::string> transcript_tokens;
  std::vector<int> transcript_phonemes;
  numerics::Tensor speech_frames;    // F x frame_dim
  std::vector<int> frame_alignment;  // frame -> index into transcript_phonemes
  std::vector<std::string> target_tokens;
  std::vector<GoldEntity> gold_entities;

  bool operator==(const Utterance&) const = default;
};

// Pronunciation and translation of one source token.
struct LexiconEntry {
  std::string token;
  std::vector<int> phonemes;
  std::vector<std::string> translation;  // target tokens
  // Letter-by-letter token whose naive phonemizer reading is `homograph`.
  bool acronym = false;
  std::string homograph;

  bool operator==(const LexiconEntry&) const = default;
};

class Lexicon {
 public:
  void Add(LexiconEntry entry);
  bool Contains(std::string_view token) const;
  const LexiconEntry& Get(std::string_view token) const;
  const std::vector<LexiconEntry>& entries() const { return entries_; }

  // Concatenates per-token pronunciations. With `mimic_acronym_failure`,
  // acronym tokens are read as their lower-case homograph instead of being
  // spelled out. Throws std::out_of_range naming any unknown token.
  std::vector<int> Phonemize(std::span<const std::string> tokens,
                             bool mimic_acronym_failure = false) const;

  // Per-token phoneme offsets: offsets[i] is where token i starts, and
  // offsets[n] the total length.
  std::vector<int> PhonemeOffsets(std::span<const std::string> tokens) const;

  bool operator==(const Lexicon& other) const {
    return entries_ == other.entries_;
  }

 private:
  std::vector<LexiconEntry> entries_;
  std::unordered_map<std::string, size_t> index_;
};

// Bidirectional token <-> id table.
class Vocabulary {
 public:
  static constexpr int kBos = 0;
  static constexpr int kEos = 1;

  Vocabulary() = default;
  explicit Vocabulary(std::vector<std::string> tokens);
  int Add(const std::string& token);
  int Id(std::string_view token) const;  // throws for unknown tokens
  std::optional<int> Find(std::string_view token) const;
  const std::string& Token(int id) const;
  int size() const { return static_cast<int>(tokens_.size()); }
  const std::vector<std::string>& tokens() const { return tokens_; }
  std::vector<int> Encode(std::span<const std::string> tokens) const;
  std::vector<std::string> Decode(std::span<const int> ids) const;

  bool operator==(const Vocabulary& other) const {
    return tokens_ == other.tokens_;
  }

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, int> index_;
};

struct Corpus {
  std::vector<std::string> phoneme_inventory;
  numerics::Tensor phoneme_prototypes;  // inventory x frame_dim
  Lexicon lexicon;
  Vocabulary target_vocab;
  std::vector<NamedEntity> dictionary;
  std::map<std::string, std::vector<Utterance>> splits;

  int frame_dim() const { return phoneme_prototypes.cols(); }
  const NamedEntity& Entity(std::string_view id) const;
  const std::vector<Utterance>& Split(const std::string& name) const;

  bool operator==(const Corpus&) const = default;
};

// Checks the structural invariants of a corpus and throws
// std::runtime_error describing the first violation.
void ValidateCorpus(const Corpus& corpus);

// True when `needle` occurs contiguously inside `haystack`.
bool ContainsSubsequence(std::span<const int> haystack,
                         std::span<const int> needle);

std::string JoinTokens(std::span<const std::string> tokens);
std::vector<std::string> SplitTokens(std::string_view text);

}  // namespace nedict::corpus

#endif  // NEDICT_CORPUS_TYPES_H_
