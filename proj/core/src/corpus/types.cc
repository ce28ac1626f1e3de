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

#include "nedict/corpus/types.h"

#include <algorithm>
#include <set>
#include <sstream>
#include <stdexcept>

namespace nedict::corpus {

std::string_view CategoryName(Category c) {
  switch (c) {
    case Category::kGpe:
      return "GPE";
    case Category::kLoc:
      return "LOC";
    case Category::kPer:
      return "PER";
    case Category::kOrg:
      return "ORG";
  }
  return "?";
}

Category ParseCategory(std::string_view name) {
  for (Category c : kAllCategories) {
    if (CategoryName(c) == name) return c;
  }
  throw std::invalid_argument("unknown entity category: " + std::string(name));
}

std::string OpenTag(Category c) {
  return "<" + std::string(CategoryName(c)) + ">";
}

std::string CloseTag(Category c) {
  return "</" + std::string(CategoryName(c)) + ">";
}

std::optional<std::pair<Category, bool>> ParseTag(std::string_view token) {
  if (token.size() < 3 || token.front() != '<' || token.back() != '>') {
    return std::nullopt;
  }
  const bool closing = token[1] == '/';
  std::string_view name =
      token.substr(closing ? 2 : 1, token.size() - (closing ? 3 : 2));
  for (Category c : kAllCategories) {
    if (CategoryName(c) == name) return std::make_pair(c, !closing);
  }
  return std::nullopt;
}

std::vector<std::string> NamedEntity::SourceTokens() const {
  return SplitTokens(source_surface);
}

std::vector<std::string> NamedEntity::TargetTokens() const {
  return SplitTokens(target_form);
}

void Lexicon::Add(LexiconEntry entry) {
  if (index_.count(entry.token) != 0) {
    throw std::invalid_argument("duplicate lexicon token: " + entry.token);
  }
  if (entry.phonemes.empty()) {
    throw std::invalid_argument("lexicon token without phonemes: " +
                                entry.token);
  }
  index_.emplace(entry.token, entries_.size());
  entries_.push_back(std::move(entry));
}

bool Lexicon::Contains(std::string_view token) const {
  return index_.count(std::string(token)) != 0;
}

const LexiconEntry& Lexicon::Get(std::string_view token) const {
  auto it = index_.find(std::string(token));
  if (it == index_.end()) {
    throw std::out_of_range("out-of-vocabulary token: " + std::string(token));
  }
  return entries_[it->second];
}

std::vector<int> Lexicon::Phonemize(std::span<const std::string> tokens,
                                    bool mimic_acronym_failure) const {
  std::vector<int> out;
  std::vector<std::string> unknown;
  for (const std::string& tok : tokens) {
    auto it = index_.find(tok);
    if (it == index_.end()) {
      unknown.push_back(tok);
      continue;
    }
    const LexiconEntry* entry = &entries_[it->second];
    if (mimic_acronym_failure && entry->acronym && !entry->homograph.empty()) {
      entry = &Get(entry->homograph);
    }
    out.insert(out.end(), entry->phonemes.begin(), entry->phonemes.end());
  }
  if (!unknown.empty()) {
    throw std::out_of_range("out-of-vocabulary token(s): " +
                            JoinTokens(unknown));
  }
  return out;
}

std::vector<int> Lexicon::PhonemeOffsets(
    std::span<const std::string> tokens) const {
  std::vector<int> offsets{0};
  for (const std::string& tok : tokens) {
    offsets.push_back(offsets.back() +
                      static_cast<int>(Get(tok).phonemes.size()));
  }
  return offsets;
}

Vocabulary::Vocabulary(std::vector<std::string> tokens) {
  for (auto& t : tokens) Add(t);
}

int Vocabulary::Add(const std::string& token) {
  auto it = index_.find(token);
  if (it != index_.end()) return it->second;
  const int id = static_cast<int>(tokens_.size());
  tokens_.push_back(token);
  index_.emplace(token, id);
  return id;
}

int Vocabulary::Id(std::string_view token) const {
  auto found = Find(token);
  if (!found) {
    throw std::out_of_range("unknown target token: " + std::string(token));
  }
  return *found;
}

std::optional<int> Vocabulary::Find(std::string_view token) const {
  auto it = index_.find(std::string(token));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

const std::string& Vocabulary::Token(int id) const {
  if (id < 0 || id >= size()) {
    throw std::out_of_range("target id out of range: " + std::to_string(id));
  }
  return tokens_[id];
}

std::vector<int> Vocabulary::Encode(std::span<const std::string> tokens) const {
  std::vector<int> ids;
  ids.reserve(tokens.size());
  for (const auto& t : tokens) ids.push_back(Id(t));
  return ids;
}

std::vector<std::string> Vocabulary::Decode(std::span<const int> ids) const {
  std::vector<std::string> out;
  out.reserve(ids.size());
  for (int id : ids) out.push_back(Token(id));
  return out;
}

const NamedEntity& Corpus::Entity(std::string_view id) const {
  for (const auto& ne : dictionary) {
    if (ne.id == id) return ne;
  }
  throw std::out_of_range("unknown entity id: " + std::string(id));
}

const std::vector<Utterance>& Corpus::Split(const std::string& name) const {
  auto it = splits.find(name);
  if (it == splits.end()) {
    throw std::out_of_range("corpus has no split '" + name + "'");
  }
  return it->second;
}

bool ContainsSubsequence(std::span<const int> haystack,
                         std::span<const int> needle) {
  if (needle.empty()) return true;
  return std::search(haystack.begin(), haystack.end(), needle.begin(),
                     needle.end()) != haystack.end();
}

std::string JoinTokens(std::span<const std::string> tokens) {
  std::string out;
  for (size_t i = 0; i < tokens.size(); ++i) {
    if (i) out += ' ';
    out += tokens[i];
  }
  return out;
}

std::vector<std::string> SplitTokens(std::string_view text) {
  std::vector<std::string> out;
  std::istringstream in{std::string(text)};
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

namespace {

[[noreturn]] void Fail(const std::string& where, const std::string& what) {
  throw std::runtime_error("invalid corpus: " + where + ": " + what);
}

void ValidateTags(const Utterance& u) {
  std::vector<Category> open;
  for (const auto& tok : u.target_tokens) {
    auto tag = ParseTag(tok);
    if (!tag) continue;
    if (tag->second) {
      open.push_back(tag->first);
    } else if (open.empty() || open.back() != tag->first) {
      Fail(u.id, "unpaired closing tag " + tok);
    } else {
      open.pop_back();
    }
  }
  if (!open.empty()) Fail(u.id, "unclosed entity tag");
}

}  // namespace

void ValidateCorpus(const Corpus& corpus) {
  std::unordered_map<std::string, const NamedEntity*> by_id;
  std::set<std::pair<std::string, Category>> surfaces;
  for (const auto& ne : corpus.dictionary) {
    if (ne.phonemes.empty()) Fail(ne.id, "entity without phonemes");
    if (!by_id.emplace(ne.id, &ne).second) Fail(ne.id, "duplicate entity id");
    if (!surfaces.emplace(ne.source_surface, ne.category).second) {
      Fail(ne.id, "duplicate (surface, category) " + ne.source_surface);
    }
  }
  const int inventory = static_cast<int>(corpus.phoneme_inventory.size());
  std::set<std::string> seen_ids;
  for (const auto& [split, utterances] : corpus.splits) {
    for (const auto& u : utterances) {
      if (!seen_ids.insert(u.id).second) {
        Fail(u.id, "utterance id appears in more than one place");
      }
      const auto phonemes = corpus.lexicon.Phonemize(u.transcript_tokens);
      if (phonemes != u.transcript_phonemes) {
        Fail(u.id, "transcript phonemes disagree with the lexicon");
      }
      for (int p : phonemes) {
        if (p < 0 || p >= inventory) Fail(u.id, "phoneme id out of range");
      }
      const int frames = u.speech_frames.rows();
      if (frames < static_cast<int>(phonemes.size())) {
        Fail(u.id, "fewer frames than phonemes");
      }
      if (frames > 0 && u.speech_frames.cols() != corpus.frame_dim()) {
        Fail(u.id, "frame dimension mismatch");
      }
      if (static_cast<int>(u.frame_alignment.size()) != frames) {
        Fail(u.id, "alignment length differs from frame count");
      }
      for (size_t f = 0; f < u.frame_alignment.size(); ++f) {
        const int a = u.frame_alignment[f];
        if (a < 0 || a >= static_cast<int>(phonemes.size()) ||
            (f > 0 && a < u.frame_alignment[f - 1])) {
          Fail(u.id, "alignment is not a monotone map onto phonemes");
        }
      }
      ValidateTags(u);
      const auto offsets = corpus.lexicon.PhonemeOffsets(u.transcript_tokens);
      const int n = static_cast<int>(u.transcript_tokens.size());
      for (const auto& g : u.gold_entities) {
        auto it = by_id.find(g.ne_id);
        if (it == by_id.end()) Fail(u.id, "unknown entity id " + g.ne_id);
        if (g.begin < 0 || g.end > n || g.begin >= g.end) {
          Fail(u.id, "entity span out of range");
        }
        std::span<const int> span(u.transcript_phonemes.data() +
                                      offsets[g.begin],
                                  offsets[g.end] - offsets[g.begin]);
        if (!std::equal(span.begin(), span.end(),
                        it->second->phonemes.begin(),
                        it->second->phonemes.end())) {
          Fail(u.id, "entity " + g.ne_id +
                         " span does not match its phonemes");
        }
      }
    }
  }
}

}  // namespace nedict::corpus
