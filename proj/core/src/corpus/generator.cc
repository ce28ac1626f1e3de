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

#include "nedict/corpus/generator.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <iomanip>
#include <memory>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>

#include "nedict/corpus/speech.h"

namespace nedict::corpus {
namespace {

using Rng = std::mt19937_64;

constexpr const char* kConsonants[] = {
    "b", "d", "f", "g", "k", "l",  "m",  "n",  "p",  "r",
    "s", "t", "v", "z", "sh", "ch", "th", "j",  "w",  "y",
    "h", "x", "q", "c", "ng", "zh", "dh", "kh"};
constexpr const char* kVowels[] = {"a",  "e",  "i",  "o",  "u",  "ai",
                                   "au", "ei", "oi", "ou", "aa", "ee"};

// Words that only occur inside multi-word entity names.
struct FunctionWord {
  const char* source;
  const char* target;
};
constexpr FunctionWord kFunctionWords[] = {
    {"Treaty", "Tratado"}, {"of", "de"},       {"Committee", "Comite"},
    {"Bank", "Banco"},     {"Council", "Consejo"}, {"Mount", "Monte"},
    {"River", "Rio"},      {"Lake", "Lago"}};

struct Syllable {
  int consonant;
  int vowel;
  std::string roman;
  std::vector<std::string> spellings;
};

std::string Capitalize(std::string s) {
  if (!s.empty()) s[0] = static_cast<char>(std::toupper(s[0]));
  return s;
}

int Uniform(Rng& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

int Uniform(Rng& rng, const CountRange& r) { return Uniform(rng, r.min, r.max); }

bool Bernoulli(Rng& rng, double p) {
  return std::uniform_real_distribution<double>(0.0, 1.0)(rng) < p;
}

template <typename T>
const T& Pick(Rng& rng, const std::vector<T>& items) {
  return items[static_cast<size_t>(
      Uniform(rng, 0, static_cast<int>(items.size()) - 1))];
}

std::string PaddedId(const std::string& prefix, int i, int width) {
  std::ostringstream out;
  out << prefix << std::setw(width) << std::setfill('0') << i;
  return out.str();
}

void CheckConfig(const CorpusConfig& c) {
  auto require = [](bool ok, const std::string& what) {
    if (!ok) throw std::invalid_argument("infeasible corpus config: " + what);
  };
  require(c.num_phonemes >= 6 && c.num_phonemes <= 40,
          "num_phonemes must lie in [6, 40]");
  require(c.frame_dim > 0, "frame_dim must be positive");
  require(c.spelling_variants >= 1 && c.spelling_variants <= 4,
          "spelling_variants must lie in [1, 4]");
  require(c.num_common_words >= 4, "need at least 4 common words");
  require(c.dictionary_size >= 4, "dictionary_size must be at least 4");
  require(c.org_share >= 0.0 && c.org_share < 1.0, "org_share in [0, 1)");
  require(c.words_per_utterance.min >= 1 &&
              c.words_per_utterance.max >= c.words_per_utterance.min,
          "words_per_utterance range");
  require(c.max_entities_per_utterance >= 1,
          "max_entities_per_utterance must be positive");
  for (const CountRange* r :
       {&c.train_mentions_gpe, &c.train_mentions_loc, &c.train_mentions_per,
        &c.train_mentions_org}) {
    require(r->min >= 1 && r->max >= r->min,
            "every entity needs at least one training mention");
  }
  require(c.test_ne_density >= 0.0 && c.test_org_density >= 0.0,
          "densities must be non-negative");
  require(c.test_ne_density + c.test_org_density <=
              c.max_entities_per_utterance,
          "test density exceeds max_entities_per_utterance");
  require(static_cast<long>(c.dictionary_size) * c.train_mentions_gpe.min <=
              static_cast<long>(c.num_train) * c.max_entities_per_utterance,
          "dictionary larger than the realizable training mentions");
  require(c.noise_sigma >= 0.0, "noise_sigma must be non-negative");
}

class Builder {
 public:
  Builder(const CorpusConfig& config, uint64_t seed)
      : config_(config), rng_(seed) {}

  Corpus Build();

 private:
  void MakeInventory();
  void MakeSyllables();
  void MakeCommonWords();
  void MakeAcronymLetters();
  std::vector<int> FreshPronunciation(int min_len, int max_len);
  // A new capitalized entity word; `base` (optional) is perturbed by one
  // syllable to create a phonetically similar word.
  std::string NewNameWord(const std::vector<int>* base_syllables = nullptr);
  void AddEntity(Category cat, const std::vector<std::string>& tokens);
  void MakeDictionary();
  Utterance MakeUtterance(const std::string& id,
                          const std::vector<const NamedEntity*>& entities);
  void MakeTrain();
  void MakeHeldOut(const std::string& split, int count);

  const CorpusConfig& config_;
  Rng rng_;
  Corpus corpus_;
  std::vector<Syllable> syllables_;
  std::vector<std::string> common_pool_;  // tokens usable as filler words
  std::set<std::vector<int>> used_pronunciations_;
  std::set<std::string> used_target_tokens_;
  std::vector<std::string> letter_tokens_;
  std::vector<std::string> name_words_;
  std::unordered_map<std::string, std::vector<int>> name_syllables_;
  std::vector<std::string> gpe_words_;
  int entity_counter_ = 0;
  std::unique_ptr<SpeechSynthesizer> synth_;
};

void Builder::MakeInventory() {
  const int nc = std::max(
      3, static_cast<int>(std::lround(config_.num_phonemes * 0.7)));
  const int nv = config_.num_phonemes - nc;
  for (int i = 0; i < nc; ++i) corpus_.phoneme_inventory.push_back(kConsonants[i]);
  for (int i = 0; i < nv; ++i) corpus_.phoneme_inventory.push_back(kVowels[i]);
  std::normal_distribution<double> normal(0.0, 1.0);
  numerics::Matrix protos(config_.num_phonemes, config_.frame_dim);
  for (Eigen::Index i = 0; i < protos.size(); ++i) {
    protos.data()[i] = static_cast<double>(static_cast<float>(normal(rng_)));
  }
  corpus_.phoneme_prototypes = numerics::Tensor(std::move(protos));
}

void Builder::MakeSyllables() {
  const int nc = static_cast<int>(std::lround(config_.num_phonemes * 0.7));
  const int nc_eff = std::max(3, nc);
  const int nv = config_.num_phonemes - nc_eff;
  std::vector<std::pair<int, int>> pairs;
  for (int c = 0; c < nc_eff; ++c) {
    for (int v = 0; v < nv; ++v) pairs.emplace_back(c, nc_eff + v);
  }
  std::shuffle(pairs.begin(), pairs.end(), rng_);
  const int count = std::min<int>(config_.num_syllables, pairs.size());
  std::set<std::string> romans;
  for (int i = 0; i < static_cast<int>(pairs.size()) &&
                  static_cast<int>(syllables_.size()) < count;
       ++i) {
    Syllable s;
    s.consonant = pairs[i].first;
    s.vowel = pairs[i].second;
    s.roman = corpus_.phoneme_inventory[s.consonant] +
              corpus_.phoneme_inventory[s.vowel];
    if (!romans.insert(s.roman).second) continue;
    std::vector<std::string> candidates = {
        s.roman, Capitalize(s.roman),
        s.roman.substr(0, 1) + "h" + s.roman.substr(1), s.roman + "h"};
    for (int v = 0; v < config_.spelling_variants; ++v) {
      std::string sp = candidates[v];
      while (used_target_tokens_.count(sp)) sp += "y";
      used_target_tokens_.insert(sp);
      s.spellings.push_back(sp);
    }
    syllables_.push_back(std::move(s));
  }
  if (syllables_.size() < 4) {
    throw std::invalid_argument("infeasible corpus config: too few syllables");
  }
}

std::vector<int> Builder::FreshPronunciation(int min_len, int max_len) {
  for (int attempt = 0; attempt < 10000; ++attempt) {
    std::vector<int> p(Uniform(rng_, min_len, max_len));
    for (int& x : p) x = Uniform(rng_, 0, config_.num_phonemes - 1);
    if (used_pronunciations_.insert(p).second) return p;
  }
  throw std::invalid_argument(
      "infeasible corpus config: cannot find distinct pronunciations");
}

void Builder::MakeCommonWords() {
  for (int i = 0; i < config_.num_common_words; ++i) {
    LexiconEntry e;
    e.token = "tok" + std::to_string(i);
    e.phonemes = FreshPronunciation(2, 3);
    e.translation = {"mot" + std::to_string(i)};
    used_target_tokens_.insert(e.translation[0]);
    common_pool_.push_back(e.token);
    corpus_.lexicon.Add(std::move(e));
  }
  for (const auto& fw : kFunctionWords) {
    LexiconEntry e;
    e.token = fw.source;
    e.phonemes = FreshPronunciation(2, 3);
    e.translation = {fw.target};
    used_target_tokens_.insert(fw.target);
    corpus_.lexicon.Add(std::move(e));
  }
}

void Builder::MakeAcronymLetters() {
  for (char ch = 'A'; ch <= 'Z'; ++ch) {
    letter_tokens_.push_back(std::string(1, ch));
  }
}

std::string Builder::NewNameWord(const std::vector<int>* base_syllables) {
  for (int attempt = 0; attempt < 10000; ++attempt) {
    std::vector<int> syl;
    if (base_syllables != nullptr) {
      syl = *base_syllables;
      const int at = Uniform(rng_, 0, static_cast<int>(syl.size()) - 1);
      syl[at] = Uniform(rng_, 0, static_cast<int>(syllables_.size()) - 1);
    } else {
      const int len = Bernoulli(rng_, 0.2) ? 3 : 2;
      syl.resize(len);
      for (int& s : syl) {
        s = Uniform(rng_, 0, static_cast<int>(syllables_.size()) - 1);
      }
    }
    // Repeated syllables would make spellings position-dependent.
    std::set<int> distinct(syl.begin(), syl.end());
    if (distinct.size() != syl.size()) continue;
    std::string roman;
    std::vector<int> phonemes;
    std::vector<std::string> spelled;
    for (int s : syl) {
      roman += syllables_[s].roman;
      phonemes.push_back(syllables_[s].consonant);
      phonemes.push_back(syllables_[s].vowel);
      spelled.push_back(syllables_[s].spellings[Uniform(
          rng_, 0, config_.spelling_variants - 1)]);
    }
    const std::string token = Capitalize(roman);
    if (corpus_.lexicon.Contains(token) ||
        used_pronunciations_.count(phonemes)) {
      continue;
    }
    used_pronunciations_.insert(phonemes);
    LexiconEntry e;
    e.token = token;
    e.phonemes = phonemes;
    e.translation = spelled;
    corpus_.lexicon.Add(std::move(e));
    name_words_.push_back(token);
    name_syllables_[token] = syl;
    return token;
  }
  throw std::invalid_argument(
      "infeasible corpus config: ran out of distinct entity names");
}

void Builder::AddEntity(Category cat, const std::vector<std::string>& tokens) {
  NamedEntity ne;
  ne.id = PaddedId("ne", entity_counter_++, 4);
  ne.source_surface = JoinTokens(tokens);
  ne.phonemes = corpus_.lexicon.Phonemize(tokens);
  std::vector<std::string> target;
  for (const auto& t : tokens) {
    const auto& tr = corpus_.lexicon.Get(t).translation;
    target.insert(target.end(), tr.begin(), tr.end());
  }
  ne.target_form = JoinTokens(target);
  ne.category = cat;
  corpus_.dictionary.push_back(std::move(ne));
}

void Builder::MakeDictionary() {
  const int total = config_.dictionary_size;
  const int n_org = static_cast<int>(std::lround(total * config_.org_share));
  const int rest = total - n_org;
  const int n_gpe = (rest + 2) / 3;
  const int n_loc = (rest + 1) / 3;
  const int n_per = rest / 3;
  std::set<std::string> surfaces;
  auto add_unique = [&](Category cat, const std::vector<std::string>& toks) {
    if (!surfaces.insert(JoinTokens(toks)).second) return false;
    AddEntity(cat, toks);
    return true;
  };
  auto similar_or_new = [&](const std::vector<std::string>& pool) {
    if (!pool.empty() && Bernoulli(rng_, config_.similar_phonetic_share)) {
      const std::string& base = Pick(rng_, pool);
      return NewNameWord(&name_syllables_.at(base));
    }
    return NewNameWord();
  };

  std::vector<std::string> place_words;
  for (int i = 0; i < n_gpe; ++i) {
    std::string w = similar_or_new(place_words);
    place_words.push_back(w);
    gpe_words_.push_back(w);
    add_unique(Category::kGpe, {w});
  }
  const char* loc_prefix[] = {"Mount", "River", "Lake"};
  for (int i = 0; i < n_loc; ++i) {
    std::string w = similar_or_new(place_words);
    place_words.push_back(w);
    if (Bernoulli(rng_, 0.5)) {
      add_unique(Category::kLoc, {loc_prefix[Uniform(rng_, 0, 2)], w});
    } else {
      add_unique(Category::kLoc, {w});
    }
  }
  const int pool_size = std::max(
      1, static_cast<int>(std::lround(
             n_per * (1.0 - config_.shared_first_name_share))));
  std::vector<std::string> first_names;
  for (int i = 0; i < pool_size; ++i) first_names.push_back(NewNameWord());
  for (int i = 0; i < n_per; ++i) {
    // First names are used once each before any is reused.
    const std::string& first =
        i < pool_size ? first_names[i] : Pick(rng_, first_names);
    add_unique(Category::kPer, {first, NewNameWord()});
  }

  int made_org = 0;
  for (int i = 0; i < config_.num_acronyms && made_org < n_org; ++i) {
    for (int attempt = 0; attempt < 1000; ++attempt) {
      std::string acr = Pick(rng_, letter_tokens_) + Pick(rng_, letter_tokens_);
      std::string lower = acr;
      for (char& ch : lower) ch = static_cast<char>(std::tolower(ch));
      std::string reversed(acr.rbegin(), acr.rend());
      if (corpus_.lexicon.Contains(acr) || corpus_.lexicon.Contains(lower) ||
          used_target_tokens_.count(reversed) ||
          used_target_tokens_.count("hom_" + lower)) {
        continue;
      }
      // The pronoun-like homograph is an ordinary filler word.
      LexiconEntry hom;
      hom.token = lower;
      hom.phonemes = FreshPronunciation(2, 2);
      hom.translation = {"hom_" + lower};
      used_target_tokens_.insert(hom.translation[0]);
      common_pool_.push_back(lower);
      corpus_.lexicon.Add(std::move(hom));

      LexiconEntry e;
      e.token = acr;
      e.phonemes = FreshPronunciation(4, 4);
      e.translation = {reversed};
      e.acronym = true;
      e.homograph = lower;
      used_target_tokens_.insert(reversed);
      corpus_.lexicon.Add(std::move(e));
      add_unique(Category::kOrg, {acr});
      ++made_org;
      break;
    }
  }
  while (made_org < n_org) {
    std::vector<std::string> toks;
    switch (Uniform(rng_, 0, 3)) {
      case 0:
        toks = {"Treaty", "of", Pick(rng_, gpe_words_)};
        break;
      case 1:
        toks = {"Bank", "of", Pick(rng_, gpe_words_)};
        break;
      case 2:
        toks = {NewNameWord(), "Committee"};
        break;
      default:
        toks = {NewNameWord(), "Council"};
        break;
    }
    if (add_unique(Category::kOrg, toks)) ++made_org;
  }
}

Utterance Builder::MakeUtterance(
    const std::string& id, const std::vector<const NamedEntity*>& entities) {
  const int n_words = Uniform(rng_, config_.words_per_utterance);
  std::vector<std::vector<std::string>> chunks;
  std::vector<const NamedEntity*> chunk_entity;
  for (int i = 0; i < n_words; ++i) {
    chunks.push_back({Pick(rng_, common_pool_)});
    chunk_entity.push_back(nullptr);
  }
  for (const NamedEntity* ne : entities) {
    const int at = Uniform(rng_, 0, static_cast<int>(chunks.size()));
    chunks.insert(chunks.begin() + at, ne->SourceTokens());
    chunk_entity.insert(chunk_entity.begin() + at, ne);
  }
  Utterance u;
  u.id = id;
  for (size_t c = 0; c < chunks.size(); ++c) {
    const int begin = static_cast<int>(u.transcript_tokens.size());
    u.transcript_tokens.insert(u.transcript_tokens.end(), chunks[c].begin(),
                               chunks[c].end());
    if (const NamedEntity* ne = chunk_entity[c]) {
      u.gold_entities.push_back(
          {ne->id, begin, static_cast<int>(u.transcript_tokens.size())});
      u.target_tokens.push_back(OpenTag(ne->category));
      for (auto& t : ne->TargetTokens()) u.target_tokens.push_back(t);
      u.target_tokens.push_back(CloseTag(ne->category));
    } else {
      for (const auto& t : corpus_.lexicon.Get(chunks[c][0]).translation) {
        u.target_tokens.push_back(t);
      }
    }
  }
  u.transcript_phonemes = corpus_.lexicon.Phonemize(u.transcript_tokens);
  SynthesizedSpeech speech = synth_->Synthesize(
      u.transcript_phonemes, config_.noise_sigma, rng_());
  u.speech_frames = std::move(speech.frames);
  u.frame_alignment = std::move(speech.frame_alignment);
  return u;
}

void Builder::MakeTrain() {
  std::vector<const NamedEntity*> mentions;
  for (const auto& ne : corpus_.dictionary) {
    const CountRange* range = &config_.train_mentions_org;
    if (ne.category == Category::kGpe) range = &config_.train_mentions_gpe;
    if (ne.category == Category::kLoc) range = &config_.train_mentions_loc;
    if (ne.category == Category::kPer) range = &config_.train_mentions_per;
    const int n = Uniform(rng_, *range);
    for (int i = 0; i < n; ++i) mentions.push_back(&ne);
  }
  const long capacity =
      static_cast<long>(config_.num_train) * config_.max_entities_per_utterance;
  if (static_cast<long>(mentions.size()) > capacity) {
    throw std::invalid_argument(
        "infeasible corpus config: " + std::to_string(mentions.size()) +
        " training mentions exceed capacity " + std::to_string(capacity));
  }
  std::shuffle(mentions.begin(), mentions.end(), rng_);
  std::vector<std::vector<const NamedEntity*>> slots(config_.num_train);
  std::vector<int> open(config_.num_train);
  std::iota(open.begin(), open.end(), 0);
  for (const NamedEntity* ne : mentions) {
    for (int attempt = 0;; ++attempt) {
      if (attempt > 10000 || open.empty()) {
        throw std::invalid_argument(
            "infeasible corpus config: cannot place training mentions");
      }
      const int k = Uniform(rng_, 0, static_cast<int>(open.size()) - 1);
      auto& slot = slots[open[k]];
      if (std::find(slot.begin(), slot.end(), ne) != slot.end()) continue;
      slot.push_back(ne);
      if (static_cast<int>(slot.size()) >= config_.max_entities_per_utterance) {
        open.erase(open.begin() + k);
      }
      break;
    }
  }
  auto& out = corpus_.splits["train"];
  for (int i = 0; i < config_.num_train; ++i) {
    out.push_back(MakeUtterance(PaddedId("train-", i, 5), slots[i]));
  }
}

void Builder::MakeHeldOut(const std::string& split, int count) {
  std::vector<std::vector<const NamedEntity*>> by_cat(4);
  std::vector<const NamedEntity*> orgs;
  for (const auto& ne : corpus_.dictionary) {
    by_cat[static_cast<int>(ne.category)].push_back(&ne);
    if (ne.category == Category::kOrg &&
        !corpus_.lexicon.Get(ne.SourceTokens()[0]).acronym) {
      orgs.push_back(&ne);
    }
  }
  const int n_scored =
      static_cast<int>(std::lround(config_.test_ne_density * count));
  const int n_org = orgs.empty() ? 0
                                 : static_cast<int>(std::lround(
                                       config_.test_org_density * count));
  std::vector<const NamedEntity*> mentions;
  for (int i = 0; i < n_scored; ++i) {
    const auto& pool = by_cat[static_cast<int>(kScoredCategories[i % 3])];
    if (pool.empty()) {
      throw std::invalid_argument("infeasible corpus config: empty category");
    }
    mentions.push_back(Pick(rng_, pool));
  }
  for (int i = 0; i < n_org; ++i) mentions.push_back(Pick(rng_, orgs));
  std::shuffle(mentions.begin(), mentions.end(), rng_);
  std::vector<std::vector<const NamedEntity*>> slots(count);
  for (const NamedEntity* ne : mentions) {
    for (int attempt = 0;; ++attempt) {
      if (attempt > 100000) {
        throw std::invalid_argument(
            "infeasible corpus config: cannot place " + split + " mentions");
      }
      auto& slot = slots[Uniform(rng_, 0, count - 1)];
      if (static_cast<int>(slot.size()) >=
              config_.max_entities_per_utterance ||
          std::find(slot.begin(), slot.end(), ne) != slot.end()) {
        continue;
      }
      slot.push_back(ne);
      break;
    }
  }
  auto& out = corpus_.splits[split];
  for (int i = 0; i < count; ++i) {
    out.push_back(MakeUtterance(PaddedId(split + "-", i, 5), slots[i]));
  }
}

Corpus Builder::Build() {
  CheckConfig(config_);
  MakeInventory();
  synth_ = std::make_unique<SpeechSynthesizer>(corpus_.phoneme_prototypes,
                                               config_.min_duration,
                                               config_.max_duration);
  MakeSyllables();
  MakeCommonWords();
  MakeAcronymLetters();
  MakeDictionary();

  std::vector<std::string> vocab = {"<s>", "</s>"};
  for (Category c : kAllCategories) {
    vocab.push_back(OpenTag(c));
    vocab.push_back(CloseTag(c));
  }
  for (const auto& e : corpus_.lexicon.entries()) {
    vocab.insert(vocab.end(), e.translation.begin(), e.translation.end());
  }
  for (const auto& s : syllables_) {
    vocab.insert(vocab.end(), s.spellings.begin(), s.spellings.end());
  }
  corpus_.target_vocab = Vocabulary(std::move(vocab));

  MakeTrain();
  MakeHeldOut("dev", config_.num_dev);
  MakeHeldOut("test", config_.num_test);
  ValidateCorpus(corpus_);
  return std::move(corpus_);
}

}  // namespace

Corpus GenerateCorpus(const CorpusConfig& config, uint64_t seed) {
  Builder builder(config, seed);
  return builder.Build();
}

}  // namespace nedict::corpus
