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

#include <filesystem>
#include <fstream>
#include <iterator>
#include <set>

#include "gtest/gtest.h"

#include "nedict/corpus/generator.h"
#include "nedict/corpus/io.h"
#include "nedict/corpus/speech.h"
#include "nedict/corpus/types.h"
#include "unit/test_util.h"

namespace nedict::corpus {
namespace {

namespace fs = std::filesystem;

std::string ReadBytes(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

Lexicon SmallLexicon() {
  Lexicon lex;
  lex.Add({"tok17", {3, 9}, {"mot17"}, false, ""});
  lex.Add({"us", {5, 6}, {"hom_us"}, false, ""});
  lex.Add({"US", {1, 2, 3, 4}, {"SU"}, true, "us"});
  return lex;
}

TEST(PhonemizeTest, EmptyTokenList) {
  EXPECT_TRUE(SmallLexicon().Phonemize({}).empty());
}

TEST(PhonemizeTest, TableLookup) {
  std::vector<std::string> toks = {"tok17"};
  EXPECT_EQ(SmallLexicon().Phonemize(toks), (std::vector<int>{3, 9}));
}

TEST(PhonemizeTest, AcronymMimicsPronounWhenToggled) {
  std::vector<std::string> toks = {"US"};
  Lexicon lex = SmallLexicon();
  EXPECT_EQ(lex.Phonemize(toks, false), (std::vector<int>{1, 2, 3, 4}));
  EXPECT_EQ(lex.Phonemize(toks, true), (std::vector<int>{5, 6}));
}

TEST(PhonemizeTest, OutOfVocabularyNamesToken) {
  std::vector<std::string> toks = {"tok17", "zorp"};
  try {
    SmallLexicon().Phonemize(toks);
    FAIL() << "expected an error";
  } catch (const std::out_of_range& e) {
    EXPECT_NE(std::string(e.what()).find("zorp"), std::string::npos);
  }
}

TEST(SpeechTest, NoiselessUnitDurationsReproducePrototypes) {
  const Corpus& c = testing_util::TinyCorpus();
  SpeechSynthesizer synth(c.phoneme_prototypes, 1, 1);
  std::vector<int> ph = {4, 0, 7};
  SynthesizedSpeech s = synth.Synthesize(ph, 0.0, 3);
  ASSERT_EQ(s.frames.rows(), 3);
  for (int i = 0; i < 3; ++i) {
    EXPECT_EQ(s.frames.row(i), c.phoneme_prototypes.row(ph[i]));
  }
}

TEST(SpeechTest, DurationBoundsAndDeterminism) {
  const Corpus& c = testing_util::TinyCorpus();
  SpeechSynthesizer synth(c.phoneme_prototypes, 1, 4);
  std::vector<int> ph = {1, 2, 3};
  for (uint64_t seed = 0; seed < 50; ++seed) {
    SynthesizedSpeech s = synth.Synthesize(ph, 0.3, seed);
    EXPECT_GE(s.frames.rows(), 3);
    EXPECT_LE(s.frames.rows(), 12);
    EXPECT_EQ(s.frames, synth.Synthesize(ph, 0.3, seed).frames);
  }
  EXPECT_THROW(synth.Synthesize(std::vector<int>{999}, 0.0, 1),
               std::out_of_range);
}

TEST(GeneratorTest, DefaultConfigShape) {
  const Corpus& c = testing_util::DefaultCorpus();
  EXPECT_EQ(c.dictionary.size(), 294u);
  EXPECT_EQ(c.Split("train").size(), 2000u);
  EXPECT_EQ(c.Split("test").size(), 200u);
  // Density of scored mentions in test.
  int scored = 0;
  for (const auto& u : c.Split("test")) {
    for (const auto& g : u.gold_entities) {
      if (c.Entity(g.ne_id).category != Category::kOrg) ++scored;
    }
  }
  EXPECT_NEAR(scored / 200.0, 0.34, 0.05);
  // Every entity occurs in training.
  std::set<std::string> seen;
  for (const auto& u : c.Split("train")) {
    for (const auto& g : u.gold_entities) seen.insert(g.ne_id);
  }
  EXPECT_EQ(seen.size(), c.dictionary.size());
  // Nested, partial-overlap and acronym entries exist.
  int nested = 0;
  int acronyms = 0;
  for (const auto& ne : c.dictionary) {
    if (ne.source_surface.starts_with("Treaty of ")) ++nested;
    if (c.lexicon.Get(ne.SourceTokens()[0]).acronym) ++acronyms;
  }
  EXPECT_GT(nested, 0);
  EXPECT_EQ(acronyms, 4);
}

TEST(GeneratorTest, GoldSpansAreContiguousPhonemeRuns) {
  const Corpus& c = testing_util::TinyCorpus();
  for (const auto& [name, utts] : c.splits) {
    for (const auto& u : utts) {
      for (const auto& g : u.gold_entities) {
        EXPECT_TRUE(ContainsSubsequence(u.transcript_phonemes,
                                        c.Entity(g.ne_id).phonemes));
      }
    }
  }
}

TEST(GeneratorTest, InfeasibleConfigIsRejected) {
  CorpusConfig cfg = testing_util::TinyConfig();
  cfg.num_train = 5;
  EXPECT_THROW(GenerateCorpus(cfg, 1), std::invalid_argument);
  cfg = testing_util::TinyConfig();
  cfg.test_ne_density = 5.0;
  EXPECT_THROW(GenerateCorpus(cfg, 1), std::invalid_argument);
}

TEST(CorpusIoTest, FixedSeedGivesByteIdenticalFiles) {
  const fs::path a = testing_util::TempDir("corpus_a");
  const fs::path b = testing_util::TempDir("corpus_b");
  SaveCorpus(GenerateCorpus(testing_util::TinyConfig(), 7), a);
  SaveCorpus(GenerateCorpus(testing_util::TinyConfig(), 7), b);
  for (const auto& entry : fs::directory_iterator(a)) {
    const auto name = entry.path().filename();
    EXPECT_EQ(ReadBytes(a / name), ReadBytes(b / name)) << name;
  }
}

// Round-trip identity over several generated corpora.
TEST(CorpusIoTest, RoundTripProperty) {
  for (uint64_t seed : {1u, 2u, 3u, 4u}) {
    CorpusConfig cfg = testing_util::TinyConfig();
    cfg.noise_sigma = 0.1 * seed;
    Corpus c = GenerateCorpus(cfg, seed);
    const fs::path dir = testing_util::TempDir("corpus_rt");
    SaveCorpus(c, dir);
    Corpus back = LoadCorpus(dir);
    EXPECT_TRUE(back == c) << "seed " << seed;
  }
}

TEST(CorpusIoTest, EmptyCorpusRoundTrips) {
  const fs::path dir = testing_util::TempDir("corpus_empty");
  Corpus empty;
  SaveCorpus(empty, dir);
  EXPECT_TRUE(fs::exists(dir / "dict.jsonl"));
  EXPECT_TRUE(LoadCorpus(dir) == empty);
}

TEST(CorpusIoTest, CorruptedFrameBlockNamesUtterance) {
  const fs::path dir = testing_util::TempDir("corpus_bad");
  const Corpus& c = testing_util::TinyCorpus();
  SaveCorpus(c, dir);
  const fs::path frames = dir / "dev.frames.bin";
  fs::resize_file(frames, fs::file_size(frames) - 10);
  try {
    LoadCorpus(dir);
    FAIL() << "expected an error";
  } catch (const std::runtime_error& e) {
    EXPECT_NE(std::string(e.what()).find(c.Split("dev").back().id),
              std::string::npos)
        << e.what();
  }
}

TEST(CorpusIoTest, VersionMismatchIsDescriptive) {
  const fs::path dir = testing_util::TempDir("corpus_ver");
  SaveCorpus(testing_util::TinyCorpus(), dir);
  std::string meta = ReadBytes(dir / "meta.json");
  const auto at = meta.find("\"version\": 1");
  ASSERT_NE(at, std::string::npos);
  meta.replace(at, 12, "\"version\": 9");
  std::ofstream(dir / "meta.json", std::ios::trunc) << meta;
  try {
    LoadCorpus(dir);
    FAIL() << "expected an error";
  } catch (const std::runtime_error& e) {
    EXPECT_NE(std::string(e.what()).find("version 9"), std::string::npos);
  }
}

TEST(ValidateCorpusTest, DetectsUnpairedTags) {
  Corpus c = testing_util::TinyCorpus();
  auto& u = c.splits["train"][0];
  u.target_tokens.push_back("<PER>");
  EXPECT_THROW(ValidateCorpus(c), std::runtime_error);
}

}  // namespace
}  // namespace nedict::corpus
