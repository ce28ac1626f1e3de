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

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <string>

#include "gtest/gtest.h"

#include "nedict/encoder/joint_training.h"
#include "nedict/rescore/fusion.h"
#include "nedict/rescore/ngram_lm.h"
#include "unit/test_util.h"

namespace nedict::rescore {
namespace {

using corpus::Vocabulary;

// ids: 0 <s>, 1 </s>, 2 a, 3 b, 4 c, 5 <PER>, 6 </PER>, 7 <GPE>, 8 </GPE>
Vocabulary SmallVocab() {
  return Vocabulary({"<s>", "</s>", "a", "b", "c", "<PER>", "</PER>", "<GPE>",
                     "</GPE>"});
}

NgramLM AbLm(const Vocabulary& vocab) {
  NgramLM lm(vocab, {});
  lm.AddSentence(std::vector<int>{2, 3});
  lm.AddSentence(std::vector<int>{2, 4});
  lm.AddSentence(std::vector<int>{2, 3});
  return lm;
}

TEST(NgramLmTest, VocabularyExcludesBosAndTags) {
  const Vocabulary vocab = SmallVocab();
  const NgramLM lm = AbLm(vocab);
  EXPECT_FALSE(lm.InVocabulary(0));
  EXPECT_TRUE(lm.InVocabulary(1));
  for (int t : {5, 6, 7, 8}) EXPECT_FALSE(lm.InVocabulary(t));
  const auto lp = lm.LogProbs(std::vector<int>{});
  EXPECT_TRUE(std::isinf(lp(0)));
  EXPECT_TRUE(std::isinf(lp(5)));
}

// Counts: a->b 2, a->c 1; unigrams a 3, b 2, c 1, </s> 3 (total 9).
// With 4 LM tokens the add-0.1 unigram is (c + 0.1) / 9.4. After "a" the
// seen successors keep their relative frequency and the rest back off by
// 0.4, so z = 2/3 + 1/3 + 2 * 0.4 * 3.1 / 9.4.
TEST(NgramLmTest, BigramClosedForm) {
  const Vocabulary vocab = SmallVocab();
  const NgramLM lm = AbLm(vocab);
  const double z = 1.0 + 2.0 * 0.4 * 3.1 / 9.4;
  const std::vector<int> ctx{2};
  EXPECT_NEAR(lm.LogProb(ctx, 3), std::log((2.0 / 3.0) / z), 1e-12);
  EXPECT_NEAR(lm.LogProb(ctx, 4), std::log((1.0 / 3.0) / z), 1e-12);
  EXPECT_NEAR(lm.LogProb(ctx, 1), std::log(0.4 * 3.1 / 9.4 / z), 1e-12);
  // Empty context: plain smoothed unigram.
  EXPECT_NEAR(lm.LogProb(std::vector<int>{}, 4), std::log(1.1 / 9.4), 1e-12);
}

TEST(NgramLmTest, NormalizedAndNeverZeroInVocabulary) {
  const auto& corpus = testing_util::TinyCorpus();
  const NgramLM lm =
      TrainGenericLm(corpus.Split("train"), corpus.target_vocab);
  std::mt19937 rng(3);
  const int v = corpus.target_vocab.size();
  for (int trial = 0; trial < 40; ++trial) {
    std::vector<int> ctx;
    const int len = static_cast<int>(rng() % 4);
    for (int i = 0; i < len; ++i) {
      int t;
      do {
        t = static_cast<int>(rng() % v);
      } while (!lm.InVocabulary(t));
      ctx.push_back(t);
    }
    const auto lp = lm.LogProbs(ctx);
    double sum = 0.0;
    for (int w = 0; w < v; ++w) {
      if (!lm.InVocabulary(w)) continue;
      ASSERT_TRUE(std::isfinite(lp(w)));
      sum += std::exp(lp(w));
    }
    EXPECT_NEAR(sum, 1.0, 1e-9);
  }
}

TEST(NgramLmTest, TrainPerplexityBelowShuffled) {
  const auto& corpus = testing_util::TinyCorpus();
  const auto& vocab = corpus.target_vocab;
  const NgramLM lm = TrainGenericLm(corpus.Split("train"), vocab);
  std::vector<std::vector<int>> train;
  std::vector<std::vector<int>> shuffled;
  std::mt19937 rng(9);
  for (const auto& u : corpus.Split("train")) {
    std::vector<int> ids;
    for (int t : vocab.Encode(u.target_tokens)) {
      if (lm.InVocabulary(t)) ids.push_back(t);
    }
    train.push_back(ids);
    std::shuffle(ids.begin(), ids.end(), rng);
    shuffled.push_back(ids);
  }
  EXPECT_LT(lm.Perplexity(train), lm.Perplexity(shuffled));
}

TEST(NgramLmTest, TagsSplitSegments) {
  const Vocabulary vocab = SmallVocab();
  NgramLM lm(vocab, {});
  lm.AddSentence(std::vector<int>{2, 5, 3, 6, 4});
  // No bigram is counted across a tag, so "a" has no successors and its
  // distribution is the unigram one.
  EXPECT_EQ(lm.LogProbs(std::vector<int>{2}), lm.LogProbs(std::vector<int>{}));
  EXPECT_EQ(LmContext(std::vector<int>{2, 5, 3}, vocab),
            (std::vector<int>{3}));
  EXPECT_EQ(lm.total_tokens(), 4);  // a, b, c, </s>
}

TEST(NgramLmTest, Errors) {
  const Vocabulary vocab = SmallVocab();
  EXPECT_THROW(NgramLM(vocab, {.order = 0}), std::invalid_argument);
  EXPECT_THROW(NgramLM(vocab, {.add_k = 0.0}), std::invalid_argument);
  NgramLM empty(vocab, {});
  EXPECT_THROW(empty.LogProbs(std::vector<int>{}), std::logic_error);
  NgramLM lm = AbLm(vocab);
  EXPECT_THROW(lm.AddSentence(std::vector<int>{0}), std::invalid_argument);
  EXPECT_THROW(lm.LogProb(std::vector<int>{}, 5), std::invalid_argument);
  EXPECT_THROW(TrainGenericLm({}, vocab), std::invalid_argument);
  EXPECT_THROW(TrainClassLm({}, vocab), std::invalid_argument);
}

TEST(NgramLmTest, SaveLoadRoundTrip) {
  const auto& corpus = testing_util::TinyCorpus();
  const auto& vocab = corpus.target_vocab;
  const NgramLM lm = TrainClassLm(corpus.dictionary, vocab);
  const auto dir = testing_util::TempDir("ngram");
  lm.Save(dir / "class.lm");
  std::ifstream in(dir / "class.lm");
  std::string first;
  std::getline(in, first);
  EXPECT_EQ(first, "#nedict-ngram 1");
  const NgramLM back = NgramLM::Load(dir / "class.lm", vocab);
  EXPECT_EQ(back.total_tokens(), lm.total_tokens());
  const auto ids = vocab.Encode(corpus.dictionary[0].TargetTokens());
  for (size_t n = 0; n <= ids.size(); ++n) {
    const std::vector<int> ctx(ids.begin(), ids.begin() + n);
    EXPECT_EQ(back.LogProbs(ctx), lm.LogProbs(ctx));
  }
  back.Save(dir / "again.lm");
  std::ifstream a(dir / "class.lm"), b(dir / "again.lm");
  EXPECT_EQ(std::string(std::istreambuf_iterator<char>(a), {}),
            std::string(std::istreambuf_iterator<char>(b), {}));
}

// Reference parser over the token strings of a hypothesis.
struct RefState {
  std::string open;  // category name, empty outside
  std::vector<std::string> since;
};

RefState ParseReference(const std::vector<std::string>& tokens) {
  RefState s;
  for (const auto& t : tokens) {
    if (t.size() > 2 && t.front() == '<' && t.back() == '>' && t != "<s>" &&
        t != "</s>") {
      if (t[1] == '/') {
        if (!s.open.empty()) {
          s.open.clear();
          s.since.clear();
        }
      } else {
        s.open = t.substr(1, t.size() - 2);
        s.since.clear();
      }
    } else if (!s.open.empty()) {
      s.since.push_back(t);
    }
  }
  return s;
}

TEST(FusionStateTest, MatchesReferenceParser) {
  const Vocabulary vocab = SmallVocab();
  std::mt19937 rng(17);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<int> ids;
    const int len = static_cast<int>(rng() % 10);
    for (int i = 0; i < len; ++i) ids.push_back(2 + static_cast<int>(rng() % 7));
    const FusionState state = FusionState::FromPrefix(ids, vocab);
    const RefState ref = ParseReference(vocab.Decode(ids));
    ASSERT_EQ(state.inside_tag.has_value(), !ref.open.empty());
    if (state.inside_tag) {
      EXPECT_EQ(corpus::CategoryName(*state.inside_tag), ref.open);
    }
    EXPECT_EQ(vocab.Decode(state.since_open), ref.since);
  }
}

class FusionTest : public ::testing::Test {
 protected:
  FusionTest()
      : vocab_(SmallVocab()), class_lm_(vocab_, {}), generic_lm_(AbLm(vocab_)) {
    class_lm_.AddSentence(std::vector<int>{4, 4});
  }
  Vocabulary vocab_;
  NgramLM class_lm_;
  NgramLM generic_lm_;
};

TEST_F(FusionTest, ZeroLambdaIsExactIdentity) {
  numerics::RowVector scores = numerics::RowVector::LinSpaced(9, -5.0, -1.0);
  const numerics::RowVector before = scores;
  FusionCounters counters;
  FusedScores(scores, std::vector<int>{2, 5}, class_lm_, generic_lm_, vocab_,
              0.0, &counters);
  EXPECT_EQ(scores, before);
  EXPECT_THROW(FusedScores(scores, std::vector<int>{}, class_lm_, generic_lm_,
                           vocab_, -0.1),
               std::invalid_argument);
}

TEST_F(FusionTest, AddsWeightedLmAndLeavesTagsAlone) {
  const numerics::RowVector base = numerics::RowVector::Constant(9, -2.0);
  const double lambda = 0.15;
  const std::vector<int> outside{2};
  numerics::RowVector scores = base;
  FusedScores(scores, outside, class_lm_, generic_lm_, vocab_, lambda);
  const auto glp = generic_lm_.LogProbs(outside);
  for (int v = 0; v < 9; ++v) {
    if (generic_lm_.InVocabulary(v)) {
      EXPECT_NEAR(scores(v), -2.0 + lambda * glp(v), 1e-12);
    } else {
      EXPECT_EQ(scores(v), -2.0);
    }
  }
  const std::vector<int> inside{2, 5, 4};
  scores = base;
  FusedScores(scores, inside, class_lm_, generic_lm_, vocab_, lambda);
  const auto clp = class_lm_.LogProbs(std::vector<int>{4});
  EXPECT_NEAR(scores(4), -2.0 + lambda * clp(4), 1e-12);
  EXPECT_EQ(scores(6), -2.0);
}

TEST_F(FusionTest, CountersFollowTagState) {
  FusionCounters counters;
  const auto scorer =
      MakeFusionScorer(class_lm_, generic_lm_, vocab_, 0.1, &counters);
  numerics::RowVector s = numerics::RowVector::Zero(9);
  scorer(std::vector<int>{2}, s);
  scorer(std::vector<int>{2, 5}, s);
  scorer(std::vector<int>{2, 5, 3}, s);
  scorer(std::vector<int>{2, 5, 3, 6}, s);
  EXPECT_EQ(counters.class_lm, 2);
  EXPECT_EQ(counters.generic_lm, 2);
}

TEST(BeamSearchFusedTest, ZeroLambdaReproducesBaseBeam) {
  const auto& corpus = testing_util::TinyCorpus();
  auto arch = encoder::DefaultArchitecture(corpus);
  arch.encoder.dim = arch.decoder.dim = 16;
  arch.encoder.ffn = arch.decoder.ffn = 32;
  arch.encoder.layers = 1;
  arch.decoder.layers = 1;
  const biasdec::SpeechTranslator model(arch, 4);
  const auto& vocab = corpus.target_vocab;
  const NgramLM class_lm = TrainClassLm(corpus.dictionary, vocab);
  const NgramLM generic_lm = TrainGenericLm(corpus.Split("train"), vocab);
  biasdec::BeamOptions opts;
  opts.beam = 3;
  opts.max_length = 8;
  for (int i = 0; i < 3; ++i) {
    const auto& utt = corpus.Split("test")[i];
    const auto base = biasdec::Translate(model, utt, nullptr, opts);
    const auto fused =
        BeamSearchFused(model, utt, class_lm, generic_lm, vocab, 0.0, opts);
    EXPECT_EQ(fused.tokens, base.tokens);
    EXPECT_EQ(fused.score, base.score);
    const auto heavy =
        BeamSearchFused(model, utt, class_lm, generic_lm, vocab, 5.0, opts);
    EXPECT_FALSE(heavy.tokens.empty());
  }
}

}  // namespace
}  // namespace nedict::rescore
