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

#include "acceptance/identity_suite.h"

#include <algorithm>
#include <cmath>
#include <random>

#include "nedict/encoder/joint_training.h"
#include "unit/test_util.h"

namespace nedict::checks {

using numerics::Matrix;
using numerics::Var;

biasdec::TranslatorConfig TinyArch() {
  auto arch = encoder::DefaultArchitecture(testing_util::TinyCorpus());
  arch.encoder.dim = arch.decoder.dim = 16;
  arch.encoder.heads = arch.decoder.heads = 2;
  arch.encoder.ffn = arch.decoder.ffn = 32;
  arch.encoder.layers = 2;
  arch.decoder.layers = 2;
  return arch;
}

biasdec::SpeechTranslator ActiveClas(biasdec::BiasMethod method,
                                     uint64_t seed) {
  biasdec::SpeechTranslator base(TinyArch(), seed);
  auto model = biasdec::SpeechTranslator::WithBias(base, method, seed + 1);
  numerics::Rng rng(seed + 2);
  std::normal_distribution<double> noise(0.0, 0.3);
  for (const auto& [name, v] : model.params()) {
    Var p = v;
    for (Eigen::Index i = 0; i < p.value().size(); ++i) {
      p.mutable_value().data()[i] += noise(rng);
    }
  }
  return model;
}

std::vector<const corpus::NamedEntity*> FirstEntities(int n) {
  std::vector<const corpus::NamedEntity*> out;
  for (int i = 0; i < n; ++i) {
    out.push_back(&testing_util::TinyCorpus().dictionary[i]);
  }
  return out;
}

Matrix LogSoftmaxRows(const Matrix& logits) {
  Matrix out = logits;
  for (Eigen::Index r = 0; r < out.rows(); ++r) {
    const double m = out.row(r).maxCoeff();
    const double lse = m + std::log((out.row(r).array() - m).exp().sum());
    out.row(r).array() -= lse;
  }
  return out;
}

GoldenDecode DecodeGoldenEmptyBias() {
  const auto& corpus = testing_util::TinyCorpus();
  const auto model = ActiveClas(biasdec::BiasMethod::kParallel, kGoldenSeed);
  const biasdec::BiasSet empty = model.EncodeBias({}, corpus.target_vocab);
  biasdec::BeamOptions opts;
  opts.max_length = 8;
  const auto r = biasdec::Translate(model, corpus.Split("test")[0], &empty, opts);
  GoldenDecode out{r.tokens, r.score, false};
  out.matches = std::equal(r.tokens.begin(), r.tokens.end(),
                           kGoldenEmptyBiasTokens.begin(),
                           kGoldenEmptyBiasTokens.end()) &&
                std::abs(r.score - kGoldenEmptyBiasScore) < 1e-9;
  return out;
}

PermutationProbe ProbeBiasPermutation(
    const biasdec::SpeechTranslator& model, const corpus::Utterance& utt,
    std::vector<const corpus::NamedEntity*> entities,
    const corpus::Vocabulary& vocab, const biasdec::BeamOptions& opts) {
  const biasdec::BiasSet a = model.EncodeBias(entities, vocab);
  std::reverse(entities.begin(), entities.end());
  if (entities.size() > 2) {
    std::rotate(entities.begin(), entities.begin() + 2, entities.end());
  }
  const biasdec::BiasSet b = model.EncodeBias(entities, vocab);

  PermutationProbe probe;
  {
    numerics::NoGradGuard no_grad;
    const Var memory(model.encoder().EncodeSpeech(utt.speech_frames).vectors);
    std::vector<int> in{corpus::Vocabulary::kBos};
    for (int t : vocab.Encode(utt.target_tokens)) in.push_back(t);
    const Var va(a.vectors.matrix());
    const Var vb(b.vectors.matrix());
    const Matrix la =
        LogSoftmaxRows(model.decoder().Forward(in, memory, &va).value());
    const Matrix lb =
        LogSoftmaxRows(model.decoder().Forward(in, memory, &vb).value());
    probe.max_log_prob_gap = (la - lb).cwiseAbs().maxCoeff();
  }
  probe.same_tokens = biasdec::Translate(model, utt, &a, opts).tokens ==
                      biasdec::Translate(model, utt, &b, opts).tokens;
  return probe;
}

PermutationProbe ProbeTinyPermutation(biasdec::BiasMethod method) {
  const auto& corpus = testing_util::TinyCorpus();
  const auto model = ActiveClas(method, 11);
  biasdec::BeamOptions opts;
  opts.max_length = 10;
  return ProbeBiasPermutation(model, corpus.Split("test")[0], FirstEntities(5),
                              corpus.target_vocab, opts);
}

}  // namespace nedict::checks
