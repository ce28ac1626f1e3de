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

#include "acceptance/gradient_suite.h"

#include <random>

#include "nedict/biasdec/translator.h"
#include "nedict/detector/detector.h"
#include "nedict/detector/training.h"
#include "nedict/encoder/joint_training.h"
#include "nedict/numerics/gradcheck.h"

namespace nedict::checks {
namespace {

using numerics::Matrix;
using numerics::Rng;
using numerics::Var;

// Moves every parameter off its initial value so no path is trivially
// zero (for example freshly zeroed bias-attention projections).
void Perturb(numerics::ParameterSet& params, Rng& rng) {
  std::normal_distribution<double> noise(0.0, 0.2);
  for (const auto& [name, v] : params) {
    Var p = v;
    for (Eigen::Index i = 0; i < p.value().size(); ++i) {
      p.mutable_value().data()[i] += noise(rng);
    }
  }
}

Matrix RandomMatrix(int rows, int cols, Rng& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = n(rng);
  return m;
}

int Pick(Rng& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

GradientCase Record(const std::string& name,
                    const numerics::GradCheckResult& r) {
  return {name, r.max_rel_error, r.worst_param, r.entries_checked};
}

struct Shapes {
  int dim;
  int heads;
  int ffn;
  int phonemes;
  int frame_dim;
  int vocab;
};

Shapes RandomShapes(Rng& rng) {
  Shapes s;
  s.heads = Pick(rng, 1, 2);
  s.dim = s.heads * 4 * Pick(rng, 1, 2);
  s.ffn = 2 * s.dim;
  s.phonemes = Pick(rng, 6, 10);
  s.frame_dim = Pick(rng, 3, 6);
  s.vocab = Pick(rng, 8, 14);
  return s;
}

biasdec::TranslatorConfig Arch(const Shapes& s, biasdec::BiasMethod method) {
  biasdec::TranslatorConfig c;
  c.encoder.num_phonemes = s.phonemes;
  c.encoder.frame_dim = s.frame_dim;
  c.encoder.dim = s.dim;
  c.encoder.heads = s.heads;
  c.encoder.ffn = s.ffn;
  c.encoder.layers = 2;
  c.decoder.vocab_size = s.vocab;
  c.decoder.dim = s.dim;
  c.decoder.heads = s.heads;
  c.decoder.ffn = s.ffn;
  c.decoder.layers = 2;
  c.method = method;
  return c;
}

std::vector<int> RandomIds(Rng& rng, int length, int lo, int hi) {
  std::vector<int> ids(length);
  for (int& t : ids) t = Pick(rng, lo, hi);
  return ids;
}

// Encoder, base decoder and output projection through the joint loss.
GradientCase EncoderCase(Rng& rng) {
  const Shapes s = RandomShapes(rng);
  biasdec::SpeechTranslator model(Arch(s, biasdec::BiasMethod::kNone), rng());
  Perturb(model.params(), rng);
  corpus::Vocabulary vocab;
  for (int i = 0; i < s.vocab; ++i) vocab.Add("t" + std::to_string(i));
  corpus::Utterance u;
  const int p = Pick(rng, 3, 6);
  u.transcript_phonemes = RandomIds(rng, p, 0, s.phonemes - 1);
  for (int i = 0; i < p; ++i) {
    const int frames = Pick(rng, 1, 2);
    for (int f = 0; f < frames; ++f) u.frame_alignment.push_back(i);
  }
  u.speech_frames = numerics::Tensor(
      RandomMatrix(static_cast<int>(u.frame_alignment.size()), s.frame_dim, rng));
  for (int t : RandomIds(rng, Pick(rng, 2, 4), 2, s.vocab - 1)) {
    u.target_tokens.push_back(vocab.Token(t));
  }
  // The alignment term treats the text side as a constant, which finite
  // differences cannot express, so the joint loss is checked without it.
  auto loss = [&] {
    return encoder::JointLoss(model, u, vocab, 0.0, 0.0, nullptr).total;
  };
  return Record("encoder+decoder translation loss",
                numerics::FiniteDifferenceCheck(loss, model.params()));
}

// Speech side of the alignment term against a fixed text target.
GradientCase AlignmentCase(Rng& rng) {
  const Shapes s = RandomShapes(rng);
  encoder::EncoderConfig config;
  config.num_phonemes = s.phonemes;
  config.frame_dim = s.frame_dim;
  config.dim = s.dim;
  config.heads = s.heads;
  config.ffn = s.ffn;
  config.layers = 2;
  encoder::SharedEncoder enc(config, rng());
  Perturb(enc.params(), rng);
  const int frames = Pick(rng, 3, 8);
  const Matrix speech_in = RandomMatrix(frames, s.frame_dim, rng);
  const Var target(RandomMatrix(frames, s.dim, rng));
  namespace ops = numerics::ops;
  auto loss = [&] {
    const Var speech = enc.ForwardSpeech(numerics::Tensor(speech_in), 0.0, nullptr);
    const Var cosine = ops::Mean(ops::RowDot(ops::NormalizeRows(speech),
                                             ops::NormalizeRows(target)));
    return ops::AddScalar(ops::Scale(cosine, -1.0), 1.0);
  };
  return Record("encoder alignment loss",
                numerics::FiniteDifferenceCheck(loss, enc.params()));
}

GradientCase DetectorCase(Rng& rng, bool hinge_active) {
  const Shapes s = RandomShapes(rng);
  detector::DetectorConfig arch;
  arch.dim = s.dim;
  arch.heads = s.heads;
  arch.ffn = s.ffn;
  detector::DetectorModel model(arch, rng());
  Perturb(model.params(), rng);
  const Var pos(RandomMatrix(Pick(rng, 1, 3), s.dim, rng));
  const Var neg(RandomMatrix(Pick(rng, 1, 3), s.dim, rng));
  const Var speech(RandomMatrix(Pick(rng, 4, 12), s.dim, rng));
  // A margin above 1 keeps the hinge active; a negative one keeps it off.
  const double margin = hinge_active ? 1.5 : -1.5;
  auto loss = [&] {
    return detector::PairLoss(model, pos, neg, speech, margin, 1.0, 0.0,
                              nullptr);
  };
  return Record(hinge_active ? "detector pair loss (ranking active)"
                             : "detector pair loss (ranking inactive)",
                numerics::FiniteDifferenceCheck(loss, model.params()));
}

// Bias encoder, bias attention layers and output projection.
GradientCase ClasCase(Rng& rng, biasdec::BiasMethod method) {
  const Shapes s = RandomShapes(rng);
  biasdec::SpeechTranslator base(Arch(s, biasdec::BiasMethod::kNone), rng());
  biasdec::SpeechTranslator model =
      biasdec::SpeechTranslator::WithBias(base, method, rng());
  Perturb(model.params(), rng);
  model.params().SetTrainable("encoder.", false);
  const Var memory(RandomMatrix(Pick(rng, 3, 8), s.dim, rng));
  std::vector<std::vector<int>> forms;
  const int b = Pick(rng, 1, 3);
  for (int i = 0; i < b; ++i) {
    forms.push_back(RandomIds(rng, Pick(rng, 1, 3), 2, s.vocab - 1));
  }
  const std::vector<int> target = RandomIds(rng, Pick(rng, 2, 5), 2, s.vocab - 1);
  auto loss = [&] {
    const Var bias = model.BiasVectors(forms);
    return biasdec::SequenceLoss(model, memory, &bias, target);
  };
  return Record(std::string("CLAS ") + biasdec::BiasMethodName(method) +
                    " loss",
                numerics::FiniteDifferenceCheck(loss, model.params()));
}

}  // namespace

std::vector<GradientCase> RunGradientSuite(uint64_t seed) {
  Rng rng(seed);
  std::vector<GradientCase> out;
  out.push_back(EncoderCase(rng));
  out.push_back(AlignmentCase(rng));
  out.push_back(DetectorCase(rng, true));
  out.push_back(DetectorCase(rng, false));
  out.push_back(ClasCase(rng, biasdec::BiasMethod::kParallel));
  out.push_back(ClasCase(rng, biasdec::BiasMethod::kSequential));
  return out;
}

}  // namespace nedict::checks
