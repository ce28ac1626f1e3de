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

#include "nedict/encoder/joint_training.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "glog/logging.h"
#include "nedict/encoder/heatmap.h"
#include "nedict/numerics/optimizer.h"

namespace nedict::encoder {

using numerics::Var;
namespace ops = numerics::ops;

biasdec::TranslatorConfig DefaultArchitecture(const corpus::Corpus& corpus) {
  biasdec::TranslatorConfig arch;
  arch.encoder.num_phonemes =
      static_cast<int>(corpus.phoneme_inventory.size());
  arch.encoder.frame_dim = corpus.frame_dim();
  arch.decoder.vocab_size = static_cast<int>(corpus.target_vocab.size());
  arch.decoder.dim = arch.encoder.dim;
  return arch;
}

JointLossParts JointLoss(const biasdec::SpeechTranslator& model,
                         const corpus::Utterance& utterance,
                         const corpus::Vocabulary& vocab, double alpha,
                         double layerdrop, numerics::Rng* rng) {
  const auto& enc = model.encoder();
  const std::vector<int> target = vocab.Encode(utterance.target_tokens);
  Var speech = enc.ForwardSpeech(utterance.speech_frames, layerdrop, rng);
  Var text = enc.ForwardText(utterance.transcript_phonemes, layerdrop, rng);

  JointLossParts parts;
  Var s2t = biasdec::SequenceLoss(model, speech, nullptr, target);
  Var t2t = biasdec::SequenceLoss(model, text, nullptr, target);
  parts.s2t = s2t.scalar();
  parts.t2t = t2t.scalar();
  parts.total = ops::Add(s2t, t2t);
  // The text side is a fixed target for the alignment term: pulling both
  // sides together lets the encoder collapse every position onto one vector.
  Var paired(numerics::Matrix(
      ops::GatherRows(Var(text.value()), utterance.frame_alignment).value()));
  Var cosine = ops::Mean(
      ops::RowDot(ops::NormalizeRows(speech), ops::NormalizeRows(paired)));
  Var misalignment = ops::AddScalar(ops::Scale(cosine, -1.0), 1.0);
  parts.alignment = misalignment.scalar();
  if (alpha > 0.0) {
    parts.total = ops::Add(parts.total, ops::Scale(misalignment, alpha));
  }
  return parts;
}

double DevAlignmentMargin(const SharedEncoder& encoder,
                          const std::vector<corpus::Utterance>& utterances,
                          int limit) {
  const size_t n = limit > 0 ? std::min(utterances.size(),
                                        static_cast<size_t>(limit))
                             : utterances.size();
  if (n == 0) throw std::invalid_argument("no utterances to measure");
  double total = 0.0;
  for (size_t i = 0; i < n; ++i) {
    const auto& u = utterances[i];
    const auto heatmap =
        SimilarityHeatmap(encoder.EncodeText(u.transcript_phonemes),
                          encoder.EncodeSpeech(u.speech_frames));
    total += MeasureAlignment(heatmap, u.frame_alignment).margin();
  }
  return total / static_cast<double>(n);
}

namespace {

double DevLoss(const biasdec::SpeechTranslator& model,
               const corpus::Corpus& corpus, const JointTrainingConfig& config) {
  numerics::NoGradGuard no_grad;
  const auto& dev = corpus.Split("dev");
  const size_t n = std::min(dev.size(), static_cast<size_t>(config.dev_limit));
  double total = 0.0;
  for (size_t i = 0; i < n; ++i) {
    total += JointLoss(model, dev[i], corpus.target_vocab, config.alpha, 0.0,
                       nullptr)
                 .total.scalar();
  }
  return n ? total / static_cast<double>(n) : 0.0;
}

}  // namespace

biasdec::SpeechTranslator TrainJoint(const corpus::Corpus& corpus,
                                     const biasdec::TranslatorConfig& arch,
                                     const JointTrainingConfig& config,
                                     JointTrainingReport* report,
                                     const ProgressCallback& progress) {
  const auto& train = corpus.Split("train");
  if (train.empty()) throw std::invalid_argument("training split is empty");
  if (config.batch_size < 1 || config.epochs < 0) {
    throw std::invalid_argument("bad joint training schedule");
  }
  biasdec::TranslatorConfig plain = arch;
  plain.method = biasdec::BiasMethod::kNone;
  biasdec::SpeechTranslator model(plain, config.seed);
  numerics::Adam adam({.lr = config.lr});
  numerics::Rng rng(config.seed * 7919 + 17);
  numerics::Rng dropout_rng(config.seed * 104729 + 3);

  std::vector<size_t> order(config.train_limit > 0
                                ? std::min(train.size(),
                                           static_cast<size_t>(
                                               config.train_limit))
                                : train.size());
  std::iota(order.begin(), order.end(), 0);
  const int batches_per_epoch =
      static_cast<int>((order.size() + config.batch_size - 1) /
                       config.batch_size);
  const int total_steps = batches_per_epoch * config.epochs;
  JointTrainingReport local;
  int step = 0;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double epoch_loss = 0.0;
    for (size_t start = 0; start < order.size();
         start += config.batch_size) {
      const size_t end =
          std::min(order.size(), start + static_cast<size_t>(config.batch_size));
      model.params().ZeroGrad();
      double batch_loss = 0.0;
      for (size_t i = start; i < end; ++i) {
        JointLossParts parts;
        numerics::DropoutScope dropout(config.dropout, &dropout_rng);
        try {
          parts = JointLoss(model, train[order[i]], corpus.target_vocab,
                            config.alpha, config.layerdrop, &rng);
        } catch (const std::domain_error& e) {
          throw std::runtime_error("joint training diverged at step " +
                                   std::to_string(step) + ": " + e.what());
        }
        const double loss = parts.total.scalar();
        if (!std::isfinite(loss)) {
          throw std::runtime_error("joint training diverged at step " +
                                   std::to_string(step));
        }
        numerics::Backward(parts.total);
        batch_loss += loss;
      }
      adam.set_lr(numerics::WarmupCosineLr(step, total_steps,
                                           config.warmup_steps, config.lr));
      adam.Step(model.params(), 1.0 / static_cast<double>(end - start));
      epoch_loss += batch_loss;
      ++step;
    }
    epoch_loss /= static_cast<double>(order.size());
    local.epoch_loss.push_back(epoch_loss);
    std::ostringstream msg;
    msg << "joint epoch " << epoch + 1 << "/" << config.epochs
        << " loss " << epoch_loss;
    LOG(INFO) << msg.str();
    if (progress) progress(msg.str());
  }
  model.params().ZeroGrad();
  local.steps = step;
  local.dev_loss = DevLoss(model, corpus, config);
  local.dev_alignment_margin =
      DevAlignmentMargin(model.encoder(), corpus.Split("dev"),
                         config.dev_limit);
  if (report != nullptr) *report = local;
  if (local.dev_alignment_margin < config.min_alignment_margin) {
    std::ostringstream msg;
    msg << "dev alignment margin " << local.dev_alignment_margin
        << " below threshold " << config.min_alignment_margin;
    throw std::runtime_error(msg.str());
  }
  return model;
}

}  // namespace nedict::encoder
