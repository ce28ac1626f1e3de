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

#ifndef NEDICT_ENCODER_JOINT_TRAINING_H_
#define NEDICT_ENCODER_JOINT_TRAINING_H_

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "nedict/biasdec/translator.h"
#include "nedict/corpus/types.h"

namespace nedict::encoder {

struct JointTrainingConfig {
  int epochs = 12;
  int batch_size = 16;
  double lr = 2e-3;
  int warmup_steps = 60;
  double alpha = 0.5;       // weight of the cosine alignment term
  double layerdrop = 0.1;   // encoder LayerDrop during training
  double dropout = 0.0;     // residual-branch dropout during training
  double min_alignment_margin = 0.2;
  int dev_limit = 60;       // dev utterances used for loss and alignment
  int train_limit = 0;      // 0 = whole training split
  uint64_t seed = 1;
};

struct JointLossParts {
  numerics::Var total;
  double s2t = 0.0;
  double t2t = 0.0;
  double alignment = 0.0;  // 1 - mean cosine of aligned positions
};

// Per-utterance objective: S2T CE + T2T CE + alpha * (1 - mean cosine),
// where each speech frame is paired with the phoneme it realizes.
JointLossParts JointLoss(const biasdec::SpeechTranslator& model,
                         const corpus::Utterance& utterance,
                         const corpus::Vocabulary& vocab, double alpha,
                         double layerdrop, numerics::Rng* rng);

struct JointTrainingReport {
  std::vector<double> epoch_loss;
  double dev_loss = 0.0;
  double dev_alignment_margin = 0.0;
  int steps = 0;
};

// Frame-to-phoneme alignment margin averaged over utterances.
double DevAlignmentMargin(const SharedEncoder& encoder,
                          const std::vector<corpus::Utterance>& utterances,
                          int limit);

using ProgressCallback = std::function<void(const std::string&)>;

// Trains encoder and base decoder from scratch. Throws std::runtime_error
// naming the step when the loss becomes non-finite, and when the final dev
// alignment margin stays below config.min_alignment_margin.
biasdec::SpeechTranslator TrainJoint(const corpus::Corpus& corpus,
                                     const biasdec::TranslatorConfig& arch,
                                     const JointTrainingConfig& config,
                                     JointTrainingReport* report = nullptr,
                                     const ProgressCallback& progress = {});

// Architecture sized for a corpus (vocabulary, phoneme inventory, frames).
biasdec::TranslatorConfig DefaultArchitecture(const corpus::Corpus& corpus);

}  // namespace nedict::encoder

#endif  // NEDICT_ENCODER_JOINT_TRAINING_H_
