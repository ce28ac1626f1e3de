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

#ifndef NEDICT_BIASDEC_CLAS_TRAINING_H_
#define NEDICT_BIASDEC_CLAS_TRAINING_H_

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "nedict/biasdec/translator.h"
#include "nedict/corpus/types.h"
#include "nedict/numerics/parameters.h"

namespace nedict::biasdec {

struct ClasTrainingConfig {
  BiasMethod method = BiasMethod::kParallel;
  // Train only the bias encoder, bias attention, no-bias vector and the
  // output projection.
  bool freeze_decoder = false;
  int distractors = 3;     // random dictionary entries added per utterance
  double gold_drop = 0.1;  // chance of dropping each gold entity
  int epochs = 30;
  int batch_size = 16;
  double lr = 2e-3;
  int warmup_steps = 50;
  int train_limit = 0;  // 0 = whole train split
  int dev_limit = 60;
  uint64_t seed = 1;
};

struct ClasTrainingReport {
  std::vector<double> epoch_loss;
  std::vector<double> dev_loss;
  int steps = 0;
};

// Marks the trainable subset of a bias-enabled model. The encoder is always
// frozen.
void SetClasTrainable(SpeechTranslator& model, bool freeze_decoder);

// Training bias list for one utterance: its gold entities (each dropped with
// probability `gold_drop`) plus `distractors` other dictionary entries, in
// shuffled order.
std::vector<const corpus::NamedEntity*> SampleTrainingBias(
    const corpus::Utterance& utterance, const corpus::Corpus& corpus,
    int distractors, double gold_drop, numerics::Rng& rng);

// Mean teacher-forced loss over utterances with the given bias lists.
double ClasDevLoss(const SpeechTranslator& model, const corpus::Corpus& corpus,
                   const std::vector<corpus::Utterance>& utterances,
                   const std::vector<std::vector<const corpus::NamedEntity*>>&
                       bias_lists);

using ClasProgress = std::function<void(const std::string&)>;

// Builds a CLAS model from a trained base model and fits the new
// components on NE-tagged targets.
SpeechTranslator TrainClas(const SpeechTranslator& base,
                           const corpus::Corpus& corpus,
                           const ClasTrainingConfig& config,
                           ClasTrainingReport* report = nullptr,
                           const ClasProgress& progress = {});

}  // namespace nedict::biasdec

#endif  // NEDICT_BIASDEC_CLAS_TRAINING_H_
