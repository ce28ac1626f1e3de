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

#ifndef NEDICT_DETECTOR_TRAINING_H_
#define NEDICT_DETECTOR_TRAINING_H_

#include <functional>
#include <string>
#include <vector>

#include "nedict/detector/detector.h"
#include "nedict/detector/sampling.h"
#include "nedict/eval/detection_metrics.h"

namespace nedict::detector {

struct DetectorTrainingConfig {
  int epochs = 45;
  int batch_size = 16;
  double lr = 2e-3;
  int warmup_steps = 50;
  SamplingConfig sampling;
  double margin = 0.2;
  double ranking_weight = 1.0;  // 0 removes the margin ranking term
  double layerdrop = 0.1;       // encoder LayerDrop at feature extraction
  int layerdrop_variants = 4;   // cached droppy passes per utterance
  double head_layerdrop = 0.0;  // LayerDrop inside the detector itself
  double speech_mask_fraction = 0.0;
  int dev_limit = 0;  // dev utterances scored per epoch; 0 skips
  double threshold = kDefaultThreshold;
  uint64_t seed = 1;
};

// max(0, margin - (s_pos - s_neg)) on probabilities.
double RankingTerm(double s_pos, double s_neg, double margin);

// BCE(s+, 1) + BCE(s-, 0) + weight * max(0, margin - (s+ - s-)).
numerics::Var PairLoss(const DetectorModel& model, const numerics::Var& pos,
                       const numerics::Var& neg, const numerics::Var& speech,
                       double margin, double ranking_weight,
                       double head_layerdrop = 0.0,
                       numerics::Rng* rng = nullptr);

struct DetectorEpochLog {
  double loss = 0.0;
  eval::DetectionReport dev;
};

struct DetectorTrainingReport {
  std::vector<DetectorEpochLog> epochs;
};

// Scores every dictionary entry against every utterance.
std::vector<eval::UtteranceScores> ScoreUtterances(
    const DetectorModel& model, const encoder::SharedEncoder& encoder,
    std::span<const EncodedEntity> dictionary,
    std::span<const corpus::Utterance> utterances, int jobs = 1);

std::vector<eval::UtteranceScores> CosineScoreUtterances(
    const encoder::SharedEncoder& encoder,
    std::span<const EncodedEntity> dictionary,
    std::span<const corpus::Utterance> utterances, int jobs = 1);

// Trains a detector on frozen encoder features.
DetectorModel TrainDetector(
    const corpus::Corpus& corpus, const encoder::SharedEncoder& encoder,
    const DetectorConfig& arch, const DetectorTrainingConfig& config,
    DetectorTrainingReport* report = nullptr,
    const std::function<void(const std::string&)>& progress = {});

}  // namespace nedict::detector

#endif  // NEDICT_DETECTOR_TRAINING_H_
