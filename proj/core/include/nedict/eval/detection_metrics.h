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

#ifndef NEDICT_EVAL_DETECTION_METRICS_H_
#define NEDICT_EVAL_DETECTION_METRICS_H_

#include <map>
#include <span>
#include <string>
#include <vector>

#include "nedict/corpus/types.h"

namespace nedict::eval {

// Scored dictionary entries for one utterance.
struct UtteranceScores {
  std::string utterance_id;
  std::vector<std::string> ne_ids;
  std::vector<double> probabilities;
};

// Entity ids at or above `threshold`.
std::vector<std::string> Detected(const UtteranceScores& scores,
                                  double threshold);

struct DetectionReport {
  std::map<corpus::Category, double> recall;  // categories with gold only
  double avg_retrieved = 0.0;
  double precision = 0.0;  // nested-excluded
  double threshold = 0.0;

  // Smallest recall over the scored categories present.
  double MinScoredRecall() const;
};

// Detected gold mentions over gold mentions, per category. Categories
// without gold mentions are absent from the result.
std::map<corpus::Category, double> RecallByCategory(
    std::span<const std::vector<std::string>> detections,
    std::span<const corpus::Utterance> utterances,
    const corpus::Corpus& corpus);

// Mean number of detected entries per utterance.
double AvgRetrieved(std::span<const std::vector<std::string>> detections);

struct PrecisionCounts {
  long true_positives = 0;
  long false_positives = 0;
  long excluded = 0;  // non-gold detections whose surface is in the transcript
  double precision() const;
};

// A non-gold detection whose source surface occurs as a contiguous token
// run of the transcript (e.g. "X" inside a gold "Treaty of X") counts as
// neither TP nor FP.
PrecisionCounts PrecisionNestedExcluded(
    std::span<const std::vector<std::string>> detections,
    std::span<const corpus::Utterance> utterances,
    const corpus::Corpus& corpus);

// Plain TP / (TP + FP) without exclusions.
double NaivePrecision(std::span<const std::vector<std::string>> detections,
                      std::span<const corpus::Utterance> utterances);

DetectionReport EvaluateDetections(std::span<const UtteranceScores> scores,
                                   std::span<const corpus::Utterance> utterances,
                                   const corpus::Corpus& corpus,
                                   double threshold);

// One point of a threshold sweep.
struct SweepPoint {
  double threshold = 0.0;
  std::map<corpus::Category, double> recall;
  double avg_retrieved = 0.0;
};

std::vector<SweepPoint> SweepThresholds(
    std::span<const UtteranceScores> scores,
    std::span<const corpus::Utterance> utterances,
    const corpus::Corpus& corpus, std::span<const double> thresholds);

// Mean retrieved at the highest threshold whose minimum scored-category
// recall reaches `target_recall`, searching the distinct score values.
// Returns the retrieved count and writes the threshold used.
double RetrievedAtRecall(std::span<const UtteranceScores> scores,
                         std::span<const corpus::Utterance> utterances,
                         const corpus::Corpus& corpus, double target_recall,
                         double* threshold_out = nullptr);

}  // namespace nedict::eval

#endif  // NEDICT_EVAL_DETECTION_METRICS_H_
