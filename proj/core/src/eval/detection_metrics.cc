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

#include "nedict/eval/detection_metrics.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>

namespace nedict::eval {

namespace {

void CheckAligned(size_t detections, size_t utterances) {
  if (detections != utterances) {
    throw std::invalid_argument("detections do not cover the utterances");
  }
}

bool Contains(const std::vector<std::string>& ids, const std::string& id) {
  return std::find(ids.begin(), ids.end(), id) != ids.end();
}

bool SurfaceInTranscript(const corpus::NamedEntity& ne,
                         const std::vector<std::string>& transcript) {
  const auto surface = ne.SourceTokens();
  if (surface.empty() || surface.size() > transcript.size()) return false;
  return std::search(transcript.begin(), transcript.end(), surface.begin(),
                     surface.end()) != transcript.end();
}

}  // namespace

std::vector<std::string> Detected(const UtteranceScores& scores,
                                  double threshold) {
  std::vector<std::string> out;
  for (size_t i = 0; i < scores.ne_ids.size(); ++i) {
    if (scores.probabilities[i] >= threshold) out.push_back(scores.ne_ids[i]);
  }
  return out;
}

double DetectionReport::MinScoredRecall() const {
  double best = std::numeric_limits<double>::infinity();
  for (auto c : corpus::kScoredCategories) {
    auto it = recall.find(c);
    if (it != recall.end()) best = std::min(best, it->second);
  }
  return std::isinf(best) ? 0.0 : best;
}

std::map<corpus::Category, double> RecallByCategory(
    std::span<const std::vector<std::string>> detections,
    std::span<const corpus::Utterance> utterances,
    const corpus::Corpus& corpus) {
  CheckAligned(detections.size(), utterances.size());
  std::map<corpus::Category, std::pair<long, long>> counts;
  for (size_t i = 0; i < utterances.size(); ++i) {
    for (const auto& g : utterances[i].gold_entities) {
      auto& [hit, total] = counts[corpus.Entity(g.ne_id).category];
      ++total;
      if (Contains(detections[i], g.ne_id)) ++hit;
    }
  }
  std::map<corpus::Category, double> recall;
  for (const auto& [cat, c] : counts) {
    recall[cat] = static_cast<double>(c.first) / static_cast<double>(c.second);
  }
  return recall;
}

double AvgRetrieved(std::span<const std::vector<std::string>> detections) {
  if (detections.empty()) return 0.0;
  size_t total = 0;
  for (const auto& d : detections) total += d.size();
  return static_cast<double>(total) / static_cast<double>(detections.size());
}

double PrecisionCounts::precision() const {
  const long denom = true_positives + false_positives;
  return denom == 0 ? 1.0 : static_cast<double>(true_positives) / denom;
}

PrecisionCounts PrecisionNestedExcluded(
    std::span<const std::vector<std::string>> detections,
    std::span<const corpus::Utterance> utterances,
    const corpus::Corpus& corpus) {
  CheckAligned(detections.size(), utterances.size());
  PrecisionCounts counts;
  for (size_t i = 0; i < utterances.size(); ++i) {
    std::set<std::string> gold;
    for (const auto& g : utterances[i].gold_entities) gold.insert(g.ne_id);
    for (const auto& id : detections[i]) {
      if (gold.count(id)) {
        ++counts.true_positives;
      } else if (SurfaceInTranscript(corpus.Entity(id),
                                     utterances[i].transcript_tokens)) {
        ++counts.excluded;
      } else {
        ++counts.false_positives;
      }
    }
  }
  return counts;
}

double NaivePrecision(std::span<const std::vector<std::string>> detections,
                      std::span<const corpus::Utterance> utterances) {
  CheckAligned(detections.size(), utterances.size());
  long tp = 0;
  long all = 0;
  for (size_t i = 0; i < utterances.size(); ++i) {
    std::set<std::string> gold;
    for (const auto& g : utterances[i].gold_entities) gold.insert(g.ne_id);
    for (const auto& id : detections[i]) {
      ++all;
      if (gold.count(id)) ++tp;
    }
  }
  return all == 0 ? 1.0 : static_cast<double>(tp) / all;
}

namespace {

std::vector<std::vector<std::string>> DetectAll(
    std::span<const UtteranceScores> scores, double threshold) {
  std::vector<std::vector<std::string>> out;
  out.reserve(scores.size());
  for (const auto& s : scores) out.push_back(Detected(s, threshold));
  return out;
}

}  // namespace

DetectionReport EvaluateDetections(std::span<const UtteranceScores> scores,
                                   std::span<const corpus::Utterance> utterances,
                                   const corpus::Corpus& corpus,
                                   double threshold) {
  const auto detections = DetectAll(scores, threshold);
  DetectionReport report;
  report.threshold = threshold;
  report.recall = RecallByCategory(detections, utterances, corpus);
  report.avg_retrieved = AvgRetrieved(detections);
  report.precision =
      PrecisionNestedExcluded(detections, utterances, corpus).precision();
  return report;
}

std::vector<SweepPoint> SweepThresholds(
    std::span<const UtteranceScores> scores,
    std::span<const corpus::Utterance> utterances,
    const corpus::Corpus& corpus, std::span<const double> thresholds) {
  std::vector<SweepPoint> out;
  for (double t : thresholds) {
    const auto detections = DetectAll(scores, t);
    out.push_back({t, RecallByCategory(detections, utterances, corpus),
                   AvgRetrieved(detections)});
  }
  return out;
}

double RetrievedAtRecall(std::span<const UtteranceScores> scores,
                         std::span<const corpus::Utterance> utterances,
                         const corpus::Corpus& corpus, double target_recall,
                         double* threshold_out) {
  CheckAligned(scores.size(), utterances.size());
  // The recall-limiting threshold per category is the k-th largest gold
  // probability; the overall threshold is the minimum over categories.
  std::map<corpus::Category, std::vector<double>> gold_scores;
  for (size_t i = 0; i < utterances.size(); ++i) {
    for (const auto& g : utterances[i].gold_entities) {
      const auto cat = corpus.Entity(g.ne_id).category;
      if (cat == corpus::Category::kOrg) continue;
      const auto& ids = scores[i].ne_ids;
      const auto it = std::find(ids.begin(), ids.end(), g.ne_id);
      const double p = it == ids.end()
                           ? -std::numeric_limits<double>::infinity()
                           : scores[i].probabilities[it - ids.begin()];
      gold_scores[cat].push_back(p);
    }
  }
  double threshold = std::numeric_limits<double>::infinity();
  for (auto& [cat, v] : gold_scores) {
    std::sort(v.begin(), v.end(), std::greater<>());
    const size_t needed = static_cast<size_t>(
        std::ceil(target_recall * static_cast<double>(v.size()) - 1e-9));
    const double t = needed == 0 ? std::numeric_limits<double>::infinity()
                                 : v[std::min(needed, v.size()) - 1];
    threshold = std::min(threshold, t);
  }
  if (threshold_out != nullptr) *threshold_out = threshold;
  return AvgRetrieved(DetectAll(scores, threshold));
}

}  // namespace nedict::eval
