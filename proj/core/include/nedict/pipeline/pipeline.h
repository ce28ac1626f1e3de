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

#ifndef NEDICT_PIPELINE_PIPELINE_H_
#define NEDICT_PIPELINE_PIPELINE_H_

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "nedict/biasdec/translator.h"
#include "nedict/corpus/types.h"
#include "nedict/detector/detector.h"
#include "nedict/eval/detection_metrics.h"
#include "nedict/pipeline/run_config.h"

namespace nedict::pipeline {

using Progress = std::function<void(const std::string&)>;

// Environment variable naming the default output root.
inline constexpr char kOutputRootEnv[] = "NEDICT_OUTPUT_ROOT";

// Output root from the environment, else "nedict_out".
std::filesystem::path DefaultOutputRoot();

// Fixed artifact layout under one output root.
class Workspace {
 public:
  explicit Workspace(std::filesystem::path root);

  const std::filesystem::path& root() const { return root_; }
  std::filesystem::path corpus_dir() const { return root_ / "corpus"; }
  std::filesystem::path base_model() const;
  std::filesystem::path detector_model() const;
  std::filesystem::path clas_model(biasdec::BiasMethod method) const;
  std::filesystem::path class_lm() const;
  std::filesystem::path generic_lm() const;
  std::filesystem::path detections(const std::string& split) const;
  std::filesystem::path translations(const std::string& name) const;
  std::filesystem::path output(const std::string& file) const;

  // Throws std::runtime_error with the subcommand that creates `path`.
  static void Require(const std::filesystem::path& path,
                      const std::string& producer);

 private:
  std::filesystem::path root_;
};

// Hex SHA-256 of a file, and of a directory (sorted relative names and
// contents).
std::string FileSha256(const std::filesystem::path& path);
std::string DirectorySha256(const std::filesystem::path& dir);

// gen-data: writes the corpus and corpus.sha256; returns the hash.
std::string GenerateData(const RunConfig& config, const Workspace& ws);
corpus::Corpus LoadWorkspaceCorpus(const Workspace& ws);

// train-encoder: joint S2T/T2T training of the base model.
encoder::JointTrainingReport TrainEncoderStage(const RunConfig& config,
                                               const Workspace& ws,
                                               const Progress& progress = {});

// heatmap: CSV and PGM similarity heatmaps for the first `count` utterances
// of a split; returns the written paths.
std::vector<std::filesystem::path> HeatmapStage(const Workspace& ws,
                                                const std::string& split,
                                                int count);

detector::DetectorConfig DetectorArchitecture(const RunConfig& config);
detector::DetectorTrainingReport TrainDetectorStage(
    const RunConfig& config, const Workspace& ws,
    const Progress& progress = {});

// detect: scores every dictionary entry for every utterance of a split and
// writes JSONL {utterance_id, ne_id, probability, detected}.
std::vector<eval::UtteranceScores> DetectStage(const RunConfig& config,
                                               const Workspace& ws,
                                               const std::string& split);
void WriteDetections(const std::filesystem::path& path,
                     std::span<const eval::UtteranceScores> scores,
                     double threshold);
std::vector<eval::UtteranceScores> ReadDetections(
    const std::filesystem::path& path);

// sweep-threshold: CSV threshold,recall_<CAT>...,retrieved.
std::vector<eval::SweepPoint> SweepStage(const RunConfig& config,
                                         const Workspace& ws,
                                         const std::string& split);

biasdec::ClasTrainingReport TrainClasStage(const RunConfig& config,
                                           const Workspace& ws,
                                           const Progress& progress = {});

struct TranslationRecord {
  std::string utterance_id;
  std::vector<std::string> hypothesis;
  std::vector<std::string> bias_ne_ids;
};

void WriteTranslations(const std::filesystem::path& path,
                       std::span<const TranslationRecord> records);
std::vector<TranslationRecord> ReadTranslations(
    const std::filesystem::path& path);

// Bias lists for a split: detected entities (from the detections file),
// gold entities, or nothing.
std::vector<std::vector<std::string>> BiasLists(const RunConfig& config,
                                                const Workspace& ws,
                                                const corpus::Corpus& corpus,
                                                const std::string& split);

// translate: with bias_from "none" the base model decodes; otherwise the
// CLAS model for config.clas.method decodes with the bias lists. Writes
// translations/<name>.jsonl and returns the records.
std::vector<TranslationRecord> TranslateStage(const RunConfig& config,
                                              const Workspace& ws,
                                              const std::string& split,
                                              const std::string& name);

// Trains the class LM on dictionary target forms and the generic LM on
// training targets, unless both files exist.
void EnsureLanguageModels(const RunConfig& config, const Workspace& ws,
                          const corpus::Corpus& corpus);

// decode-fused: base model with class/generic LM shallow fusion.
std::vector<TranslationRecord> DecodeFusedStage(const RunConfig& config,
                                                const Workspace& ws,
                                                const std::string& split,
                                                double lambda,
                                                const std::string& name);

// evaluate: detection metrics (when a detections file is given) and
// translation metrics for each named translations file. Writes
// metrics.json and metrics.csv; returns the JSON text.
std::string EvaluateStage(const RunConfig& config, const Workspace& ws,
                          const std::string& split,
                          const std::vector<std::string>& translation_names,
                          bool with_detections);

struct AblationRow {
  std::string name;
  detector::DetectorConfig arch;
  detector::DetectorTrainingConfig training;
};

struct AblationResult {
  std::string name;
  eval::DetectionReport at_threshold;
  double retrieved_at_recall = 0.0;  // at config recall target
  double matched_threshold = 0.0;
};

// Cumulative detector configurations: base, +layerdrop, +train-on-NE,
// +modality, +attn-mask, +maxlen5, +margin.
std::vector<AblationRow> AblationRows(const RunConfig& config);

// Trains one detector per row on the workspace encoder and evaluates it on
// `split`; writes ablation.csv.
std::vector<AblationResult> AblateStage(const RunConfig& config,
                                        const Workspace& ws,
                                        const std::string& split,
                                        double recall_target,
                                        const Progress& progress = {});

// Scores and evaluates one detector configuration.
AblationResult TrainAndEvaluateDetector(const AblationRow& row,
                                        const RunConfig& config,
                                        const corpus::Corpus& corpus,
                                        const encoder::SharedEncoder& encoder,
                                        const std::string& split,
                                        double recall_target,
                                        const Progress& progress = {});

}  // namespace nedict::pipeline

#endif  // NEDICT_PIPELINE_PIPELINE_H_
