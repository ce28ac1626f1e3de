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

#ifndef NEDICT_PIPELINE_RUN_CONFIG_H_
#define NEDICT_PIPELINE_RUN_CONFIG_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "nedict/biasdec/beam_search.h"
#include "nedict/biasdec/clas_training.h"
#include "nedict/corpus/generator.h"
#include "nedict/detector/training.h"
#include "nedict/encoder/joint_training.h"
#include "nedict/rescore/ngram_lm.h"

namespace nedict::pipeline {

// Model sizes; vocabulary and input sizes come from the corpus.
struct ModelDims {
  int dim = 64;
  int heads = 4;
  int ffn = 128;
  int encoder_layers = 4;
  int decoder_layers = 2;
};

// Every knob of a pipeline run. Serialized as INI with sections
// run, corpus, model, encoder, detector, clas, rescore and decode.
struct RunConfig {
  uint64_t corpus_seed = 2026;
  int jobs = 1;
  corpus::CorpusConfig corpus;
  ModelDims model;
  encoder::JointTrainingConfig encoder;
  detector::DetectorConfig detector_arch;
  detector::DetectorTrainingConfig detector;
  biasdec::ClasTrainingConfig clas;
  std::string bias_from = "detector";  // detector | oracle | none
  rescore::NgramOptions ngram;
  double clm_lambda = 0.10;
  std::vector<double> lambda_grid = {0.10, 0.15, 0.20};
  biasdec::BeamOptions beam;
};

// Reads an INI file over the defaults. Unknown sections or keys are errors.
RunConfig LoadRunConfig(const std::filesystem::path& path);
RunConfig ParseRunConfig(const std::string& ini_text);
// Applies one "section.key=value" assignment.
void ApplyOverride(RunConfig& config, const std::string& assignment);
// Throws std::invalid_argument naming the first bad value.
void ValidateRunConfig(const RunConfig& config);
std::string RunConfigToIni(const RunConfig& config);
void SaveRunConfig(const RunConfig& config, const std::filesystem::path& path);

biasdec::TranslatorConfig ArchitectureFor(const RunConfig& config,
                                          const corpus::Corpus& corpus);

}  // namespace nedict::pipeline

#endif  // NEDICT_PIPELINE_RUN_CONFIG_H_
