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

// nedict: command-line driver for the dictionary-biased translation pipeline.

#include <cstdio>
#include <exception>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "glog/logging.h"

#include "nedict/pipeline/pipeline.h"

namespace {

namespace fs = std::filesystem;
using nedict::pipeline::RunConfig;
using nedict::pipeline::Workspace;

struct GlobalOptions {
  std::string config_path;
  std::vector<std::string> overrides;
  std::optional<int> jobs;
  std::optional<uint64_t> seed;
  std::string out;
  bool quiet = false;
};

void Progress(const GlobalOptions& g, const std::string& msg) {
  if (!g.quiet) std::cerr << msg << '\n';
}

std::string LambdaName(double lambda) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "fused_%.2f", lambda);
  return buf;
}

std::vector<std::string> TranslationsIn(const Workspace& ws) {
  std::vector<std::string> names;
  const fs::path dir = ws.root() / "translations";
  if (!fs::exists(dir)) return names;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.path().extension() == ".jsonl") names.push_back(e.path().stem());
  }
  std::sort(names.begin(), names.end());
  return names;
}

}  // namespace

int main(int argc, char** argv) {
  google::InitGoogleLogging(argv[0]);
  FLAGS_logtostderr = false;
  FLAGS_minloglevel = google::GLOG_WARNING;

  CLI::App app{"Named-entity dictionary detection and biased speech translation"};
  app.require_subcommand(1);
  GlobalOptions g;
  app.add_option("-c,--config", g.config_path, "INI config file")
      ->check(CLI::ExistingFile);
  app.add_option("--set", g.overrides,
                 "Override one config value, section.key=value (repeatable)");
  app.add_option("-j,--jobs", g.jobs, "Worker threads for per-utterance inference")
      ->check(CLI::PositiveNumber);
  app.add_option("--seed", g.seed, "Corpus seed (run.corpus_seed)");
  app.add_option("-o,--out", g.out, "Output root")
      ->envname(nedict::pipeline::kOutputRootEnv)
      ->default_str("nedict_out");
  app.add_flag("-q,--quiet", g.quiet, "Suppress progress messages");

  std::string split = "test";
  auto* gen = app.add_subcommand("gen-data", "Generate the synthetic corpus");
  auto* enc = app.add_subcommand("train-encoder",
                                 "Jointly train the speech/text translator");
  auto* heat = app.add_subcommand("heatmap",
                                  "Export text/speech similarity heatmaps");
  int heat_count = 4;
  heat->add_option("--split", split, "Corpus split")->capture_default_str();
  heat->add_option("--count", heat_count, "Utterances to export")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);

  auto* tdet = app.add_subcommand("train-detector", "Train the NE detector");
  auto* det = app.add_subcommand("detect", "Score every dictionary entry");
  std::optional<double> threshold;
  det->add_option("--split", split, "Corpus split")->capture_default_str();
  det->add_option("--threshold", threshold, "Detection threshold")
      ->check(CLI::Range(0.0, 1.0));
  auto* sweep = app.add_subcommand("sweep-threshold",
                                   "Recall and retrieved over thresholds");
  sweep->add_option("--split", split, "Corpus split")->capture_default_str();

  std::optional<std::string> method;
  auto* clas = app.add_subcommand("train-clas", "Train the biased decoder");
  clas->add_option("--method", method, "Bias attention: parallel|sequential")
      ->check(CLI::IsMember({"parallel", "sequential"}));
  std::optional<bool> freeze;
  clas->add_flag("--freeze-decoder,!--no-freeze-decoder", freeze,
                 "Train only bias attention and output layers");

  auto* tr = app.add_subcommand("translate", "Beam-search translation");
  std::optional<std::string> bias_from;
  std::optional<int> beam;
  std::string name;
  tr->add_option("--split", split, "Corpus split")->capture_default_str();
  tr->add_option("--bias-from", bias_from, "Bias source: detector|oracle|none")
      ->check(CLI::IsMember({"detector", "oracle", "none"}));
  tr->add_option("--method", method, "Bias attention: parallel|sequential")
      ->check(CLI::IsMember({"parallel", "sequential"}));
  tr->add_option("--beam", beam, "Beam width")->check(CLI::PositiveNumber);
  tr->add_option("--name", name, "Output name (default derived from flags)");

  auto* fused = app.add_subcommand("decode-fused",
                                   "Base model with class-LM shallow fusion");
  std::optional<double> lambda;
  fused->add_option("--split", split, "Corpus split")->capture_default_str();
  fused->add_option("--clm-lambda", lambda, "Fusion weight")
      ->check(CLI::NonNegativeNumber);
  fused->add_option("--beam", beam, "Beam width")->check(CLI::PositiveNumber);
  fused->add_option("--name", name, "Output name (default fused_<lambda>)");

  auto* ev = app.add_subcommand("evaluate", "Compute detection and translation metrics");
  std::vector<std::string> names;
  ev->add_option("--split", split, "Corpus split")->capture_default_str();
  ev->add_option("--translations", names,
                 "Translation outputs to score (default: all present)");
  bool no_detections = false;
  ev->add_flag("--no-detections", no_detections, "Skip detection metrics");

  auto* abl = app.add_subcommand("ablate", "Train and score every ablation row");
  double recall_target = 0.85;
  abl->add_option("--split", split, "Corpus split")->capture_default_str();
  abl->add_option("--recall", recall_target,
                  "Recall at which retrieved counts are compared")
      ->capture_default_str()
      ->check(CLI::Range(0.0, 1.0));

  CLI11_PARSE(app, argc, argv);
  auto* sub = app.get_subcommands().front();

  try {
    RunConfig config = g.config_path.empty()
                           ? RunConfig{}
                           : nedict::pipeline::LoadRunConfig(g.config_path);
    for (const auto& o : g.overrides) nedict::pipeline::ApplyOverride(config, o);
    if (g.jobs) config.jobs = *g.jobs;
    if (g.seed) config.corpus_seed = *g.seed;
    if (threshold) config.detector.threshold = *threshold;
    if (method) config.clas.method = nedict::biasdec::ParseBiasMethod(*method);
    if (freeze) config.clas.freeze_decoder = *freeze;
    if (bias_from) config.bias_from = *bias_from;
    if (beam) config.beam.beam = *beam;
    if (lambda) config.clm_lambda = *lambda;
    nedict::pipeline::ValidateRunConfig(config);

    const Workspace ws(g.out.empty() ? nedict::pipeline::DefaultOutputRoot()
                                     : fs::path(g.out));
    fs::create_directories(ws.root() / "configs");
    nedict::pipeline::SaveRunConfig(
        config, ws.root() / "configs" / (sub->get_name() + ".ini"));
    auto progress = [&g](const std::string& msg) { Progress(g, msg); };

    if (sub == gen) {
      std::cout << nedict::pipeline::GenerateData(config, ws) << '\n';
    } else if (sub == enc) {
      const auto r = nedict::pipeline::TrainEncoderStage(config, ws, progress);
      std::cout << "dev_loss " << r.dev_loss << " alignment_margin "
                << r.dev_alignment_margin << '\n';
    } else if (sub == heat) {
      for (const auto& p : nedict::pipeline::HeatmapStage(ws, split, heat_count)) {
        std::cout << p.string() << '\n';
      }
    } else if (sub == tdet) {
      nedict::pipeline::TrainDetectorStage(config, ws, progress);
      std::cout << ws.detector_model().string() << '\n';
    } else if (sub == det) {
      nedict::pipeline::DetectStage(config, ws, split);
      std::cout << ws.detections(split).string() << '\n';
    } else if (sub == sweep) {
      nedict::pipeline::SweepStage(config, ws, split);
      std::cout << ws.output("sweep_" + split + ".csv").string() << '\n';
    } else if (sub == clas) {
      nedict::pipeline::TrainClasStage(config, ws, progress);
      std::cout << ws.clas_model(config.clas.method).string() << '\n';
    } else if (sub == tr) {
      if (name.empty()) {
        name = config.bias_from == "none"
                   ? "base"
                   : "clas_" + nedict::biasdec::BiasMethodName(config.clas.method) +
                         "_" + config.bias_from;
      }
      nedict::pipeline::TranslateStage(config, ws, split, name);
      std::cout << ws.translations(name).string() << '\n';
    } else if (sub == fused) {
      if (name.empty()) name = LambdaName(config.clm_lambda);
      nedict::pipeline::DecodeFusedStage(config, ws, split, config.clm_lambda,
                                         name);
      std::cout << ws.translations(name).string() << '\n';
    } else if (sub == ev) {
      if (names.empty()) names = TranslationsIn(ws);
      const bool with_det =
          !no_detections && fs::exists(ws.detections(split));
      std::cout << nedict::pipeline::EvaluateStage(config, ws, split, names,
                                                   with_det);
    } else if (sub == abl) {
      nedict::pipeline::AblateStage(config, ws, split, recall_target, progress);
      std::cout << ws.output("ablation.csv").string() << '\n';
    }
  } catch (const std::exception& e) {
    std::cerr << "nedict " << sub->get_name() << ": " << e.what() << '\n';
    return 1;
  }
  return 0;
}
