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

// Acceptance runner: trains the default pipeline end to end and prints one
// PASS/FAIL line per acceptance criterion. Exit status is nonzero when any
// criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "glog/logging.h"
#include "json.hpp"

#include "acceptance/gradient_suite.h"
#include "acceptance/identity_suite.h"
#include "acceptance/metric_suite.h"
#include "nedict/detector/detector.h"
#include "nedict/detector/training.h"
#include "nedict/eval/translation_metrics.h"
#include "nedict/pipeline/pipeline.h"

namespace nedict::checks {
namespace {

namespace fs = std::filesystem;
using corpus::Category;
using pipeline::RunConfig;
using pipeline::Workspace;
using Clock = std::chrono::steady_clock;

double Since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string Fmt(double v, int digits = 3) {
  std::ostringstream out;
  out.precision(digits);
  out << std::fixed << v;
  return out.str();
}

std::string RecallText(const std::map<Category, double>& recall) {
  std::string out;
  for (const auto& [cat, r] : recall) {
    if (!out.empty()) out += " ";
    out += std::string(corpus::CategoryName(cat)) + "=" + Fmt(r);
  }
  return out;
}

double MeanScoredRecall(const eval::DetectionReport& r) {
  double total = 0.0;
  int n = 0;
  for (Category c : corpus::kScoredCategories) {
    if (auto it = r.recall.find(c); it != r.recall.end()) {
      total += it->second;
      ++n;
    }
  }
  return n ? total / n : 0.0;
}

double RecallOf(const eval::DetectionReport& r, Category c) {
  auto it = r.recall.find(c);
  return it == r.recall.end() ? 0.0 : it->second;
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

// Artifacts of the default-config run, built on first use and kept in the
// work directory. Stage times are stored so a reused run still reports them.
class DefaultRun {
 public:
  DefaultRun(fs::path root, int jobs, bool reuse)
      : ws_(std::move(root)), reuse_(reuse) {
    config_.jobs = jobs;
    fs::create_directories(ws_.root());
    const fs::path times = ws_.output("stage_seconds.json");
    if (reuse_ && fs::exists(times)) {
      std::ifstream in(times);
      seconds_ = nlohmann::json::parse(in).get<std::map<std::string, double>>();
    }
  }

  const RunConfig& config() const { return config_; }
  const Workspace& ws() const { return ws_; }

  const corpus::Corpus& Corpus() {
    Stage("gen-data", ws_.corpus_dir() / "meta.json",
          [&] { pipeline::GenerateData(config_, ws_); });
    if (!corpus_) {
      corpus_ = std::make_unique<corpus::Corpus>(
          pipeline::LoadWorkspaceCorpus(ws_));
    }
    return *corpus_;
  }

  const biasdec::SpeechTranslator& Base() {
    Corpus();
    Stage("train-encoder", ws_.base_model(), [&] {
      pipeline::TrainEncoderStage(config_, ws_, Log);
    });
    if (!base_) {
      base_ = std::make_unique<biasdec::SpeechTranslator>(
          biasdec::SpeechTranslator::Load(ws_.base_model()));
    }
    return *base_;
  }

  const std::vector<eval::UtteranceScores>& DetectorScores() {
    Base();
    Stage("train-detector", ws_.detector_model(), [&] {
      pipeline::TrainDetectorStage(config_, ws_, Log);
    });
    Stage("detect", ws_.detections("test"),
          [&] { pipeline::DetectStage(config_, ws_, "test"); });
    if (scores_.empty()) scores_ = pipeline::ReadDetections(ws_.detections("test"));
    return scores_;
  }

  void Clas() {
    DetectorScores();
    Stage("train-clas", ws_.clas_model(config_.clas.method), [&] {
      pipeline::TrainClasStage(config_, ws_, Log);
    });
  }

  void Translation(const std::string& name, const std::string& bias_from,
                   std::optional<double> lambda) {
    if (bias_from != "none") Clas();
    Base();
    Stage("translate-" + name, ws_.translations(name), [&] {
      RunConfig c = config_;
      c.bias_from = bias_from;
      if (lambda) {
        pipeline::DecodeFusedStage(c, ws_, "test", *lambda, name);
      } else {
        pipeline::TranslateStage(c, ws_, "test", name);
      }
    });
  }

  double Seconds(const std::string& stage) const {
    auto it = seconds_.find(stage);
    return it == seconds_.end() ? 0.0 : it->second;
  }

  static void Log(const std::string& msg) { std::cerr << "  " << msg << '\n'; }

 private:
  void Stage(const std::string& name, const fs::path& artifact,
             const std::function<void()>& build) {
    if (done_.count(name)) return;
    if (!(reuse_ && fs::exists(artifact) && seconds_.count(name))) {
      std::cerr << "[stage] " << name << '\n';
      const auto start = Clock::now();
      build();
      seconds_[name] = Since(start);
      std::ofstream(ws_.output("stage_seconds.json"))
          << nlohmann::json(seconds_).dump(2) << '\n';
    }
    done_.insert(name);
  }

  RunConfig config_;
  Workspace ws_;
  bool reuse_;
  std::map<std::string, double> seconds_;
  std::set<std::string> done_;
  std::unique_ptr<corpus::Corpus> corpus_;
  std::unique_ptr<biasdec::SpeechTranslator> base_;
  std::vector<eval::UtteranceScores> scores_;
};

// 1. Finite-difference gradient checks on randomized shapes.
Outcome GradientCriterion() {
  const auto start = Clock::now();
  double worst = 0.0;
  std::string worst_case;
  long entries = 0;
  int cases = 0;
  for (uint64_t seed : {1, 2, 3}) {
    for (const auto& c : RunGradientSuite(seed)) {
      ++cases;
      entries += c.entries_checked;
      if (c.max_rel_error >= worst) {
        worst = c.max_rel_error;
        worst_case = c.name + " (" + c.worst_param + ")";
      }
    }
  }
  const double secs = Since(start);
  std::ostringstream d;
  d << cases << " cases, " << entries << " entries, max rel error "
    << worst << " at " << worst_case << ", " << Fmt(secs, 1) << " s";
  return {worst < 1e-4 && secs < 120.0, d.str()};
}

// 2. Attention mask against the direct rule, then zero weight on every
// forbidden pair in every layer and head of a forward pass.
Outcome MaskCriterion() {
  long cells = 0;
  for (int p = 1; p <= 8; ++p) {
    for (int s = 1; s <= 40; ++s) {
      const numerics::Mask m = detector::BuildAttentionMask(p, s);
      const int first_speech = p + 2;
      if (m.rows() != p + s + 2 || m.cols() != p + s + 2) {
        return {false, "mask shape wrong at P=" + std::to_string(p)};
      }
      for (int q = 0; q < m.rows(); ++q) {
        for (int k = 0; k < m.cols(); ++k) {
          const bool speech_pair = q >= first_speech && k >= first_speech;
          const bool allowed = !(speech_pair && std::abs(q - k) > 2 * p);
          if (m(q, k) != allowed) {
            return {false, "mismatch at P=" + std::to_string(p) +
                               " S=" + std::to_string(s)};
          }
          ++cells;
        }
      }
    }
  }
  detector::DetectorConfig arch;
  arch.dim = 16;
  arch.heads = 4;
  arch.ffn = 32;
  detector::DetectorModel model(arch, 7);
  numerics::Rng rng(8);
  long forbidden = 0;
  double largest = 0.0;
  for (auto [p, s] : {std::pair{1, 40}, {2, 23}, {3, 31}, {5, 40}, {8, 40}}) {
    numerics::AttentionTrace trace;
    {
      numerics::NoGradGuard no_grad;
      model.Logit(numerics::Var(numerics::NormalInit(p, 16, 1.0, rng)),
                  numerics::Var(numerics::NormalInit(s, 16, 1.0, rng)), &trace);
    }
    if (trace.weights.size() !=
        static_cast<size_t>(detector::kDetectorLayers * arch.heads)) {
      return {false, "attention trace missing layers or heads"};
    }
    const numerics::Mask m = detector::BuildAttentionMask(p, s);
    for (const auto& w : trace.weights) {
      for (int q = 0; q < m.rows(); ++q) {
        for (int k = 0; k < m.cols(); ++k) {
          if (!m(q, k)) {
            largest = std::max(largest, std::abs(w(q, k)));
            ++forbidden;
          }
        }
      }
    }
  }
  std::ostringstream d;
  d << cells << " mask cells match the rule; " << forbidden
    << " forbidden weights across " << detector::kDetectorLayers
    << " layers x " << arch.heads << " heads, max |w| " << largest;
  return {largest == 0.0 && forbidden > 0, d.str()};
}

// 3. Full detector on the default corpus against the cosine baseline.
Outcome DetectorCriterion(DefaultRun& run, eval::DetectionReport* report_out) {
  const auto& scores = run.DetectorScores();
  const auto& corpus = run.Corpus();
  const auto& test = corpus.Split("test");
  const double threshold = run.config().detector.threshold;
  const auto report = eval::EvaluateDetections(scores, test, corpus, threshold);
  *report_out = report;
  const double matched = report.MinScoredRecall();
  const auto dictionary = detector::EncodeDictionary(
      run.Base().encoder(), corpus.dictionary, corpus.lexicon);
  const auto cosine = detector::CosineScoreUtterances(
      run.Base().encoder(), dictionary, test, run.config().jobs);
  double cosine_threshold = 0.0;
  const double cosine_retrieved = eval::RetrievedAtRecall(
      cosine, test, corpus, matched, &cosine_threshold);
  const double minutes =
      (run.Seconds("gen-data") + run.Seconds("train-encoder") +
       run.Seconds("train-detector") + run.Seconds("detect")) / 60.0;
  std::ostringstream d;
  d << "threshold " << threshold << ": recall " << RecallText(report.recall)
    << ", retrieved " << Fmt(report.avg_retrieved, 2)
    << "; cosine at recall " << Fmt(matched) << " retrieves "
    << Fmt(cosine_retrieved, 2) << "; " << corpus.dictionary.size()
    << "-entry dictionary, " << test.size() << " test utterances; "
    << Fmt(minutes, 1) << " min";
  const bool pass = matched >= 0.85 && report.avg_retrieved <= 2.5 &&
                    cosine_retrieved > report.avg_retrieved &&
                    corpus.dictionary.size() == 294 && minutes <= 20.0;
  return {pass, d.str()};
}

// 4. Leave-one-out trends against the full detector.
Outcome AblationCriterion(DefaultRun& run, double recall_target) {
  const auto& corpus = run.Corpus();
  const auto& test = corpus.Split("test");
  const RunConfig& config = run.config();
  pipeline::AblationResult full;
  full.name = "full";
  full.at_threshold = eval::EvaluateDetections(run.DetectorScores(), test,
                                               corpus, config.detector.threshold);
  full.retrieved_at_recall = eval::RetrievedAtRecall(
      run.DetectorScores(), test, corpus, recall_target, &full.matched_threshold);

  pipeline::AblationRow row{"", pipeline::DetectorArchitecture(config),
                            config.detector};
  auto variant = [&](const std::string& name,
                     const std::function<void(pipeline::AblationRow&)>& edit) {
    pipeline::AblationRow r = row;
    r.name = name;
    edit(r);
    std::cerr << "[stage] ablation " << name << '\n';
    return pipeline::TrainAndEvaluateDetector(r, config, corpus,
                                              run.Base().encoder(), "test",
                                              recall_target, DefaultRun::Log);
  };
  const auto no_margin = variant("no-margin", [](pipeline::AblationRow& r) {
    r.training.ranking_weight = 0.0;
  });
  const auto no_ne = variant("no-ne-mixing", [](pipeline::AblationRow& r) {
    r.training.sampling.ne_prob = 0.0;
  });
  const auto no_mask = variant("no-mask", [](pipeline::AblationRow& r) {
    r.arch.attention_mask = false;
  });

  std::ostringstream csv;
  csv << "config,recall_GPE,recall_LOC,recall_PER,retrieved,"
         "retrieved_at_recall\n";
  for (const pipeline::AblationResult* r : std::initializer_list<const pipeline::AblationResult*>
       {&full, &no_margin, &no_ne, &no_mask}) {
    csv << r->name;
    for (Category c : corpus::kScoredCategories) {
      csv << ',' << RecallOf(r->at_threshold, c);
    }
    csv << ',' << r->at_threshold.avg_retrieved << ','
        << r->retrieved_at_recall << '\n';
  }
  std::ofstream(run.ws().output("leave_one_out.csv")) << csv.str();

  const bool margin_ok = no_margin.retrieved_at_recall > full.retrieved_at_recall;
  const bool ne_ok =
      MeanScoredRecall(no_ne.at_threshold) < MeanScoredRecall(full.at_threshold);
  const bool mask_ok = RecallOf(no_mask.at_threshold, Category::kPer) <
                       RecallOf(full.at_threshold, Category::kPer);
  std::ostringstream d;
  d << "retrieved@recall" << recall_target << " full "
    << Fmt(full.retrieved_at_recall, 2) << " vs no-margin "
    << Fmt(no_margin.retrieved_at_recall, 2) << (margin_ok ? " ok" : " WRONG")
    << "; mean recall full " << Fmt(MeanScoredRecall(full.at_threshold))
    << " vs no-NE-mixing " << Fmt(MeanScoredRecall(no_ne.at_threshold))
    << (ne_ok ? " ok" : " WRONG") << "; PER recall full "
    << Fmt(RecallOf(full.at_threshold, Category::kPer)) << " vs no-mask "
    << Fmt(RecallOf(no_mask.at_threshold, Category::kPer))
    << (mask_ok ? " ok" : " WRONG");
  return {margin_ok && ne_ok && mask_ok, d.str()};
}

eval::TranslationReport ScoreTranslation(DefaultRun& run,
                                         const std::string& name) {
  const auto& corpus = run.Corpus();
  const auto& test = corpus.Split("test");
  const auto records = pipeline::ReadTranslations(run.ws().translations(name));
  std::vector<eval::TokenSeq> hyps;
  for (const auto& r : records) hyps.push_back(r.hypothesis);
  return eval::EvaluateTranslations(hyps, test, corpus);
}

// 5. CLAS with detector bias lists against the base model and class-LM fusion.
Outcome ClasCriterion(DefaultRun& run) {
  run.Translation("base", "none", std::nullopt);
  run.Translation("clas_detector", "detector", std::nullopt);
  const auto base = ScoreTranslation(run, "base");
  const auto clas = ScoreTranslation(run, "clas_detector");
  double best_fused_per = 0.0;
  std::string fused_text;
  for (double lambda : run.config().lambda_grid) {
    char name[32];
    std::snprintf(name, sizeof(name), "fused_%.2f", lambda);
    run.Translation(name, "none", lambda);
    const auto fused = ScoreTranslation(run, name);
    const double per = fused.entities.accuracy.count(Category::kPer)
                           ? fused.entities.accuracy.at(Category::kPer)
                           : 0.0;
    best_fused_per = std::max(best_fused_per, per);
    fused_text += " " + Fmt(lambda, 2) + ":" + Fmt(per);
  }
  const double clas_per = clas.entities.accuracy.count(Category::kPer)
                              ? clas.entities.accuracy.at(Category::kPer)
                              : 0.0;
  const double gain = clas.entities.macro - base.entities.macro;
  std::ostringstream d;
  d << "macro accuracy base " << Fmt(base.entities.macro) << " -> CLAS "
    << Fmt(clas.entities.macro) << " (+" << Fmt(100.0 * gain, 1)
    << " pts); PER CLAS " << Fmt(clas_per) << " vs fused" << fused_text
    << "; BLEU base " << Fmt(base.bleu, 2) << " CLAS " << Fmt(clas.bleu, 2);
  return {gain >= 0.03 && clas_per > best_fused_per, d.str()};
}

// 6. Degenerate settings reduce to the plain model exactly.
Outcome IdentityCriterion(DefaultRun& run) {
  run.Translation("base", "none", std::nullopt);
  run.Translation("fused_0.00", "none", 0.0);
  const auto plain = pipeline::ReadTranslations(run.ws().translations("base"));
  const auto fused =
      pipeline::ReadTranslations(run.ws().translations("fused_0.00"));
  int differing = 0;
  for (size_t i = 0; i < plain.size(); ++i) {
    if (i >= fused.size() || plain[i].hypothesis != fused[i].hypothesis) {
      ++differing;
    }
  }
  const bool fusion_ok = differing == 0 && plain.size() == fused.size();

  const auto golden = DecodeGoldenEmptyBias();

  double gap = 0.0;
  bool same_tokens = true;
  int probes = 0;
  biasdec::BeamOptions opts;
  opts.max_length = 12;
  for (auto method : {biasdec::BiasMethod::kParallel,
                      biasdec::BiasMethod::kSequential}) {
    const auto p = ProbeTinyPermutation(method);
    gap = std::max(gap, p.max_log_prob_gap);
    same_tokens = same_tokens && p.same_tokens;
    ++probes;
  }
  run.Clas();
  const auto clas = biasdec::SpeechTranslator::Load(
      run.ws().clas_model(run.config().clas.method));
  const auto& corpus = run.Corpus();
  const auto& test = corpus.Split("test");
  for (size_t i = 0; i < 8 && i < test.size(); ++i) {
    std::vector<const corpus::NamedEntity*> entities;
    for (const auto& g : test[i].gold_entities) {
      entities.push_back(&corpus.Entity(g.ne_id));
    }
    for (size_t k = 0; entities.size() < 6; k += 37) {
      entities.push_back(&corpus.dictionary[(i * 11 + k) % corpus.dictionary.size()]);
    }
    const auto p =
        ProbeBiasPermutation(clas, test[i], entities, corpus.target_vocab, opts);
    gap = std::max(gap, p.max_log_prob_gap);
    same_tokens = same_tokens && p.same_tokens;
    ++probes;
  }
  std::ostringstream d;
  d << "lambda=0 fusion differs on " << differing << "/" << plain.size()
    << " test utterances; empty-bias golden decode "
    << (golden.matches ? "matches" : "differs") << "; bias permutation over "
    << probes << " inputs: max log-prob gap " << gap
    << (same_tokens ? ", identical beams" : ", beams differ");
  return {fusion_ok && golden.matches && gap < 1e-6 && same_tokens, d.str()};
}

// 7. Metric self-tests plus the sweep over the trained detector's scores.
Outcome MetricCriterion(DefaultRun& run) {
  auto checks = RunMetricSelfTests();
  const auto& corpus = run.Corpus();
  checks.push_back(CheckSweepAntiMonotone(run.DetectorScores(),
                                          corpus.Split("test"), corpus));
  bool pass = true;
  std::string detail;
  for (const auto& c : checks) {
    pass = pass && c.pass;
    if (!detail.empty()) detail += "; ";
    detail += c.name + (c.pass ? " ok" : " FAILED") + " (" + c.detail + ")";
  }
  return {pass, detail};
}

RunConfig ReducedConfig(int jobs) {
  RunConfig c;
  c.jobs = jobs;
  c.corpus.num_train = 120;
  c.corpus.num_dev = 10;
  c.corpus.num_test = 16;
  c.corpus.dictionary_size = 30;
  c.model = {.dim = 16, .heads = 2, .ffn = 32, .encoder_layers = 2,
             .decoder_layers = 1};
  c.encoder.epochs = 2;
  c.encoder.dev_limit = 6;
  c.encoder.min_alignment_margin = -1.0;
  c.detector.epochs = 2;
  c.detector.dev_limit = 4;
  c.clas.epochs = 2;
  c.clas.dev_limit = 6;
  return c;
}

struct ReducedHashes {
  std::string corpus, base, detector, clas, metrics;
  bool operator==(const ReducedHashes&) const = default;
};

ReducedHashes RunReduced(const fs::path& root, int jobs) {
  fs::remove_all(root);
  const Workspace ws(root);
  RunConfig c = ReducedConfig(jobs);
  ReducedHashes h;
  h.corpus = pipeline::GenerateData(c, ws);
  pipeline::TrainEncoderStage(c, ws);
  pipeline::TrainDetectorStage(c, ws);
  pipeline::DetectStage(c, ws, "test");
  pipeline::TrainClasStage(c, ws);
  pipeline::TranslateStage(c, ws, "test", "clas");
  c.bias_from = "none";
  pipeline::TranslateStage(c, ws, "test", "base");
  pipeline::DecodeFusedStage(c, ws, "test", c.clm_lambda, "fused");
  pipeline::EvaluateStage(c, ws, "test", {"base", "clas", "fused"}, true);
  h.base = pipeline::FileSha256(ws.base_model());
  h.detector = pipeline::FileSha256(ws.detector_model());
  h.clas = pipeline::FileSha256(ws.clas_model(c.clas.method));
  h.metrics = pipeline::FileSha256(ws.output("metrics.json"));
  return h;
}

// 8. Two runs from the same seeds and config agree byte for byte.
Outcome ReproducibilityCriterion(const fs::path& work, int jobs) {
  const RunConfig defaults;
  const Workspace a(work / "repro_corpus_a");
  const Workspace b(work / "repro_corpus_b");
  const std::string ha = pipeline::GenerateData(defaults, a);
  const std::string hb = pipeline::GenerateData(defaults, b);
  const auto ra = RunReduced(work / "repro_run_a", jobs);
  const auto rb = RunReduced(work / "repro_run_b", jobs);
  std::ostringstream d;
  d << "default corpus " << ha.substr(0, 12) << (ha == hb ? " == " : " != ")
    << hb.substr(0, 12) << "; reduced pipeline corpus/base/detector/clas/"
    << "metrics hashes " << (ra == rb ? "identical" : "DIFFER")
    << " (metrics " << ra.metrics.substr(0, 12) << ")";
  return {ha == hb && ra == rb, d.str()};
}

}  // namespace
}  // namespace nedict::checks

int main(int argc, char** argv) {
  google::InitGoogleLogging(argv[0]);
  FLAGS_minloglevel = google::GLOG_WARNING;
  namespace checks = nedict::checks;
  namespace fs = std::filesystem;

  CLI::App app{"Acceptance criteria runner"};
  std::string work = "acceptance_work";
  int jobs = 1;
  bool reuse = false;
  std::vector<int> only;
  app.add_option("--work", work, "Work directory for trained artifacts")
      ->capture_default_str();
  app.add_option("-j,--jobs", jobs, "Worker threads for inference")
      ->check(CLI::PositiveNumber);
  app.add_flag("--reuse", reuse,
               "Reuse artifacts already in the work directory");
  app.add_option("--only", only, "Run only these criteria")
      ->delimiter(',')
      ->check(CLI::Range(1, 8));
  CLI11_PARSE(app, argc, argv);

  if (!reuse) fs::remove_all(work);
  fs::create_directories(work);
  checks::DefaultRun run(fs::path(work) / "default", jobs, reuse);

  struct Criterion {
    int id;
    std::string name;
    std::function<checks::Outcome()> run;
  };
  nedict::eval::DetectionReport detector_report;
  const std::vector<Criterion> criteria = {
      {1, "gradient suite", [] { return checks::GradientCriterion(); }},
      {2, "mask oracle", [] { return checks::MaskCriterion(); }},
      {3, "detector end-to-end",
       [&] { return checks::DetectorCriterion(run, &detector_report); }},
      {4, "ablation trends",
       [&] { return checks::AblationCriterion(run, 0.85); }},
      {5, "CLAS entity accuracy", [&] { return checks::ClasCriterion(run); }},
      {6, "degenerate identities",
       [&] { return checks::IdentityCriterion(run); }},
      {7, "metric self-tests", [&] { return checks::MetricCriterion(run); }},
      {8, "reproducibility",
       [&] { return checks::ReproducibilityCriterion(work, jobs); }},
  };

  int failures = 0;
  std::vector<std::string> lines;
  for (const auto& c : criteria) {
    if (!only.empty() &&
        std::find(only.begin(), only.end(), c.id) == only.end()) {
      continue;
    }
    const auto start = std::chrono::steady_clock::now();
    checks::Outcome outcome;
    try {
      outcome = c.run();
    } catch (const std::exception& e) {
      outcome = {false, std::string("error: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(
                            std::chrono::steady_clock::now() - start)
                            .count();
    std::ostringstream line;
    line << "criterion " << c.id << " " << c.name << ": "
         << (outcome.pass ? "PASS" : "FAIL") << " | " << outcome.detail
         << " [" << checks::Fmt(secs, 1) << " s]";
    std::cout << line.str() << std::endl;
    lines.push_back(line.str());
    if (!outcome.pass) ++failures;
  }
  std::cout << "summary: " << lines.size() - failures << "/" << lines.size()
            << " criteria passed" << std::endl;
  return failures == 0 ? 0 : 1;
}
