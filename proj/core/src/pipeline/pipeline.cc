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

#include "nedict/pipeline/pipeline.h"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include "glog/logging.h"
#include "json.hpp"
#include "openssl/evp.h"

#include "nedict/biasdec/beam_search.h"
#include "nedict/corpus/generator.h"
#include "nedict/corpus/io.h"
#include "nedict/encoder/heatmap.h"
#include "nedict/eval/translation_metrics.h"
#include "nedict/numerics/parallel.h"
#include "nedict/rescore/fusion.h"

namespace nedict::pipeline {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

void WriteText(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

std::string CategoryKey(corpus::Category c) {
  return std::string(corpus::CategoryName(c));
}

json RecallJson(const std::map<corpus::Category, double>& recall) {
  json j = json::object();
  for (const auto& [cat, r] : recall) j[CategoryKey(cat)] = r;
  return j;
}

json DetectionJson(const eval::DetectionReport& r) {
  return {{"threshold", r.threshold},
          {"recall", RecallJson(r.recall)},
          {"avg_retrieved", r.avg_retrieved},
          {"precision", r.precision}};
}

class Sha256 {
 public:
  Sha256() : ctx_(EVP_MD_CTX_new()) {
    if (ctx_ == nullptr || EVP_DigestInit_ex(ctx_, EVP_sha256(), nullptr) != 1) {
      throw std::runtime_error("SHA-256 unavailable");
    }
  }
  ~Sha256() { EVP_MD_CTX_free(ctx_); }
  Sha256(const Sha256&) = delete;
  Sha256& operator=(const Sha256&) = delete;

  void Update(const void* data, size_t n) { EVP_DigestUpdate(ctx_, data, n); }
  void UpdateFile(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    char buf[1 << 16];
    while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
      Update(buf, static_cast<size_t>(in.gcount()));
    }
  }
  std::string Hex() {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx_, md, &len);
    std::ostringstream out;
    for (unsigned int i = 0; i < len; ++i) {
      out << std::hex << std::setw(2) << std::setfill('0')
          << static_cast<int>(md[i]);
    }
    return out.str();
  }

 private:
  EVP_MD_CTX* ctx_;
};

std::vector<const corpus::NamedEntity*> Entities(
    const corpus::Corpus& corpus, const std::vector<std::string>& ids) {
  std::vector<const corpus::NamedEntity*> out;
  out.reserve(ids.size());
  for (const auto& id : ids) out.push_back(&corpus.Entity(id));
  return out;
}

std::vector<eval::TokenSeq> Hypotheses(
    std::span<const TranslationRecord> records,
    std::span<const corpus::Utterance> utterances) {
  if (records.size() != utterances.size()) {
    throw std::runtime_error("translations cover " +
                             std::to_string(records.size()) + " of " +
                             std::to_string(utterances.size()) + " utterances");
  }
  std::vector<eval::TokenSeq> out;
  for (size_t i = 0; i < records.size(); ++i) {
    if (records[i].utterance_id != utterances[i].id) {
      throw std::runtime_error("translation order does not match the split at " +
                               records[i].utterance_id);
    }
    out.push_back(records[i].hypothesis);
  }
  return out;
}

}  // namespace

fs::path DefaultOutputRoot() {
  const char* env = std::getenv(kOutputRootEnv);
  return env != nullptr && *env != '\0' ? fs::path(env) : fs::path("nedict_out");
}

Workspace::Workspace(fs::path root) : root_(std::move(root)) {}

fs::path Workspace::base_model() const { return root_ / "models" / "base.ckpt"; }
fs::path Workspace::detector_model() const {
  return root_ / "models" / "detector.ckpt";
}
fs::path Workspace::clas_model(biasdec::BiasMethod method) const {
  return root_ / "models" / ("clas_" + biasdec::BiasMethodName(method) + ".ckpt");
}
fs::path Workspace::class_lm() const { return root_ / "lm" / "class.lm"; }
fs::path Workspace::generic_lm() const { return root_ / "lm" / "generic.lm"; }
fs::path Workspace::detections(const std::string& split) const {
  return root_ / "detections" / (split + ".jsonl");
}
fs::path Workspace::translations(const std::string& name) const {
  return root_ / "translations" / (name + ".jsonl");
}
fs::path Workspace::output(const std::string& file) const {
  return root_ / file;
}

void Workspace::Require(const fs::path& path, const std::string& producer) {
  if (!fs::exists(path)) {
    throw std::runtime_error("missing " + path.string() + "; run `nedict " +
                             producer + "` first");
  }
}

std::string FileSha256(const fs::path& path) {
  Sha256 h;
  h.UpdateFile(path);
  return h.Hex();
}

std::string DirectorySha256(const fs::path& dir) {
  std::vector<fs::path> files;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (e.is_regular_file()) files.push_back(fs::relative(e.path(), dir));
  }
  std::sort(files.begin(), files.end());
  Sha256 h;
  for (const auto& f : files) {
    const std::string name = f.generic_string();
    h.Update(name.data(), name.size() + 1);
    h.UpdateFile(dir / f);
  }
  return h.Hex();
}

std::string GenerateData(const RunConfig& config, const Workspace& ws) {
  const corpus::Corpus corpus =
      corpus::GenerateCorpus(config.corpus, config.corpus_seed);
  fs::remove_all(ws.corpus_dir());
  corpus::SaveCorpus(corpus, ws.corpus_dir());
  const std::string hash = DirectorySha256(ws.corpus_dir());
  WriteText(ws.output("corpus.sha256"), hash + "\n");
  return hash;
}

corpus::Corpus LoadWorkspaceCorpus(const Workspace& ws) {
  Workspace::Require(ws.corpus_dir() / "meta.json", "gen-data");
  return corpus::LoadCorpus(ws.corpus_dir());
}

encoder::JointTrainingReport TrainEncoderStage(const RunConfig& config,
                                               const Workspace& ws,
                                               const Progress& progress) {
  const corpus::Corpus corpus = LoadWorkspaceCorpus(ws);
  encoder::JointTrainingReport report;
  biasdec::SpeechTranslator model = encoder::TrainJoint(
      corpus, ArchitectureFor(config, corpus), config.encoder, &report, progress);
  fs::create_directories(ws.base_model().parent_path());
  model.Save(ws.base_model());
  json j = {{"epoch_loss", report.epoch_loss},
            {"dev_loss", report.dev_loss},
            {"dev_alignment_margin", report.dev_alignment_margin},
            {"steps", report.steps},
            {"checkpoint_sha256", FileSha256(ws.base_model())}};
  WriteText(ws.root() / "models" / "base.report.json", j.dump(2) + "\n");
  return report;
}

std::vector<fs::path> HeatmapStage(const Workspace& ws, const std::string& split,
                                   int count) {
  const corpus::Corpus corpus = LoadWorkspaceCorpus(ws);
  Workspace::Require(ws.base_model(), "train-encoder");
  const auto model = biasdec::SpeechTranslator::Load(ws.base_model());
  const auto& utts = corpus.Split(split);
  std::vector<fs::path> written;
  const fs::path dir = ws.root() / "heatmaps";
  fs::create_directories(dir);
  json summary = json::array();
  for (int i = 0; i < count && i < static_cast<int>(utts.size()); ++i) {
    const auto& u = utts[i];
    const auto heatmap = encoder::SimilarityHeatmap(
        model.encoder().EncodeText(u.transcript_phonemes),
        model.encoder().EncodeSpeech(u.speech_frames));
    const auto stats = encoder::MeasureAlignment(heatmap, u.frame_alignment);
    encoder::WriteHeatmapCsv(heatmap, dir / (u.id + ".csv"));
    encoder::WriteHeatmapPgm(heatmap, dir / (u.id + ".pgm"));
    written.push_back(dir / (u.id + ".csv"));
    written.push_back(dir / (u.id + ".pgm"));
    summary.push_back({{"utterance_id", u.id},
                       {"diagonal_mean", stats.diagonal_mean},
                       {"off_diagonal_mean", stats.off_diagonal_mean},
                       {"margin", stats.margin()}});
  }
  WriteText(dir / "summary.json", summary.dump(2) + "\n");
  return written;
}

detector::DetectorConfig DetectorArchitecture(const RunConfig& config) {
  detector::DetectorConfig arch = config.detector_arch;
  arch.dim = config.model.dim;
  arch.heads = config.model.heads;
  arch.ffn = config.model.ffn;
  return arch;
}

detector::DetectorTrainingReport TrainDetectorStage(const RunConfig& config,
                                                    const Workspace& ws,
                                                    const Progress& progress) {
  const corpus::Corpus corpus = LoadWorkspaceCorpus(ws);
  Workspace::Require(ws.base_model(), "train-encoder");
  const auto base = biasdec::SpeechTranslator::Load(ws.base_model());
  detector::DetectorTrainingReport report;
  const detector::DetectorModel model =
      detector::TrainDetector(corpus, base.encoder(), DetectorArchitecture(config),
                              config.detector, &report, progress);
  fs::create_directories(ws.detector_model().parent_path());
  model.Save(ws.detector_model());
  json epochs = json::array();
  for (const auto& e : report.epochs) {
    epochs.push_back({{"loss", e.loss}, {"dev", DetectionJson(e.dev)}});
  }
  json j = {{"epochs", epochs},
            {"checkpoint_sha256", FileSha256(ws.detector_model())}};
  WriteText(ws.root() / "models" / "detector.report.json", j.dump(2) + "\n");
  return report;
}

void WriteDetections(const fs::path& path,
                     std::span<const eval::UtteranceScores> scores,
                     double threshold) {
  std::ostringstream out;
  for (const auto& s : scores) {
    for (size_t i = 0; i < s.ne_ids.size(); ++i) {
      json j = {{"utterance_id", s.utterance_id},
                {"ne_id", s.ne_ids[i]},
                {"probability", s.probabilities[i]},
                {"detected", s.probabilities[i] >= threshold}};
      out << j.dump() << '\n';
    }
  }
  WriteText(path, out.str());
}

std::vector<eval::UtteranceScores> ReadDetections(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::vector<eval::UtteranceScores> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const json j = json::parse(line);
    const std::string id = j.at("utterance_id").get<std::string>();
    if (out.empty() || out.back().utterance_id != id) {
      out.push_back({});
      out.back().utterance_id = id;
    }
    out.back().ne_ids.push_back(j.at("ne_id").get<std::string>());
    out.back().probabilities.push_back(j.at("probability").get<double>());
  }
  return out;
}

std::vector<eval::UtteranceScores> DetectStage(const RunConfig& config,
                                               const Workspace& ws,
                                               const std::string& split) {
  const corpus::Corpus corpus = LoadWorkspaceCorpus(ws);
  Workspace::Require(ws.base_model(), "train-encoder");
  Workspace::Require(ws.detector_model(), "train-detector");
  const auto base = biasdec::SpeechTranslator::Load(ws.base_model());
  const auto model = detector::DetectorModel::Load(ws.detector_model());
  const auto dictionary = detector::EncodeDictionary(
      base.encoder(), corpus.dictionary, corpus.lexicon);
  auto scores = detector::ScoreUtterances(model, base.encoder(), dictionary,
                                          corpus.Split(split), config.jobs);
  WriteDetections(ws.detections(split), scores, config.detector.threshold);
  return scores;
}

std::vector<eval::SweepPoint> SweepStage(const RunConfig& config,
                                         const Workspace& ws,
                                         const std::string& split) {
  const corpus::Corpus corpus = LoadWorkspaceCorpus(ws);
  const auto scores = fs::exists(ws.detections(split))
                          ? ReadDetections(ws.detections(split))
                          : DetectStage(config, ws, split);
  std::vector<double> thresholds;
  for (int i = 1; i < 20; ++i) thresholds.push_back(i / 20.0);
  thresholds.push_back(config.detector.threshold);
  std::sort(thresholds.begin(), thresholds.end());
  thresholds.erase(std::unique(thresholds.begin(), thresholds.end()),
                   thresholds.end());
  const auto points =
      eval::SweepThresholds(scores, corpus.Split(split), corpus, thresholds);
  std::ostringstream out;
  out << "threshold";
  for (auto c : corpus::kAllCategories) out << ",recall_" << CategoryKey(c);
  out << ",retrieved\n";
  for (const auto& p : points) {
    out << p.threshold;
    for (auto c : corpus::kAllCategories) {
      out << ',';
      if (auto it = p.recall.find(c); it != p.recall.end()) out << it->second;
    }
    out << ',' << p.avg_retrieved << '\n';
  }
  WriteText(ws.output("sweep_" + split + ".csv"), out.str());
  return points;
}

biasdec::ClasTrainingReport TrainClasStage(const RunConfig& config,
                                           const Workspace& ws,
                                           const Progress& progress) {
  const corpus::Corpus corpus = LoadWorkspaceCorpus(ws);
  Workspace::Require(ws.base_model(), "train-encoder");
  const auto base = biasdec::SpeechTranslator::Load(ws.base_model());
  biasdec::ClasTrainingReport report;
  const auto model = biasdec::TrainClas(base, corpus, config.clas, &report, progress);
  const fs::path path = ws.clas_model(config.clas.method);
  fs::create_directories(path.parent_path());
  model.Save(path);
  json j = {{"method", biasdec::BiasMethodName(config.clas.method)},
            {"epoch_loss", report.epoch_loss},
            {"dev_loss", report.dev_loss},
            {"steps", report.steps},
            {"checkpoint_sha256", FileSha256(path)}};
  fs::path report_path = path;
  report_path.replace_extension(".report.json");
  WriteText(report_path, j.dump(2) + "\n");
  return report;
}

void WriteTranslations(const fs::path& path,
                       std::span<const TranslationRecord> records) {
  std::ostringstream out;
  for (const auto& r : records) {
    std::string hyp;
    for (size_t i = 0; i < r.hypothesis.size(); ++i) {
      hyp += (i ? " " : "") + r.hypothesis[i];
    }
    json j = {{"utterance_id", r.utterance_id},
              {"hypothesis", hyp},
              {"bias_ne_ids", r.bias_ne_ids}};
    out << j.dump() << '\n';
  }
  WriteText(path, out.str());
}

std::vector<TranslationRecord> ReadTranslations(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::vector<TranslationRecord> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const json j = json::parse(line);
    TranslationRecord r;
    r.utterance_id = j.at("utterance_id").get<std::string>();
    r.hypothesis = corpus::SplitTokens(j.at("hypothesis").get<std::string>());
    r.bias_ne_ids = j.at("bias_ne_ids").get<std::vector<std::string>>();
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<std::vector<std::string>> BiasLists(const RunConfig& config,
                                                const Workspace& ws,
                                                const corpus::Corpus& corpus,
                                                const std::string& split) {
  const auto& utts = corpus.Split(split);
  std::vector<std::vector<std::string>> lists(utts.size());
  if (config.bias_from == "none") return lists;
  if (config.bias_from == "oracle") {
    for (size_t i = 0; i < utts.size(); ++i) {
      std::set<std::string> seen;
      for (const auto& g : utts[i].gold_entities) {
        if (seen.insert(g.ne_id).second) lists[i].push_back(g.ne_id);
      }
    }
    return lists;
  }
  Workspace::Require(ws.detections(split), "detect");
  const auto scores = ReadDetections(ws.detections(split));
  if (scores.size() != utts.size()) {
    throw std::runtime_error("detections do not cover the " + split + " split");
  }
  for (size_t i = 0; i < utts.size(); ++i) {
    if (scores[i].utterance_id != utts[i].id) {
      throw std::runtime_error("detections order does not match the split");
    }
    lists[i] = eval::Detected(scores[i], config.detector.threshold);
  }
  return lists;
}

std::vector<TranslationRecord> TranslateStage(const RunConfig& config,
                                              const Workspace& ws,
                                              const std::string& split,
                                              const std::string& name) {
  const corpus::Corpus corpus = LoadWorkspaceCorpus(ws);
  const auto& utts = corpus.Split(split);
  const bool biased = config.bias_from != "none";
  const fs::path model_path =
      biased ? ws.clas_model(config.clas.method) : ws.base_model();
  Workspace::Require(model_path, biased ? "train-clas" : "train-encoder");
  const auto model = biasdec::SpeechTranslator::Load(model_path);
  const auto lists = BiasLists(config, ws, corpus, split);
  std::vector<TranslationRecord> records(utts.size());
  numerics::ParallelFor(utts.size(), config.jobs, [&](size_t i) {
    biasdec::BeamResult r;
    if (biased) {
      const auto bias =
          model.EncodeBias(Entities(corpus, lists[i]), corpus.target_vocab);
      r = biasdec::Translate(model, utts[i], &bias, config.beam);
    } else {
      r = biasdec::Translate(model, utts[i], nullptr, config.beam);
    }
    records[i] = {utts[i].id, corpus.target_vocab.Decode(r.tokens), lists[i]};
  });
  WriteTranslations(ws.translations(name), records);
  return records;
}

void EnsureLanguageModels(const RunConfig& config, const Workspace& ws,
                          const corpus::Corpus& corpus) {
  if (fs::exists(ws.class_lm()) && fs::exists(ws.generic_lm())) return;
  fs::create_directories(ws.class_lm().parent_path());
  rescore::TrainClassLm(corpus.dictionary, corpus.target_vocab, config.ngram)
      .Save(ws.class_lm());
  rescore::TrainGenericLm(corpus.Split("train"), corpus.target_vocab,
                          config.ngram)
      .Save(ws.generic_lm());
}

std::vector<TranslationRecord> DecodeFusedStage(const RunConfig& config,
                                                const Workspace& ws,
                                                const std::string& split,
                                                double lambda,
                                                const std::string& name) {
  const corpus::Corpus corpus = LoadWorkspaceCorpus(ws);
  Workspace::Require(ws.base_model(), "train-encoder");
  const auto model = biasdec::SpeechTranslator::Load(ws.base_model());
  EnsureLanguageModels(config, ws, corpus);
  const auto class_lm = rescore::NgramLM::Load(ws.class_lm(), corpus.target_vocab);
  const auto generic_lm =
      rescore::NgramLM::Load(ws.generic_lm(), corpus.target_vocab);
  const auto& utts = corpus.Split(split);
  std::vector<TranslationRecord> records(utts.size());
  numerics::ParallelFor(utts.size(), config.jobs, [&](size_t i) {
    const auto r = rescore::BeamSearchFused(model, utts[i], class_lm, generic_lm,
                                            corpus.target_vocab, lambda,
                                            config.beam);
    records[i] = {utts[i].id, corpus.target_vocab.Decode(r.tokens), {}};
  });
  WriteTranslations(ws.translations(name), records);
  return records;
}

std::string EvaluateStage(const RunConfig& config, const Workspace& ws,
                          const std::string& split,
                          const std::vector<std::string>& translation_names,
                          bool with_detections) {
  const corpus::Corpus corpus = LoadWorkspaceCorpus(ws);
  const auto& utts = corpus.Split(split);
  json j = {{"split", split}};
  std::ostringstream csv;
  csv << "system,metric,value\n";
  if (with_detections) {
    Workspace::Require(ws.detections(split), "detect");
    const auto scores = ReadDetections(ws.detections(split));
    const auto report = eval::EvaluateDetections(scores, utts, corpus,
                                                 config.detector.threshold);
    j["detection"] = DetectionJson(report);
    for (const auto& [cat, r] : report.recall) {
      csv << "detector,recall_" << CategoryKey(cat) << ',' << r << '\n';
    }
    csv << "detector,avg_retrieved," << report.avg_retrieved << '\n';
    csv << "detector,precision," << report.precision << '\n';
  }
  json translations = json::object();
  for (const auto& name : translation_names) {
    Workspace::Require(ws.translations(name), "translate");
    const auto records = ReadTranslations(ws.translations(name));
    const auto report =
        eval::EvaluateTranslations(Hypotheses(records, utts), utts, corpus);
    json acc = json::object();
    for (const auto& [cat, a] : report.entities.accuracy) acc[CategoryKey(cat)] = a;
    translations[name] = {{"bleu", report.bleu},
                          {"entity_accuracy", acc},
                          {"macro_entity_accuracy", report.entities.macro}};
    csv << name << ",bleu," << report.bleu << '\n';
    for (const auto& [cat, a] : report.entities.accuracy) {
      csv << name << ",accuracy_" << CategoryKey(cat) << ',' << a << '\n';
    }
    csv << name << ",macro_accuracy," << report.entities.macro << '\n';
  }
  j["translations"] = translations;
  const std::string text = j.dump(2) + "\n";
  WriteText(ws.output("metrics.json"), text);
  WriteText(ws.output("metrics.csv"), csv.str());
  return text;
}

std::vector<AblationRow> AblationRows(const RunConfig& config) {
  AblationRow row;
  row.arch = DetectorArchitecture(config);
  row.training = config.detector;
  row.name = "base";
  row.training.layerdrop = 0.0;
  row.training.sampling.ne_prob = 0.0;
  row.arch.modality_embedding = false;
  row.arch.attention_mask = false;
  row.training.sampling.max_words = 1;
  row.training.ranking_weight = 0.0;
  std::vector<AblationRow> rows{row};
  auto add = [&](const std::string& name, auto&& change) {
    change(row);
    row.name = name;
    rows.push_back(row);
  };
  add("+layerdrop", [&](AblationRow& r) { r.training.layerdrop = config.detector.layerdrop; });
  add("+train-on-ne", [&](AblationRow& r) {
    r.training.sampling.ne_prob = config.detector.sampling.ne_prob;
  });
  add("+modality", [&](AblationRow& r) {
    r.arch.modality_embedding = config.detector_arch.modality_embedding;
  });
  add("+attn-mask", [&](AblationRow& r) {
    r.arch.attention_mask = config.detector_arch.attention_mask;
  });
  add("+maxlen5", [&](AblationRow& r) {
    r.training.sampling.max_words = config.detector.sampling.max_words;
  });
  add("+margin", [&](AblationRow& r) {
    r.training.ranking_weight = config.detector.ranking_weight;
  });
  return rows;
}

AblationResult TrainAndEvaluateDetector(const AblationRow& row,
                                        const RunConfig& config,
                                        const corpus::Corpus& corpus,
                                        const encoder::SharedEncoder& encoder,
                                        const std::string& split,
                                        double recall_target,
                                        const Progress& progress) {
  const auto model = detector::TrainDetector(corpus, encoder, row.arch,
                                             row.training, nullptr, progress);
  const auto dictionary =
      detector::EncodeDictionary(encoder, corpus.dictionary, corpus.lexicon);
  const auto& utts = corpus.Split(split);
  const auto scores = detector::ScoreUtterances(model, encoder, dictionary,
                                                utts, config.jobs);
  AblationResult r;
  r.name = row.name;
  r.at_threshold = eval::EvaluateDetections(scores, utts, corpus,
                                            row.training.threshold);
  r.retrieved_at_recall = eval::RetrievedAtRecall(scores, utts, corpus,
                                                  recall_target,
                                                  &r.matched_threshold);
  return r;
}

std::vector<AblationResult> AblateStage(const RunConfig& config,
                                        const Workspace& ws,
                                        const std::string& split,
                                        double recall_target,
                                        const Progress& progress) {
  const corpus::Corpus corpus = LoadWorkspaceCorpus(ws);
  Workspace::Require(ws.base_model(), "train-encoder");
  const auto base = biasdec::SpeechTranslator::Load(ws.base_model());
  std::vector<AblationResult> results;
  std::ostringstream csv;
  csv << "config";
  for (auto c : corpus::kAllCategories) csv << ",recall_" << CategoryKey(c);
  csv << ",retrieved,precision,retrieved_at_recall,matched_threshold\n";
  for (const auto& row : AblationRows(config)) {
    if (progress) progress("ablation row " + row.name);
    results.push_back(TrainAndEvaluateDetector(row, config, corpus,
                                               base.encoder(), split,
                                               recall_target, progress));
    const auto& r = results.back();
    csv << r.name;
    for (auto c : corpus::kAllCategories) {
      csv << ',';
      if (auto it = r.at_threshold.recall.find(c);
          it != r.at_threshold.recall.end()) {
        csv << it->second;
      }
    }
    csv << ',' << r.at_threshold.avg_retrieved << ','
        << r.at_threshold.precision << ',' << r.retrieved_at_recall << ','
        << r.matched_threshold << '\n';
    WriteText(ws.output("ablation.csv"), csv.str());
  }
  return results;
}

}  // namespace nedict::pipeline
