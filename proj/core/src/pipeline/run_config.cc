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

#include "nedict/pipeline/run_config.h"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>

#include "boost/property_tree/ini_parser.hpp"
#include "boost/property_tree/ptree.hpp"

namespace nedict::pipeline {

namespace {

namespace pt = boost::property_tree;

struct Field {
  std::function<std::string()> get;
  std::function<void(const std::string&)> set;
};

std::string Format(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, r.ptr);
}

template <typename T>
T ParseNumber(const std::string& key, const std::string& text) {
  T value{};
  const char* end = text.data() + text.size();
  const auto r = std::from_chars(text.data(), end, value);
  if (r.ec != std::errc() || r.ptr != end) {
    throw std::invalid_argument("bad value for " + key + ": '" + text + "'");
  }
  return value;
}

bool ParseBool(const std::string& key, const std::string& text) {
  if (text == "true" || text == "1") return true;
  if (text == "false" || text == "0") return false;
  throw std::invalid_argument("bad boolean for " + key + ": '" + text + "'");
}

class Registry {
 public:
  template <typename T>
  void Number(const std::string& key, T& ref) {
    fields_[key] = {[&ref] {
                      if constexpr (std::is_floating_point_v<T>) {
                        return Format(ref);
                      } else {
                        return std::to_string(ref);
                      }
                    },
                    [&ref, key](const std::string& v) {
                      ref = ParseNumber<T>(key, v);
                    }};
  }
  void Bool(const std::string& key, bool& ref) {
    fields_[key] = {[&ref] { return std::string(ref ? "true" : "false"); },
                    [&ref, key](const std::string& v) {
                      ref = ParseBool(key, v);
                    }};
  }
  void Text(const std::string& key, std::string& ref) {
    fields_[key] = {[&ref] { return ref; },
                    [&ref](const std::string& v) { ref = v; }};
  }
  void Range(const std::string& key, corpus::CountRange& ref) {
    fields_[key] = {
        [&ref] { return std::to_string(ref.min) + "-" + std::to_string(ref.max); },
        [&ref, key](const std::string& v) {
          const auto dash = v.find('-');
          if (dash == std::string::npos) {
            throw std::invalid_argument("range " + key + " must be MIN-MAX");
          }
          ref.min = ParseNumber<int>(key, v.substr(0, dash));
          ref.max = ParseNumber<int>(key, v.substr(dash + 1));
        }};
  }
  void Method(const std::string& key, biasdec::BiasMethod& ref) {
    fields_[key] = {[&ref] { return biasdec::BiasMethodName(ref); },
                    [&ref](const std::string& v) {
                      ref = biasdec::ParseBiasMethod(v);
                    }};
  }
  void List(const std::string& key, std::vector<double>& ref) {
    fields_[key] = {[&ref] {
                      std::string out;
                      for (size_t i = 0; i < ref.size(); ++i) {
                        out += (i ? "," : "") + Format(ref[i]);
                      }
                      return out;
                    },
                    [&ref, key](const std::string& v) {
                      ref.clear();
                      std::stringstream in(v);
                      std::string item;
                      while (std::getline(in, item, ',')) {
                        ref.push_back(ParseNumber<double>(key, item));
                      }
                    }};
  }

  const std::map<std::string, Field>& fields() const { return fields_; }
  Field& at(const std::string& key) {
    auto it = fields_.find(key);
    if (it == fields_.end()) {
      throw std::invalid_argument("unknown config key: " + key);
    }
    return it->second;
  }

 private:
  std::map<std::string, Field> fields_;
};

Registry Bind(RunConfig& c) {
  Registry r;
  r.Number("run.corpus_seed", c.corpus_seed);
  r.Number("run.jobs", c.jobs);

  auto& k = c.corpus;
  r.Number("corpus.num_phonemes", k.num_phonemes);
  r.Number("corpus.frame_dim", k.frame_dim);
  r.Number("corpus.num_syllables", k.num_syllables);
  r.Number("corpus.num_common_words", k.num_common_words);
  r.Number("corpus.spelling_variants", k.spelling_variants);
  r.Number("corpus.dictionary_size", k.dictionary_size);
  r.Number("corpus.org_share", k.org_share);
  r.Number("corpus.num_acronyms", k.num_acronyms);
  r.Number("corpus.shared_first_name_share", k.shared_first_name_share);
  r.Number("corpus.similar_phonetic_share", k.similar_phonetic_share);
  r.Number("corpus.num_train", k.num_train);
  r.Number("corpus.num_dev", k.num_dev);
  r.Number("corpus.num_test", k.num_test);
  r.Range("corpus.words_per_utterance", k.words_per_utterance);
  r.Number("corpus.max_entities_per_utterance", k.max_entities_per_utterance);
  r.Range("corpus.train_mentions_gpe", k.train_mentions_gpe);
  r.Range("corpus.train_mentions_loc", k.train_mentions_loc);
  r.Range("corpus.train_mentions_per", k.train_mentions_per);
  r.Range("corpus.train_mentions_org", k.train_mentions_org);
  r.Number("corpus.test_ne_density", k.test_ne_density);
  r.Number("corpus.test_org_density", k.test_org_density);
  r.Number("corpus.noise_sigma", k.noise_sigma);
  r.Number("corpus.min_duration", k.min_duration);
  r.Number("corpus.max_duration", k.max_duration);

  r.Number("model.dim", c.model.dim);
  r.Number("model.heads", c.model.heads);
  r.Number("model.ffn", c.model.ffn);
  r.Number("model.encoder_layers", c.model.encoder_layers);
  r.Number("model.decoder_layers", c.model.decoder_layers);

  auto& e = c.encoder;
  r.Number("encoder.epochs", e.epochs);
  r.Number("encoder.batch_size", e.batch_size);
  r.Number("encoder.lr", e.lr);
  r.Number("encoder.warmup_steps", e.warmup_steps);
  r.Number("encoder.alpha", e.alpha);
  r.Number("encoder.layerdrop", e.layerdrop);
  r.Number("encoder.dropout", e.dropout);
  r.Number("encoder.min_alignment_margin", e.min_alignment_margin);
  r.Number("encoder.dev_limit", e.dev_limit);
  r.Number("encoder.train_limit", e.train_limit);
  r.Number("encoder.seed", e.seed);

  auto& da = c.detector_arch;
  auto& d = c.detector;
  r.Number("detector.window_mult", da.window_mult);
  r.Bool("detector.modality_embedding", da.modality_embedding);
  r.Bool("detector.attention_mask", da.attention_mask);
  r.Number("detector.threshold", d.threshold);
  r.Number("detector.ne_prob", d.sampling.ne_prob);
  r.Number("detector.max_words", d.sampling.max_words);
  r.Number("detector.max_retries", d.sampling.max_retries);
  r.Number("detector.margin", d.margin);
  r.Number("detector.ranking_weight", d.ranking_weight);
  r.Number("detector.layerdrop", d.layerdrop);
  r.Number("detector.layerdrop_variants", d.layerdrop_variants);
  r.Number("detector.head_layerdrop", d.head_layerdrop);
  r.Number("detector.speech_mask_fraction", d.speech_mask_fraction);
  r.Number("detector.epochs", d.epochs);
  r.Number("detector.batch_size", d.batch_size);
  r.Number("detector.lr", d.lr);
  r.Number("detector.warmup_steps", d.warmup_steps);
  r.Number("detector.dev_limit", d.dev_limit);
  r.Number("detector.seed", d.seed);

  auto& s = c.clas;
  r.Method("clas.method", s.method);
  r.Bool("clas.freeze_decoder", s.freeze_decoder);
  r.Number("clas.distractors", s.distractors);
  r.Number("clas.gold_drop", s.gold_drop);
  r.Number("clas.epochs", s.epochs);
  r.Number("clas.batch_size", s.batch_size);
  r.Number("clas.lr", s.lr);
  r.Number("clas.warmup_steps", s.warmup_steps);
  r.Number("clas.train_limit", s.train_limit);
  r.Number("clas.dev_limit", s.dev_limit);
  r.Number("clas.seed", s.seed);
  r.Text("clas.bias_from", c.bias_from);

  r.Number("rescore.order", c.ngram.order);
  r.Number("rescore.add_k", c.ngram.add_k);
  r.Number("rescore.backoff", c.ngram.backoff);
  r.Number("rescore.lambda", c.clm_lambda);
  r.List("rescore.lambda_grid", c.lambda_grid);

  r.Number("decode.beam", c.beam.beam);
  r.Number("decode.max_length", c.beam.max_length);
  r.Bool("decode.length_normalize", c.beam.length_normalize);
  return r;
}

void CheckProbability(const std::string& key, double p) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw std::invalid_argument(key + " must lie in [0, 1]");
  }
}

void CheckPositive(const std::string& key, double v) {
  if (!(v > 0.0)) throw std::invalid_argument(key + " must be > 0");
}

}  // namespace

RunConfig ParseRunConfig(const std::string& ini_text) {
  pt::ptree tree;
  std::istringstream in(ini_text);
  pt::read_ini(in, tree);
  RunConfig config;
  Registry reg = Bind(config);
  for (const auto& [section, entries] : tree) {
    if (entries.empty() && !entries.data().empty()) {
      throw std::invalid_argument("config key outside a section: " + section);
    }
    for (const auto& [key, value] : entries) {
      reg.at(section + "." + key).set(value.data());
    }
  }
  ValidateRunConfig(config);
  return config;
}

RunConfig LoadRunConfig(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read config " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  try {
    return ParseRunConfig(buffer.str());
  } catch (const pt::ini_parser_error& e) {
    throw std::invalid_argument(path.string() + ": " + e.message());
  }
}

void ApplyOverride(RunConfig& config, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) {
    throw std::invalid_argument("override must be section.key=value: " +
                                assignment);
  }
  Registry reg = Bind(config);
  reg.at(assignment.substr(0, eq)).set(assignment.substr(eq + 1));
}

void ValidateRunConfig(const RunConfig& c) {
  if (c.jobs < 1) throw std::invalid_argument("run.jobs must be >= 1");
  CheckProbability("corpus.org_share", c.corpus.org_share);
  CheckProbability("corpus.shared_first_name_share",
                   c.corpus.shared_first_name_share);
  CheckProbability("corpus.similar_phonetic_share",
                   c.corpus.similar_phonetic_share);
  CheckProbability("encoder.layerdrop", c.encoder.layerdrop);
  CheckProbability("encoder.dropout", c.encoder.dropout);
  CheckProbability("detector.ne_prob", c.detector.sampling.ne_prob);
  CheckProbability("detector.layerdrop", c.detector.layerdrop);
  CheckProbability("detector.head_layerdrop", c.detector.head_layerdrop);
  CheckProbability("clas.gold_drop", c.clas.gold_drop);
  if (!(c.detector.threshold > 0.0 && c.detector.threshold < 1.0)) {
    throw std::invalid_argument("detector.threshold must lie in (0, 1)");
  }
  if (c.detector.speech_mask_fraction < 0.0 ||
      c.detector.speech_mask_fraction > 0.5) {
    throw std::invalid_argument(
        "detector.speech_mask_fraction must lie in [0, 0.5]");
  }
  if (c.detector.sampling.max_words < 1) {
    throw std::invalid_argument("detector.max_words must be >= 1");
  }
  CheckPositive("encoder.lr", c.encoder.lr);
  CheckPositive("detector.lr", c.detector.lr);
  CheckPositive("clas.lr", c.clas.lr);
  if (c.model.dim % c.model.heads != 0) {
    throw std::invalid_argument("model.dim must be divisible by model.heads");
  }
  if (c.bias_from != "detector" && c.bias_from != "oracle" &&
      c.bias_from != "none") {
    throw std::invalid_argument(
        "clas.bias_from must be detector, oracle or none");
  }
  if (c.clm_lambda < 0.0) throw std::invalid_argument("rescore.lambda < 0");
  for (double l : c.lambda_grid) {
    if (l < 0.0) throw std::invalid_argument("rescore.lambda_grid has l < 0");
  }
  if (c.beam.beam < 1 || c.beam.max_length < 1) {
    throw std::invalid_argument("decode.beam and decode.max_length must be >= 1");
  }
}

std::string RunConfigToIni(const RunConfig& config) {
  RunConfig copy = config;
  Registry reg = Bind(copy);
  pt::ptree tree;
  for (const auto& [key, field] : reg.fields()) tree.put(key, field.get());
  std::ostringstream out;
  pt::write_ini(out, tree);
  return out.str();
}

void SaveRunConfig(const RunConfig& config, const std::filesystem::path& path) {
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path());
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << RunConfigToIni(config);
}

biasdec::TranslatorConfig ArchitectureFor(const RunConfig& config,
                                          const corpus::Corpus& corpus) {
  biasdec::TranslatorConfig arch = encoder::DefaultArchitecture(corpus);
  arch.encoder.dim = arch.decoder.dim = config.model.dim;
  arch.encoder.heads = arch.decoder.heads = config.model.heads;
  arch.encoder.ffn = arch.decoder.ffn = config.model.ffn;
  arch.encoder.layers = config.model.encoder_layers;
  arch.decoder.layers = config.model.decoder_layers;
  return arch;
}

}  // namespace nedict::pipeline
