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

#include "nedict/rescore/ngram_lm.h"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace nedict::rescore {

namespace {

constexpr char kMagic[] = "#nedict-ngram";
constexpr int kFormatVersion = 1;

bool IsTag(const corpus::Vocabulary& vocab, int id) {
  return corpus::ParseTag(vocab.Token(id)).has_value();
}

}  // namespace

std::vector<int> LmContext(std::span<const int> prefix,
                           const corpus::Vocabulary& vocab) {
  size_t start = 0;
  for (size_t i = 0; i < prefix.size(); ++i) {
    if (IsTag(vocab, prefix[i])) start = i + 1;
  }
  return {prefix.begin() + start, prefix.end()};
}

NgramLM::NgramLM(const corpus::Vocabulary& vocab, const NgramOptions& options)
    : vocab_(&vocab), options_(options) {
  if (options.order < 1) throw std::invalid_argument("n-gram order < 1");
  if (options.add_k <= 0.0) throw std::invalid_argument("add_k must be > 0");
  if (options.backoff <= 0.0 || options.backoff > 1.0) {
    throw std::invalid_argument("backoff must lie in (0, 1]");
  }
  in_vocab_.assign(vocab.size(), false);
  for (int id = 0; id < vocab.size(); ++id) {
    if (id == corpus::Vocabulary::kBos || IsTag(vocab, id)) continue;
    in_vocab_[id] = true;
    ++lm_vocab_size_;
  }
}

bool NgramLM::InVocabulary(int token) const {
  return token >= 0 && token < static_cast<int>(in_vocab_.size()) &&
         in_vocab_[token];
}

void NgramLM::CountSegment(std::span<const int> segment, bool append_eos) {
  std::vector<int> seq(segment.begin(), segment.end());
  if (append_eos) seq.push_back(corpus::Vocabulary::kEos);
  for (size_t i = 0; i < seq.size(); ++i) {
    if (!InVocabulary(seq[i])) {
      throw std::invalid_argument("token outside the LM vocabulary: " +
                                  vocab_->Token(seq[i]));
    }
    ++total_;
    for (int h = 0; h < options_.order && h <= static_cast<int>(i); ++h) {
      std::vector<int> ctx(seq.begin() + (i - h), seq.begin() + i);
      ++counts_[ctx][seq[i]];
      ++context_totals_[ctx];
    }
  }
}

void NgramLM::AddSentence(std::span<const int> tokens) {
  size_t start = 0;
  for (size_t i = 0; i < tokens.size(); ++i) {
    if (IsTag(*vocab_, tokens[i])) {
      CountSegment(tokens.subspan(start, i - start), false);
      start = i + 1;
    }
  }
  CountSegment(tokens.subspan(start), true);
}

numerics::RowVector NgramLM::LogProbs(std::span<const int> context) const {
  if (total_ == 0) throw std::logic_error("LM has no training data");
  const int v = static_cast<int>(in_vocab_.size());
  numerics::RowVector score = numerics::RowVector::Zero(v);
  const auto uni = counts_.find({});
  const double denom =
      static_cast<double>(total_) + options_.add_k * lm_vocab_size_;
  for (int w = 0; w < v; ++w) {
    if (!in_vocab_[w]) continue;
    long c = 0;
    if (uni != counts_.end()) {
      auto it = uni->second.find(w);
      if (it != uni->second.end()) c = it->second;
    }
    score(w) = (static_cast<double>(c) + options_.add_k) / denom;
  }
  const int max_h = std::min<int>(options_.order - 1,
                                  static_cast<int>(context.size()));
  for (int h = 1; h <= max_h; ++h) {
    score *= options_.backoff;
    const std::vector<int> ctx(context.end() - h, context.end());
    const auto succ = counts_.find(ctx);
    if (succ == counts_.end()) continue;
    const double n = static_cast<double>(context_totals_.at(ctx));
    for (const auto& [w, c] : succ->second) {
      score(w) = static_cast<double>(c) / n;
    }
  }
  const double z = score.sum();
  numerics::RowVector out(v);
  for (int w = 0; w < v; ++w) {
    out(w) = in_vocab_[w] ? std::log(score(w) / z)
                          : -std::numeric_limits<double>::infinity();
  }
  return out;
}

double NgramLM::LogProb(std::span<const int> context, int token) const {
  if (!InVocabulary(token)) {
    throw std::invalid_argument("token outside the LM vocabulary");
  }
  return LogProbs(context)(token);
}

double NgramLM::Perplexity(
    std::span<const std::vector<int>> sentences) const {
  double nll = 0.0;
  long n = 0;
  for (const auto& s : sentences) {
    std::vector<int> ctx;
    auto score = [&](int token) {
      nll -= LogProb(ctx, token);
      ++n;
      ctx.push_back(token);
    };
    for (int t : s) {
      if (IsTag(*vocab_, t)) {
        ctx.clear();
        continue;
      }
      score(t);
    }
    score(corpus::Vocabulary::kEos);
  }
  if (n == 0) throw std::invalid_argument("no tokens to score");
  return std::exp(nll / static_cast<double>(n));
}

void NgramLM::Save(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << kMagic << ' ' << kFormatVersion << '\n';
  out << "order " << options_.order << '\n';
  out << std::setprecision(17) << "add_k " << options_.add_k << '\n';
  out << "backoff " << options_.backoff << '\n';
  out << "total " << total_ << '\n';
  // Sorted by (context, token) ids; tokens written as strings.
  for (const auto& [ctx, succ] : counts_) {
    for (const auto& [w, c] : succ) {
      out << c << '\t';
      for (int t : ctx) out << vocab_->Token(t) << ' ';
      out << vocab_->Token(w) << '\n';
    }
  }
}

NgramLM NgramLM::Load(const std::filesystem::path& path,
                      const corpus::Vocabulary& vocab) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::string magic;
  int version = 0;
  in >> magic >> version;
  if (magic != kMagic) {
    throw std::runtime_error(path.string() + " is not an n-gram LM file");
  }
  if (version != kFormatVersion) {
    throw std::runtime_error("unsupported n-gram LM version " +
                             std::to_string(version));
  }
  NgramOptions options;
  long total = 0;
  std::string key;
  in >> key >> options.order >> key >> options.add_k >> key >>
      options.backoff >> key >> total;
  if (!in) throw std::runtime_error("truncated n-gram LM header");
  NgramLM lm(vocab, options);
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) {
      throw std::runtime_error("bad n-gram line: " + line);
    }
    const long c = std::stol(line.substr(0, tab));
    std::vector<int> ids = vocab.Encode(corpus::SplitTokens(line.substr(tab + 1)));
    const int w = ids.back();
    ids.pop_back();
    lm.counts_[ids][w] += c;
    lm.context_totals_[ids] += c;
  }
  lm.total_ = total;
  return lm;
}

NgramLM TrainClassLm(std::span<const corpus::NamedEntity> entities,
                     const corpus::Vocabulary& vocab,
                     const NgramOptions& options) {
  if (entities.empty()) throw std::invalid_argument("no NE forms for class LM");
  NgramLM lm(vocab, options);
  for (const auto& ne : entities) {
    lm.AddSentence(vocab.Encode(ne.TargetTokens()));
  }
  return lm;
}

NgramLM TrainGenericLm(std::span<const corpus::Utterance> utterances,
                       const corpus::Vocabulary& vocab,
                       const NgramOptions& options) {
  if (utterances.empty()) {
    throw std::invalid_argument("no utterances for generic LM");
  }
  NgramLM lm(vocab, options);
  for (const auto& u : utterances) {
    lm.AddSentence(vocab.Encode(u.target_tokens));
  }
  return lm;
}

}  // namespace nedict::rescore
