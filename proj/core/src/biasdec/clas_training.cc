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

#include "nedict/biasdec/clas_training.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>

#include "glog/logging.h"

#include "nedict/numerics/optimizer.h"

namespace nedict::biasdec {

using numerics::Var;

void SetClasTrainable(SpeechTranslator& model, bool freeze_decoder) {
  auto& params = model.params();
  params.SetAllTrainable(true);
  params.SetTrainable("encoder.", false);
  if (freeze_decoder) {
    params.SetTrainableIf(
        [](const std::string& name) {
          return name.rfind("decoder.", 0) == 0 && !IsBiasAttentionParam(name) &&
                 name.rfind("decoder.output.", 0) != 0;
        },
        false);
  }
}

std::vector<const corpus::NamedEntity*> SampleTrainingBias(
    const corpus::Utterance& utterance, const corpus::Corpus& corpus,
    int distractors, double gold_drop, numerics::Rng& rng) {
  if (distractors < 0 || gold_drop < 0.0 || gold_drop > 1.0) {
    throw std::invalid_argument("bad bias sampling parameters");
  }
  std::set<std::string> gold;
  std::vector<const corpus::NamedEntity*> out;
  std::bernoulli_distribution drop(gold_drop);
  for (const auto& g : utterance.gold_entities) {
    if (!gold.insert(g.ne_id).second) continue;
    if (drop(rng)) continue;
    out.push_back(&corpus.Entity(g.ne_id));
  }
  const int available =
      static_cast<int>(corpus.dictionary.size()) - static_cast<int>(gold.size());
  const int k = std::min(distractors, std::max(available, 0));
  std::uniform_int_distribution<size_t> pick(0, corpus.dictionary.size() - 1);
  std::set<std::string> taken = gold;
  for (int added = 0; added < k;) {
    const auto& ne = corpus.dictionary[pick(rng)];
    if (!taken.insert(ne.id).second) continue;
    out.push_back(&ne);
    ++added;
  }
  std::shuffle(out.begin(), out.end(), rng);
  return out;
}

namespace {

Var BiasFor(const SpeechTranslator& model, const corpus::Vocabulary& vocab,
            const std::vector<const corpus::NamedEntity*>& entities) {
  std::vector<std::vector<int>> forms;
  forms.reserve(entities.size());
  for (const auto* ne : entities) forms.push_back(vocab.Encode(ne->TargetTokens()));
  return model.BiasVectors(forms);
}

}  // namespace

double ClasDevLoss(const SpeechTranslator& model, const corpus::Corpus& corpus,
                   const std::vector<corpus::Utterance>& utterances,
                   const std::vector<std::vector<const corpus::NamedEntity*>>&
                       bias_lists) {
  if (utterances.size() != bias_lists.size()) {
    throw std::invalid_argument("one bias list per utterance required");
  }
  if (utterances.empty()) return 0.0;
  numerics::NoGradGuard no_grad;
  double total = 0.0;
  for (size_t i = 0; i < utterances.size(); ++i) {
    const auto& u = utterances[i];
    const Var memory(model.encoder().EncodeSpeech(u.speech_frames).vectors);
    const Var bias = BiasFor(model, corpus.target_vocab, bias_lists[i]);
    total += SequenceLoss(model, memory, &bias,
                          corpus.target_vocab.Encode(u.target_tokens))
                 .scalar();
  }
  return total / static_cast<double>(utterances.size());
}

SpeechTranslator TrainClas(const SpeechTranslator& base,
                           const corpus::Corpus& corpus,
                           const ClasTrainingConfig& config,
                           ClasTrainingReport* report,
                           const ClasProgress& progress) {
  if (base.has_bias()) throw std::invalid_argument("base model already has bias");
  if (config.method == BiasMethod::kNone) {
    throw std::invalid_argument("CLAS training needs a bias method");
  }
  if (config.batch_size < 1 || config.epochs < 0) {
    throw std::invalid_argument("bad CLAS training schedule");
  }
  const auto& train = corpus.Split("train");
  if (train.empty()) throw std::invalid_argument("training split is empty");
  SpeechTranslator model =
      SpeechTranslator::WithBias(base, config.method, config.seed);
  SetClasTrainable(model, config.freeze_decoder);

  const size_t n = config.train_limit > 0
                       ? std::min(train.size(),
                                  static_cast<size_t>(config.train_limit))
                       : train.size();
  // The encoder is frozen, so its outputs are computed once.
  std::vector<Var> memories;
  std::vector<std::vector<int>> targets;
  memories.reserve(n);
  for (size_t i = 0; i < n; ++i) {
    memories.emplace_back(model.encoder().EncodeSpeech(train[i].speech_frames).vectors);
    targets.push_back(corpus.target_vocab.Encode(train[i].target_tokens));
  }

  // Fixed dev bias lists: gold plus distractors, nothing dropped.
  const auto& dev_all = corpus.Split("dev");
  const std::vector<corpus::Utterance> dev(
      dev_all.begin(),
      dev_all.begin() + std::min(dev_all.size(),
                                 static_cast<size_t>(std::max(config.dev_limit, 0))));
  std::vector<std::vector<const corpus::NamedEntity*>> dev_bias;
  numerics::Rng dev_rng(config.seed * 31 + 7);
  for (const auto& u : dev) {
    dev_bias.push_back(
        SampleTrainingBias(u, corpus, config.distractors, 0.0, dev_rng));
  }

  numerics::Adam adam({.lr = config.lr});
  numerics::Rng rng(config.seed * 6151 + 29);
  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  const int batches_per_epoch =
      static_cast<int>((n + config.batch_size - 1) / config.batch_size);
  const int total_steps = batches_per_epoch * config.epochs;
  ClasTrainingReport local;
  int step = 0;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double epoch_loss = 0.0;
    for (size_t start = 0; start < n; start += config.batch_size) {
      const size_t end = std::min(n, start + static_cast<size_t>(config.batch_size));
      model.params().ZeroGrad();
      for (size_t i = start; i < end; ++i) {
        const size_t u = order[i];
        const auto bias_list = SampleTrainingBias(
            train[u], corpus, config.distractors, config.gold_drop, rng);
        Var loss;
        try {
          const Var bias = BiasFor(model, corpus.target_vocab, bias_list);
          loss = SequenceLoss(model, memories[u], &bias, targets[u]);
        } catch (const std::domain_error& e) {
          throw std::runtime_error("CLAS training diverged at step " +
                                   std::to_string(step) + ": " + e.what());
        }
        const double value = loss.scalar();
        if (!std::isfinite(value)) {
          throw std::runtime_error("CLAS training diverged at step " +
                                   std::to_string(step));
        }
        numerics::Backward(loss);
        epoch_loss += value;
      }
      adam.set_lr(numerics::WarmupCosineLr(step, total_steps,
                                           config.warmup_steps, config.lr));
      adam.Step(model.params(), 1.0 / static_cast<double>(end - start));
      ++step;
    }
    epoch_loss /= static_cast<double>(n);
    local.epoch_loss.push_back(epoch_loss);
    local.dev_loss.push_back(ClasDevLoss(model, corpus, dev, dev_bias));
    std::ostringstream msg;
    msg << "clas epoch " << epoch + 1 << "/" << config.epochs << " loss "
        << epoch_loss << " dev " << local.dev_loss.back();
    LOG(INFO) << msg.str();
    if (progress) progress(msg.str());
  }
  model.params().ZeroGrad();
  local.steps = step;
  if (report != nullptr) *report = local;
  return model;
}

}  // namespace nedict::biasdec
