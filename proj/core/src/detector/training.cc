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

#include "nedict/detector/training.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "glog/logging.h"
#include "nedict/numerics/optimizer.h"
#include "nedict/numerics/parallel.h"

namespace nedict::detector {

using numerics::Var;
namespace ops = numerics::ops;

double RankingTerm(double s_pos, double s_neg, double margin) {
  return std::max(0.0, margin - (s_pos - s_neg));
}

Var PairLoss(const DetectorModel& model, const Var& pos, const Var& neg,
             const Var& speech, double margin, double ranking_weight,
             double head_layerdrop, numerics::Rng* rng) {
  Var lp = model.Logit(pos, speech, nullptr, head_layerdrop, rng);
  Var ln = model.Logit(neg, speech, nullptr, head_layerdrop, rng);
  Var loss = ops::Add(ops::BceWithLogits(lp, 1.0), ops::BceWithLogits(ln, 0.0));
  if (ranking_weight > 0.0) {
    Var gap = ops::Sub(ops::Sigmoid(lp), ops::Sigmoid(ln));
    Var hinge = ops::Relu(ops::AddScalar(ops::Scale(gap, -1.0), margin));
    loss = ops::Add(loss, ops::Scale(hinge, ranking_weight));
  }
  return loss;
}

using numerics::ParallelFor;

std::vector<eval::UtteranceScores> ScoreUtterances(
    const DetectorModel& model, const encoder::SharedEncoder& encoder,
    std::span<const EncodedEntity> dictionary,
    std::span<const corpus::Utterance> utterances, int jobs) {
  std::vector<eval::UtteranceScores> out(utterances.size());
  ParallelFor(utterances.size(), jobs, [&](size_t i) {
    const auto speech = encoder.EncodeSpeech(utterances[i].speech_frames);
    auto& s = out[i];
    s.utterance_id = utterances[i].id;
    for (const auto& e : dictionary) {
      s.ne_ids.push_back(e.entity->id);
      s.probabilities.push_back(model.Score(e.text, speech.vectors));
    }
  });
  return out;
}

std::vector<eval::UtteranceScores> CosineScoreUtterances(
    const encoder::SharedEncoder& encoder,
    std::span<const EncodedEntity> dictionary,
    std::span<const corpus::Utterance> utterances, int jobs) {
  std::vector<eval::UtteranceScores> out(utterances.size());
  ParallelFor(utterances.size(), jobs, [&](size_t i) {
    const auto speech = encoder.EncodeSpeech(utterances[i].speech_frames);
    auto& s = out[i];
    s.utterance_id = utterances[i].id;
    for (const auto& r :
         CosineBaselineDetect(dictionary, speech.vectors, 0.5)) {
      s.ne_ids.push_back(r.ne_id);
      s.probabilities.push_back(r.probability);
    }
  });
  return out;
}

DetectorModel TrainDetector(
    const corpus::Corpus& corpus, const encoder::SharedEncoder& encoder,
    const DetectorConfig& arch, const DetectorTrainingConfig& config,
    DetectorTrainingReport* report,
    const std::function<void(const std::string&)>& progress) {
  const auto& train = corpus.Split("train");
  if (train.size() < 2) {
    throw std::invalid_argument("detector training needs >= 2 utterances");
  }
  if (config.layerdrop_variants < 1 || config.batch_size < 2) {
    throw std::invalid_argument("bad detector training config");
  }
  DetectorModel model(arch, config.seed);
  numerics::Adam adam({.lr = config.lr});
  numerics::Rng rng(config.seed * 6364136223846793005ULL + 1442695040888963407ULL);

  // Frozen-encoder speech features, K LayerDrop variants per utterance.
  const int variants = config.layerdrop > 0.0 ? config.layerdrop_variants : 1;
  std::vector<std::vector<numerics::Tensor>> features(train.size());
  for (size_t i = 0; i < train.size(); ++i) {
    for (int k = 0; k < variants; ++k) {
      const uint64_t seed = config.seed * 1000003ULL + i * 131ULL + k;
      features[i].push_back(
          encoder.EncodeSpeech(train[i].speech_frames, config.layerdrop, seed)
              .vectors);
    }
  }

  const auto& dev = corpus.Split("dev");
  const size_t dev_n =
      std::min(dev.size(), static_cast<size_t>(std::max(0, config.dev_limit)));
  std::vector<EncodedEntity> dictionary;
  if (dev_n > 0) {
    dictionary = EncodeDictionary(encoder, corpus.dictionary, corpus.lexicon);
  }

  std::vector<size_t> order(train.size());
  std::iota(order.begin(), order.end(), 0);
  const int batches = static_cast<int>((order.size() + config.batch_size - 1) /
                                       config.batch_size);
  const int total_steps = batches * config.epochs;
  DetectorTrainingReport local;
  int step = 0;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double epoch_loss = 0.0;
    for (size_t start = 0; start < order.size();
         start += config.batch_size) {
      size_t end = std::min(order.size(),
                            start + static_cast<size_t>(config.batch_size));
      if (end - start < 2) start = end - 2;  // a lone tail joins its neighbour
      std::vector<const corpus::Utterance*> batch;
      for (size_t i = start; i < end; ++i) batch.push_back(&train[order[i]]);

      model.params().ZeroGrad();
      double batch_loss = 0.0;
      for (size_t b = 0; b < batch.size(); ++b) {
        const TrainingPair pair =
            SampleTrainingPair(batch, b, corpus, config.sampling, rng);
        const size_t ui = order[start + b];
        const int k = std::uniform_int_distribution<int>(0, variants - 1)(rng);
        numerics::Tensor speech = features[ui][k];
        if (config.speech_mask_fraction > 0.0) {
          speech = SpeechSpanMask(speech, config.speech_mask_fraction, rng);
        }
        const uint64_t text_seed = rng();
        Var pos(encoder.EncodeText(pair.positive.phonemes, config.layerdrop,
                                   text_seed)
                    .vectors);
        Var neg(encoder.EncodeText(pair.negative.phonemes, config.layerdrop,
                                   text_seed + 1)
                    .vectors);
        Var loss = PairLoss(model, pos, neg, Var(speech), config.margin,
                            config.ranking_weight, config.head_layerdrop,
                            &rng);
        const double value = loss.scalar();
        if (!std::isfinite(value)) {
          throw std::runtime_error("detector training diverged at step " +
                                   std::to_string(step));
        }
        numerics::Backward(loss);
        batch_loss += value;
      }
      adam.set_lr(numerics::WarmupCosineLr(step, total_steps,
                                           config.warmup_steps, config.lr));
      adam.Step(model.params(), 1.0 / static_cast<double>(batch.size()));
      epoch_loss += batch_loss;
      ++step;
    }
    model.params().ZeroGrad();
    DetectorEpochLog log;
    log.loss = epoch_loss / static_cast<double>(order.size());
    std::ostringstream msg;
    msg << "detector epoch " << epoch + 1 << "/" << config.epochs << " loss "
        << log.loss;
    if (dev_n > 0) {
      const auto dev_span =
          std::span<const corpus::Utterance>(dev).subspan(0, dev_n);
      const auto scores =
          ScoreUtterances(model, encoder, dictionary, dev_span);
      log.dev = eval::EvaluateDetections(scores, dev_span, corpus,
                                         config.threshold);
      for (const auto& [cat, r] : log.dev.recall) {
        msg << " " << corpus::CategoryName(cat) << " " << r;
      }
      msg << " retrieved " << log.dev.avg_retrieved;
    }
    LOG(INFO) << msg.str();
    if (progress) progress(msg.str());
    local.epochs.push_back(log);
  }
  if (report != nullptr) *report = std::move(local);
  return model;
}

}  // namespace nedict::detector
