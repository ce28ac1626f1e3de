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

#include "nedict/corpus/speech.h"

#include <random>
#include <stdexcept>
#include <string>

namespace nedict::corpus {

SpeechSynthesizer::SpeechSynthesizer(numerics::Tensor prototypes,
                                     int min_duration, int max_duration)
    : prototypes_(std::move(prototypes)),
      min_duration_(min_duration),
      max_duration_(max_duration) {
  if (min_duration < 1 || max_duration < min_duration) {
    throw std::invalid_argument("invalid phoneme duration range");
  }
}

SynthesizedSpeech SpeechSynthesizer::Synthesize(std::span<const int> phonemes,
                                                double noise_sigma,
                                                uint64_t seed) const {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> duration(min_duration_, max_duration_);
  std::normal_distribution<double> noise(0.0, 1.0);
  std::vector<int> runs;
  runs.reserve(phonemes.size());
  int total = 0;
  for (int p : phonemes) {
    if (p < 0 || p >= prototypes_.rows()) {
      throw std::out_of_range("phoneme id " + std::to_string(p) +
                              " has no prototype");
    }
    runs.push_back(duration(rng));
    total += runs.back();
  }
  numerics::Matrix frames(total, prototypes_.cols());
  SynthesizedSpeech out;
  out.frame_alignment.reserve(total);
  int f = 0;
  for (size_t i = 0; i < phonemes.size(); ++i) {
    for (int r = 0; r < runs[i]; ++r, ++f) {
      for (int c = 0; c < prototypes_.cols(); ++c) {
        const double v = prototypes_(phonemes[i], c) +
                         (noise_sigma > 0.0 ? noise_sigma * noise(rng) : 0.0);
        frames(f, c) = static_cast<double>(static_cast<float>(v));
      }
      out.frame_alignment.push_back(static_cast<int>(i));
    }
  }
  out.frames = numerics::Tensor(std::move(frames));
  return out;
}

}  // namespace nedict::corpus
