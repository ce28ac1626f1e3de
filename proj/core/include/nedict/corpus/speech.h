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

#ifndef NEDICT_CORPUS_SPEECH_H_
#define NEDICT_CORPUS_SPEECH_H_

#include <cstdint>
#include <span>
#include <vector>

#include "nedict/numerics/tensor.h"

namespace nedict::corpus {

struct SynthesizedSpeech {
  numerics::Tensor frames;           // F x frame_dim
  std::vector<int> frame_alignment;  // frame -> phoneme position
};

// Stand-in for acoustics: every phoneme emits a run of frames, each its
// prototype vector plus isotropic Gaussian noise. Frame values are rounded
// to single precision so the binary frame files store them exactly.
class SpeechSynthesizer {
 public:
  SpeechSynthesizer(numerics::Tensor prototypes, int min_duration = 1,
                    int max_duration = 4);

  SynthesizedSpeech Synthesize(std::span<const int> phonemes,
                               double noise_sigma, uint64_t seed) const;

  const numerics::Tensor& prototypes() const { return prototypes_; }

 private:
  numerics::Tensor prototypes_;
  int min_duration_;
  int max_duration_;
};

}  // namespace nedict::corpus

#endif  // NEDICT_CORPUS_SPEECH_H_
