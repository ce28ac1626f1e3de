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

#ifndef NEDICT_ENCODER_HEATMAP_H_
#define NEDICT_ENCODER_HEATMAP_H_

#include <filesystem>
#include <span>

#include "nedict/encoder/shared_encoder.h"

namespace nedict::encoder {

// Cosine similarity of every speech frame (rows) against every text
// phoneme position (columns).
numerics::Matrix SimilarityHeatmap(const EncoderOutput& text,
                                   const EncoderOutput& speech);

struct AlignmentStats {
  double diagonal_mean = 0.0;      // cells on the known frame alignment
  double off_diagonal_mean = 0.0;  // every other cell
  double margin() const { return diagonal_mean - off_diagonal_mean; }
};

// Splits heatmap cells by the recorded frame -> phoneme alignment.
AlignmentStats MeasureAlignment(const numerics::Matrix& heatmap,
                                std::span<const int> frame_alignment);

void WriteHeatmapCsv(const numerics::Matrix& heatmap,
                     const std::filesystem::path& path);
// 8-bit binary PGM; lighter means more similar ([-1, 1] -> [0, 255]).
void WriteHeatmapPgm(const numerics::Matrix& heatmap,
                     const std::filesystem::path& path, int cell_pixels = 4);

}  // namespace nedict::encoder

#endif  // NEDICT_ENCODER_HEATMAP_H_
