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

#include "nedict/encoder/heatmap.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <stdexcept>

namespace nedict::encoder {

numerics::Matrix SimilarityHeatmap(const EncoderOutput& text,
                                   const EncoderOutput& speech) {
  const auto& t = text.vectors.matrix();
  const auto& s = speech.vectors.matrix();
  if (t.cols() != s.cols()) {
    throw std::invalid_argument("heatmap: encodings differ in dimension");
  }
  Eigen::VectorXd tn = t.rowwise().norm();
  Eigen::VectorXd sn = s.rowwise().norm();
  if ((tn.array() == 0.0).any() || (sn.array() == 0.0).any()) {
    throw std::invalid_argument("heatmap: zero-norm encoder output");
  }
  numerics::Matrix sim = s * t.transpose();
  sim.array().colwise() /= sn.array();
  sim.array().rowwise() /= tn.transpose().array();
  return sim.cwiseMax(-1.0).cwiseMin(1.0);
}

AlignmentStats MeasureAlignment(const numerics::Matrix& heatmap,
                                std::span<const int> frame_alignment) {
  if (static_cast<Eigen::Index>(frame_alignment.size()) != heatmap.rows()) {
    throw std::invalid_argument("alignment length differs from heatmap rows");
  }
  double diag = 0.0;
  double off = 0.0;
  long n_diag = 0;
  long n_off = 0;
  for (Eigen::Index f = 0; f < heatmap.rows(); ++f) {
    for (Eigen::Index p = 0; p < heatmap.cols(); ++p) {
      if (p == frame_alignment[f]) {
        diag += heatmap(f, p);
        ++n_diag;
      } else {
        off += heatmap(f, p);
        ++n_off;
      }
    }
  }
  return {n_diag ? diag / n_diag : 0.0, n_off ? off / n_off : 0.0};
}

void WriteHeatmapCsv(const numerics::Matrix& heatmap,
                     const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << std::setprecision(6);
  for (Eigen::Index r = 0; r < heatmap.rows(); ++r) {
    for (Eigen::Index c = 0; c < heatmap.cols(); ++c) {
      if (c) out << ',';
      out << heatmap(r, c);
    }
    out << '\n';
  }
}

void WriteHeatmapPgm(const numerics::Matrix& heatmap,
                     const std::filesystem::path& path, int cell_pixels) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  const auto width = heatmap.cols() * cell_pixels;
  const auto height = heatmap.rows() * cell_pixels;
  out << "P5\n" << width << ' ' << height << "\n255\n";
  for (Eigen::Index y = 0; y < height; ++y) {
    for (Eigen::Index x = 0; x < width; ++x) {
      const double v = heatmap(y / cell_pixels, x / cell_pixels);
      const auto level = static_cast<unsigned char>(
          std::lround(std::clamp((v + 1.0) / 2.0, 0.0, 1.0) * 255.0));
      out.put(static_cast<char>(level));
    }
  }
}

}  // namespace nedict::encoder
