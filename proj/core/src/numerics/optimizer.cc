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

#include "nedict/numerics/optimizer.h"

#include <algorithm>
#include <cmath>

namespace nedict::numerics {

double Adam::Step(ParameterSet& params, double grad_scale) {
  double sq = 0.0;
  for (const auto& [name, v] : params) {
    if (v.requires_grad() && v.grad().size() != 0) {
      sq += v.grad().squaredNorm();
    }
  }
  const double norm = std::sqrt(sq) * std::abs(grad_scale);
  double scale = grad_scale;
  if (options_.clip_norm > 0.0 && norm > options_.clip_norm) {
    scale *= options_.clip_norm / norm;
  }
  ++steps_;
  const double bc1 = 1.0 - std::pow(options_.beta1, steps_);
  const double bc2 = 1.0 - std::pow(options_.beta2, steps_);
  for (const auto& [name, v] : params) {
    if (!v.requires_grad() || v.grad().size() == 0) continue;
    Var param = v;
    Moments& mom = moments_[name];
    if (mom.m.size() == 0) {
      mom.m = Matrix::Zero(v.rows(), v.cols());
      mom.v = Matrix::Zero(v.rows(), v.cols());
    }
    const Matrix g = v.grad() * scale;
    mom.m = options_.beta1 * mom.m + (1.0 - options_.beta1) * g;
    mom.v = options_.beta2 * mom.v +
            (1.0 - options_.beta2) * g.cwiseProduct(g);
    param.mutable_value().array() -=
        options_.lr * (mom.m.array() / bc1) /
        ((mom.v.array() / bc2).sqrt() + options_.eps);
  }
  return norm;
}

double WarmupCosineLr(int step, int total, int warmup, double base_lr,
                      double floor_ratio) {
  if (warmup > 0 && step < warmup) {
    return base_lr * static_cast<double>(step + 1) / warmup;
  }
  if (total <= warmup) return base_lr;
  const double progress =
      std::min(1.0, static_cast<double>(step - warmup) / (total - warmup));
  const double cosine = 0.5 * (1.0 + std::cos(M_PI * progress));
  return base_lr * (floor_ratio + (1.0 - floor_ratio) * cosine);
}

}  // namespace nedict::numerics
