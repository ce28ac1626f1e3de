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

#ifndef NEDICT_NUMERICS_OPTIMIZER_H_
#define NEDICT_NUMERICS_OPTIMIZER_H_

#include <map>
#include <string>

#include "nedict/numerics/parameters.h"

namespace nedict::numerics {

struct AdamOptions {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.98;
  double eps = 1e-9;
  double clip_norm = 1.0;  // <= 0 disables clipping
};

// Adam over the trainable subset of a ParameterSet. Parameters without a
// gradient in a step are left untouched.
class Adam {
 public:
  explicit Adam(AdamOptions options) : options_(options) {}

  // Applies one update using the gradients currently stored on the
  // parameters, scaled by `grad_scale`. Returns the pre-clip gradient norm.
  double Step(ParameterSet& params, double grad_scale = 1.0);
  void set_lr(double lr) { options_.lr = lr; }
  int steps() const { return steps_; }

 private:
  struct Moments {
    Matrix m;
    Matrix v;
  };
  AdamOptions options_;
  std::map<std::string, Moments> moments_;
  int steps_ = 0;
};

// Linear warmup to `base_lr` over `warmup` steps, then cosine decay to
// `floor_ratio * base_lr` at `total` steps.
double WarmupCosineLr(int step, int total, int warmup, double base_lr,
                      double floor_ratio = 0.1);

}  // namespace nedict::numerics

#endif  // NEDICT_NUMERICS_OPTIMIZER_H_
