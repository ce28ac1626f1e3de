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

#ifndef NEDICT_NUMERICS_GRADCHECK_H_
#define NEDICT_NUMERICS_GRADCHECK_H_

#include <cstdint>
#include <functional>
#include <string>

#include "nedict/numerics/parameters.h"

namespace nedict::numerics {

struct GradCheckOptions {
  double eps = 1e-5;
  // Entries sampled per parameter tensor; <= 0 checks every entry.
  int max_entries_per_param = 12;
  // Entries where both gradients are below this magnitude are treated as
  // agreeing; central differences cannot resolve values under roundoff.
  double abs_floor = 1e-8;
  uint64_t seed = 0;
};

struct GradCheckResult {
  double max_rel_error = 0.0;
  std::string worst_param;
  int worst_index = -1;
  double worst_analytic = 0.0;
  double worst_numeric = 0.0;
  int entries_checked = 0;
};

// Compares analytic gradients of `loss_fn` against central differences for
// trainable parameters. Per entry the error is
//   |analytic - numeric| / (|analytic| + |numeric| + 1e-12)
// and the maximum is reported. `loss_fn` must rebuild its graph each call and
// be deterministic.
GradCheckResult FiniteDifferenceCheck(const std::function<Var()>& loss_fn,
                                      ParameterSet& params,
                                      const GradCheckOptions& options = {});

}  // namespace nedict::numerics

#endif  // NEDICT_NUMERICS_GRADCHECK_H_
