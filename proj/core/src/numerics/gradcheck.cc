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

#include "nedict/numerics/gradcheck.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace nedict::numerics {
namespace {

double Evaluate(const std::function<Var()>& loss_fn) {
  NoGradGuard no_grad;
  const double v = loss_fn().scalar();
  if (!std::isfinite(v)) {
    throw std::domain_error("gradient check: loss is not finite");
  }
  return v;
}

}  // namespace

GradCheckResult FiniteDifferenceCheck(const std::function<Var()>& loss_fn,
                                      ParameterSet& params,
                                      const GradCheckOptions& options) {
  if (options.eps < 1e-7 || options.eps > 1e-3) {
    throw std::invalid_argument("gradient check: eps must lie in [1e-7, 1e-3]");
  }
  params.ZeroGrad();
  Var loss = loss_fn();
  if (!std::isfinite(loss.scalar())) {
    throw std::domain_error("gradient check: loss is not finite");
  }
  Backward(loss);

  Rng rng(options.seed);
  GradCheckResult result;
  for (const auto& [name, v] : params) {
    if (!v.requires_grad()) continue;
    Var param = v;
    const Matrix analytic = v.grad().size() == 0
                                ? Matrix::Zero(v.rows(), v.cols())
                                : v.grad();
    const int n = static_cast<int>(v.value().size());
    std::vector<int> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    if (options.max_entries_per_param > 0 &&
        n > options.max_entries_per_param) {
      std::shuffle(idx.begin(), idx.end(), rng);
      idx.resize(options.max_entries_per_param);
      std::sort(idx.begin(), idx.end());
    }
    for (int i : idx) {
      double& x = param.mutable_value().data()[i];
      const double saved = x;
      x = saved + options.eps;
      const double up = Evaluate(loss_fn);
      x = saved - options.eps;
      const double down = Evaluate(loss_fn);
      x = saved;
      const double numeric = (up - down) / (2.0 * options.eps);
      const double a = analytic.data()[i];
      double err = 0.0;
      if (std::max(std::abs(a), std::abs(numeric)) >= options.abs_floor) {
        err = std::abs(a - numeric) /
              (std::abs(a) + std::abs(numeric) + 1e-12);
      }
      ++result.entries_checked;
      if (err > result.max_rel_error || result.worst_index < 0) {
        result.max_rel_error = std::max(result.max_rel_error, err);
        result.worst_param = name;
        result.worst_index = i;
        result.worst_analytic = a;
        result.worst_numeric = numeric;
      }
    }
  }
  params.ZeroGrad();
  return result;
}

}  // namespace nedict::numerics
