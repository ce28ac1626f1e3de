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

#ifndef NEDICT_NUMERICS_PARAMETERS_H_
#define NEDICT_NUMERICS_PARAMETERS_H_

#include <cstdint>
#include <functional>
#include <map>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "nedict/numerics/autodiff.h"

namespace nedict::numerics {

using Rng = std::mt19937_64;

// Named trainable tensors. Frozen entries stay in the set (they are saved and
// loaded) but never accumulate gradients and are skipped by optimizers.
class ParameterSet {
 public:
  // Registers a new trainable parameter. Names must be unique.
  Var Create(const std::string& name, Matrix init);

  bool Contains(const std::string& name) const;
  const Var& Get(const std::string& name) const;
  std::vector<std::string> Names() const;
  size_t size() const { return entries_.size(); }
  size_t NumScalars(bool trainable_only = false) const;

  bool IsTrainable(const std::string& name) const;
  // Applies to every parameter whose name starts with `prefix`; returns how
  // many matched.
  int SetTrainable(std::string_view prefix, bool trainable);
  void SetAllTrainable(bool trainable);
  int SetTrainableIf(const std::function<bool(const std::string&)>& pred,
                     bool trainable);

  // Inserts aliases of every parameter of `other` (the handles are shared,
  // not copied). Throws on a name clash.
  void Adopt(const ParameterSet& other);

  void ZeroGrad();

  // Copies values for every name present in both sets, optionally limited to
  // names starting with `prefix`. Shapes must agree. Returns the count copied.
  int CopyValuesFrom(const ParameterSet& other, std::string_view prefix = {});

  // FNV-1a over names, shapes and raw value bytes of matching parameters.
  uint64_t Fingerprint(std::string_view prefix = {}) const;

  auto begin() const { return entries_.begin(); }
  auto end() const { return entries_.end(); }

 private:
  std::map<std::string, Var> entries_;
};

Matrix XavierUniform(int rows, int cols, Rng& rng);
Matrix NormalInit(int rows, int cols, double stddev, Rng& rng);

}  // namespace nedict::numerics

#endif  // NEDICT_NUMERICS_PARAMETERS_H_
