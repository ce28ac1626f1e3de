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

#include "nedict/numerics/parameters.h"

#include <cmath>
#include <cstring>
#include <stdexcept>

namespace nedict::numerics {

Var ParameterSet::Create(const std::string& name, Matrix init) {
  if (entries_.count(name) != 0) {
    throw std::invalid_argument("duplicate parameter name: " + name);
  }
  Var v(std::move(init), /*requires_grad=*/true);
  entries_.emplace(name, v);
  return v;
}

bool ParameterSet::Contains(const std::string& name) const {
  return entries_.count(name) != 0;
}

const Var& ParameterSet::Get(const std::string& name) const {
  auto it = entries_.find(name);
  if (it == entries_.end()) {
    throw std::out_of_range("unknown parameter: " + name);
  }
  return it->second;
}

std::vector<std::string> ParameterSet::Names() const {
  std::vector<std::string> names;
  names.reserve(entries_.size());
  for (const auto& [name, v] : entries_) names.push_back(name);
  return names;
}

size_t ParameterSet::NumScalars(bool trainable_only) const {
  size_t n = 0;
  for (const auto& [name, v] : entries_) {
    if (!trainable_only || v.requires_grad()) {
      n += static_cast<size_t>(v.value().size());
    }
  }
  return n;
}

bool ParameterSet::IsTrainable(const std::string& name) const {
  return Get(name).requires_grad();
}

int ParameterSet::SetTrainable(std::string_view prefix, bool trainable) {
  int matched = 0;
  for (auto& [name, v] : entries_) {
    if (name.starts_with(prefix)) {
      v.set_requires_grad(trainable);
      if (!trainable) v.ZeroGrad();
      ++matched;
    }
  }
  return matched;
}

void ParameterSet::SetAllTrainable(bool trainable) {
  SetTrainable("", trainable);
}

int ParameterSet::SetTrainableIf(
    const std::function<bool(const std::string&)>& pred, bool trainable) {
  int matched = 0;
  for (auto& [name, v] : entries_) {
    if (pred(name)) {
      v.set_requires_grad(trainable);
      if (!trainable) v.ZeroGrad();
      ++matched;
    }
  }
  return matched;
}

void ParameterSet::Adopt(const ParameterSet& other) {
  for (const auto& [name, v] : other.entries_) {
    if (!entries_.emplace(name, v).second) {
      throw std::invalid_argument("duplicate parameter name: " + name);
    }
  }
}

void ParameterSet::ZeroGrad() {
  for (auto& [name, v] : entries_) v.ZeroGrad();
}

int ParameterSet::CopyValuesFrom(const ParameterSet& other,
                                 std::string_view prefix) {
  int copied = 0;
  for (auto& [name, v] : entries_) {
    if (!name.starts_with(prefix)) continue;
    auto it = other.entries_.find(name);
    if (it == other.entries_.end()) continue;
    const Matrix& src = it->second.value();
    if (src.rows() != v.value().rows() || src.cols() != v.value().cols()) {
      throw std::invalid_argument("shape mismatch copying parameter " + name);
    }
    v.mutable_value() = src;
    ++copied;
  }
  return copied;
}

uint64_t ParameterSet::Fingerprint(std::string_view prefix) const {
  uint64_t h = 1469598103934665603ULL;
  auto mix = [&h](const void* data, size_t n) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (size_t i = 0; i < n; ++i) {
      h ^= p[i];
      h *= 1099511628211ULL;
    }
  };
  for (const auto& [name, v] : entries_) {
    if (!name.starts_with(prefix)) continue;
    mix(name.data(), name.size());
    const int64_t dims[2] = {v.value().rows(), v.value().cols()};
    mix(dims, sizeof(dims));
    mix(v.value().data(), sizeof(double) * v.value().size());
  }
  return h;
}

Matrix XavierUniform(int rows, int cols, Rng& rng) {
  const double limit = std::sqrt(6.0 / (rows + cols));
  std::uniform_real_distribution<double> dist(-limit, limit);
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = dist(rng);
  return m;
}

Matrix NormalInit(int rows, int cols, double stddev, Rng& rng) {
  std::normal_distribution<double> dist(0.0, stddev);
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = dist(rng);
  return m;
}

}  // namespace nedict::numerics
