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

#include "nedict/numerics/tensor.h"

#include <cmath>
#include <stdexcept>
#include <string>

namespace nedict::numerics {

Tensor::Tensor(Matrix values) : values_(std::move(values)) {}

Tensor Tensor::FromShape(const std::vector<int>& shape,
                         std::vector<double> data) {
  if (shape.empty() || shape.size() > 2) {
    throw std::invalid_argument("tensor rank must be 1 or 2, got " +
                                std::to_string(shape.size()));
  }
  const int rows = shape.size() == 1 ? 1 : shape[0];
  const int cols = shape.back();
  if (rows < 0 || cols < 0 ||
      static_cast<size_t>(rows) * static_cast<size_t>(cols) != data.size()) {
    throw std::invalid_argument("tensor shape does not match data length " +
                                std::to_string(data.size()));
  }
  Matrix m(rows, cols);
  std::copy(data.begin(), data.end(), m.data());
  return Tensor(std::move(m));
}

Tensor Tensor::Zeros(int rows, int cols) {
  return Tensor(Matrix::Zero(rows, cols));
}

bool Tensor::operator==(const Tensor& other) const {
  return values_.rows() == other.values_.rows() &&
         values_.cols() == other.values_.cols() && values_ == other.values_;
}

double Cosine(const RowVector& a, const RowVector& b) {
  if (a.size() != b.size()) {
    throw std::invalid_argument("cosine of vectors with different sizes");
  }
  const double na = a.norm();
  const double nb = b.norm();
  if (na == 0.0 || nb == 0.0) {
    throw std::invalid_argument("cosine of a zero-norm vector");
  }
  return a.dot(b) / (na * nb);
}

}  // namespace nedict::numerics
