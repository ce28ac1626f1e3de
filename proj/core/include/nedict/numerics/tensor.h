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

#ifndef NEDICT_NUMERICS_TENSOR_H_
#define NEDICT_NUMERICS_TENSOR_H_

#include <span>
#include <vector>

#include <Eigen/Dense>

namespace nedict::numerics {

using Matrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using RowVector = Eigen::Matrix<double, 1, Eigen::Dynamic, Eigen::RowMajor>;

// Attention mask; true means the (query, key) pair may attend.
using Mask =
    Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Immutable dense 2-D tensor in row-major order. Vectors are 1 x n.
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(Matrix values);
  // Builds a tensor from an explicit shape (rank 1 or 2) and flat data.
  static Tensor FromShape(const std::vector<int>& shape,
                          std::vector<double> data);
  static Tensor Zeros(int rows, int cols);

  std::vector<int> shape() const { return {rows(), cols()}; }
  int rows() const { return static_cast<int>(values_.rows()); }
  int cols() const { return static_cast<int>(values_.cols()); }
  bool empty() const { return values_.size() == 0; }

  const Matrix& matrix() const { return values_; }
  std::span<const double> data() const {
    return {values_.data(), static_cast<size_t>(values_.size())};
  }
  RowVector row(int r) const { return values_.row(r); }
  double operator()(int r, int c) const { return values_(r, c); }

  bool AllFinite() const { return values_.allFinite(); }

  bool operator==(const Tensor& other) const;

 private:
  Matrix values_;
};

// Cosine similarity of two row vectors; throws on a zero-norm input.
double Cosine(const RowVector& a, const RowVector& b);

}  // namespace nedict::numerics

#endif  // NEDICT_NUMERICS_TENSOR_H_
