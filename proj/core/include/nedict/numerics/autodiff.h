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

// Graph-based reverse-mode automatic differentiation over dense matrices.
//
// Every operation returns a Var whose node remembers its inputs and a
// closure that pushes the node's gradient back to them. Backward() walks the
// graph reachable from a scalar loss in reverse topological order. Nodes
// built while a NoGradGuard is alive keep no inputs, so inference allocates
// no graph.

#ifndef NEDICT_NUMERICS_AUTODIFF_H_
#define NEDICT_NUMERICS_AUTODIFF_H_

#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "nedict/numerics/tensor.h"

namespace nedict::numerics {

struct Node {
  Matrix value;
  Matrix grad;  // empty until something flows into it
  bool requires_grad = false;
  std::vector<std::shared_ptr<Node>> inputs;
  std::function<void(Node&)> backward;

  void AccumulateGrad(const Matrix& g);
};

class Var {
 public:
  Var() = default;
  explicit Var(Matrix value, bool requires_grad = false);
  explicit Var(const Tensor& t) : Var(t.matrix()) {}
  explicit Var(std::shared_ptr<Node> node) : node_(std::move(node)) {}

  const Matrix& value() const { return node_->value; }
  Matrix& mutable_value() { return node_->value; }
  const Matrix& grad() const { return node_->grad; }
  int rows() const { return static_cast<int>(node_->value.rows()); }
  int cols() const { return static_cast<int>(node_->value.cols()); }
  bool requires_grad() const { return node_ && node_->requires_grad; }
  void set_requires_grad(bool on) { node_->requires_grad = on; }
  void ZeroGrad() { node_->grad.resize(0, 0); }
  double scalar() const { return node_->value(0, 0); }
  bool valid() const { return node_ != nullptr; }
  Tensor ToTensor() const { return Tensor(node_->value); }

  const std::shared_ptr<Node>& node() const { return node_; }

 private:
  std::shared_ptr<Node> node_;
};

// Disables graph recording on the current thread while alive.
class NoGradGuard {
 public:
  NoGradGuard();
  ~NoGradGuard();
  NoGradGuard(const NoGradGuard&) = delete;
  NoGradGuard& operator=(const NoGradGuard&) = delete;

 private:
  bool previous_;
};

bool GradEnabled();

// Seeds d(loss)/d(loss) = 1 and accumulates gradients into every reachable
// node that requires them. `loss` must be 1 x 1.
void Backward(const Var& loss);

// Records the per-head attention weights of every attention call.
struct AttentionTrace {
  std::vector<Matrix> weights;
};

namespace ops {

Var MatMul(const Var& a, const Var& b);
// a * b^T
Var MatMulT(const Var& a, const Var& b);
Var Add(const Var& a, const Var& b);
Var Sub(const Var& a, const Var& b);
Var Mul(const Var& a, const Var& b);
// Adds a 1 x c row to every row of `a`.
Var AddRow(const Var& a, const Var& row);
Var Scale(const Var& a, double s);
Var AddScalar(const Var& a, double s);
Var Relu(const Var& a);
// Tanh approximation of GELU; smooth, which keeps finite differences honest.
Var Gelu(const Var& a);
Var Sigmoid(const Var& a);
Var LayerNorm(const Var& x, const Var& gain, const Var& bias,
              double eps = 1e-5);
// Row-wise softmax restricted to allowed keys. Masked entries get exactly
// zero weight. Throws std::invalid_argument for a fully masked row.
Var MaskedSoftmax(const Var& scores, const Mask* mask);
Var SliceRows(const Var& a, int start, int count);
Var SliceCols(const Var& a, int start, int count);
Var ConcatRows(std::span<const Var> parts);
Var ConcatCols(std::span<const Var> parts);
// Embedding lookup: row ids[i] of `table` becomes row i of the result.
Var GatherRows(const Var& table, std::span<const int> ids);
Var MeanRows(const Var& a);
Var Sum(const Var& a);
Var Mean(const Var& a);
// Divides every row by its L2 norm; throws on a zero-norm row.
Var NormalizeRows(const Var& a);
// Row-wise dot products, L x 1.
Var RowDot(const Var& a, const Var& b);
// Mean token cross-entropy of row-wise logits against target ids.
Var CrossEntropy(const Var& logits, std::span<const int> targets);
// Numerically stable binary cross-entropy on a 1 x 1 logit.
Var BceWithLogits(const Var& logit, double target);

}  // namespace ops
}  // namespace nedict::numerics

#endif  // NEDICT_NUMERICS_AUTODIFF_H_
