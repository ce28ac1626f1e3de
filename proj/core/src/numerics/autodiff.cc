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

#include "nedict/numerics/autodiff.h"

#include <cmath>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <utility>

namespace nedict::numerics {
namespace {

thread_local bool g_grad_enabled = true;

std::string ShapeOf(const Matrix& m) {
  return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

void RequireSameShape(const Var& a, const Var& b, const char* op) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw std::invalid_argument(std::string(op) + ": shape mismatch " +
                                ShapeOf(a.value()) + " vs " +
                                ShapeOf(b.value()));
  }
}

// Wraps a freshly computed value into a Var, recording the graph edge only
// when gradients are enabled and some input needs one.
Var MakeResult(const char* op, Matrix value,
               std::initializer_list<const Var*> inputs,
               std::function<void(Node&)> backward) {
  if (!value.allFinite()) {
    throw std::domain_error(std::string(op) + ": produced a non-finite value");
  }
  auto node = std::make_shared<Node>();
  node->value = std::move(value);
  if (!g_grad_enabled) return Var(std::move(node));
  bool any = false;
  for (const Var* in : inputs) any = any || in->requires_grad();
  if (!any) return Var(std::move(node));
  node->requires_grad = true;
  node->inputs.reserve(inputs.size());
  for (const Var* in : inputs) node->inputs.push_back(in->node());
  node->backward = std::move(backward);
  return Var(std::move(node));
}

Var MakeResultN(const char* op, Matrix value, std::span<const Var> inputs,
                std::function<void(Node&)> backward) {
  if (!value.allFinite()) {
    throw std::domain_error(std::string(op) + ": produced a non-finite value");
  }
  auto node = std::make_shared<Node>();
  node->value = std::move(value);
  if (!g_grad_enabled) return Var(std::move(node));
  bool any = false;
  for (const Var& in : inputs) any = any || in.requires_grad();
  if (!any) return Var(std::move(node));
  node->requires_grad = true;
  for (const Var& in : inputs) node->inputs.push_back(in.node());
  node->backward = std::move(backward);
  return Var(std::move(node));
}

inline bool Wants(const Node& self, size_t i) {
  return self.inputs[i]->requires_grad;
}

}  // namespace

void Node::AccumulateGrad(const Matrix& g) {
  if (grad.size() == 0) {
    grad = g;
  } else {
    grad += g;
  }
}

Var::Var(Matrix value, bool requires_grad) : node_(std::make_shared<Node>()) {
  node_->value = std::move(value);
  node_->requires_grad = requires_grad;
}

NoGradGuard::NoGradGuard() : previous_(g_grad_enabled) {
  g_grad_enabled = false;
}

NoGradGuard::~NoGradGuard() { g_grad_enabled = previous_; }

bool GradEnabled() { return g_grad_enabled; }

void Backward(const Var& loss) {
  if (loss.rows() != 1 || loss.cols() != 1) {
    throw std::invalid_argument("Backward: loss must be 1x1, got " +
                                ShapeOf(loss.value()));
  }
  if (!loss.requires_grad()) return;

  // Iterative post-order DFS; reversing it yields a topological order.
  std::vector<Node*> order;
  std::unordered_set<Node*> visited;
  std::vector<std::pair<Node*, size_t>> stack;
  stack.emplace_back(loss.node().get(), 0);
  visited.insert(loss.node().get());
  while (!stack.empty()) {
    auto& [node, next] = stack.back();
    if (next < node->inputs.size()) {
      Node* child = node->inputs[next++].get();
      if (child->requires_grad && visited.insert(child).second) {
        stack.emplace_back(child, 0);
      }
    } else {
      order.push_back(node);
      stack.pop_back();
    }
  }

  loss.node()->AccumulateGrad(Matrix::Ones(1, 1));
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    Node* node = *it;
    if (node->backward && node->grad.size() != 0) {
      node->backward(*node);
      // Interior gradients are not needed once propagated.
      node->grad.resize(0, 0);
    }
  }
}

namespace ops {

Var MatMul(const Var& a, const Var& b) {
  if (a.cols() != b.rows()) {
    throw std::invalid_argument("MatMul: inner dimensions differ " +
                                ShapeOf(a.value()) + " * " +
                                ShapeOf(b.value()));
  }
  Matrix out = a.value() * b.value();
  return MakeResult("MatMul", std::move(out), {&a, &b}, [](Node& self) {
    const Matrix& g = self.grad;
    Node& x = *self.inputs[0];
    Node& y = *self.inputs[1];
    if (Wants(self, 0)) x.AccumulateGrad(g * y.value.transpose());
    if (Wants(self, 1)) y.AccumulateGrad(x.value.transpose() * g);
  });
}

Var MatMulT(const Var& a, const Var& b) {
  if (a.cols() != b.cols()) {
    throw std::invalid_argument("MatMulT: column counts differ " +
                                ShapeOf(a.value()) + " vs " +
                                ShapeOf(b.value()));
  }
  Matrix out = a.value() * b.value().transpose();
  return MakeResult("MatMulT", std::move(out), {&a, &b}, [](Node& self) {
    const Matrix& g = self.grad;
    Node& x = *self.inputs[0];
    Node& y = *self.inputs[1];
    if (Wants(self, 0)) x.AccumulateGrad(g * y.value);
    if (Wants(self, 1)) y.AccumulateGrad(g.transpose() * x.value);
  });
}

Var Add(const Var& a, const Var& b) {
  RequireSameShape(a, b, "Add");
  return MakeResult("Add", a.value() + b.value(), {&a, &b}, [](Node& self) {
    if (Wants(self, 0)) self.inputs[0]->AccumulateGrad(self.grad);
    if (Wants(self, 1)) self.inputs[1]->AccumulateGrad(self.grad);
  });
}

Var Sub(const Var& a, const Var& b) {
  RequireSameShape(a, b, "Sub");
  return MakeResult("Sub", a.value() - b.value(), {&a, &b}, [](Node& self) {
    if (Wants(self, 0)) self.inputs[0]->AccumulateGrad(self.grad);
    if (Wants(self, 1)) self.inputs[1]->AccumulateGrad(-self.grad);
  });
}

Var Mul(const Var& a, const Var& b) {
  RequireSameShape(a, b, "Mul");
  Matrix out = a.value().cwiseProduct(b.value());
  return MakeResult("Mul", std::move(out), {&a, &b}, [](Node& self) {
    Node& x = *self.inputs[0];
    Node& y = *self.inputs[1];
    if (Wants(self, 0)) x.AccumulateGrad(self.grad.cwiseProduct(y.value));
    if (Wants(self, 1)) y.AccumulateGrad(self.grad.cwiseProduct(x.value));
  });
}

Var AddRow(const Var& a, const Var& row) {
  if (row.rows() != 1 || row.cols() != a.cols()) {
    throw std::invalid_argument("AddRow: expected 1x" +
                                std::to_string(a.cols()) + " row, got " +
                                ShapeOf(row.value()));
  }
  Matrix out = a.value();
  out.rowwise() += row.value().row(0);
  return MakeResult("AddRow", std::move(out), {&a, &row}, [](Node& self) {
    if (Wants(self, 0)) self.inputs[0]->AccumulateGrad(self.grad);
    if (Wants(self, 1)) {
      self.inputs[1]->AccumulateGrad(self.grad.colwise().sum());
    }
  });
}

Var Scale(const Var& a, double s) {
  return MakeResult("Scale", a.value() * s, {&a}, [s](Node& self) {
    self.inputs[0]->AccumulateGrad(self.grad * s);
  });
}

Var AddScalar(const Var& a, double s) {
  Matrix out = a.value().array() + s;
  return MakeResult("AddScalar", std::move(out), {&a}, [](Node& self) {
    self.inputs[0]->AccumulateGrad(self.grad);
  });
}

Var Relu(const Var& a) {
  Matrix out = a.value().cwiseMax(0.0);
  return MakeResult("Relu", std::move(out), {&a}, [](Node& self) {
    const Matrix& x = self.inputs[0]->value;
    Matrix g = (x.array() > 0.0).select(self.grad, 0.0);
    self.inputs[0]->AccumulateGrad(g);
  });
}

namespace {
constexpr double kGeluK = 0.7978845608028654;  // sqrt(2 / pi)
constexpr double kGeluC = 0.044715;
}  // namespace

Var Gelu(const Var& a) {
  Matrix out = a.value().unaryExpr([](double x) {
    return 0.5 * x * (1.0 + std::tanh(kGeluK * (x + kGeluC * x * x * x)));
  });
  return MakeResult("Gelu", std::move(out), {&a}, [](Node& self) {
    const Matrix& x = self.inputs[0]->value;
    Matrix d = x.unaryExpr([](double v) {
      const double t = std::tanh(kGeluK * (v + kGeluC * v * v * v));
      return 0.5 * (1.0 + t) +
             0.5 * v * (1.0 - t * t) * kGeluK * (1.0 + 3.0 * kGeluC * v * v);
    });
    self.inputs[0]->AccumulateGrad(self.grad.cwiseProduct(d));
  });
}

Var Sigmoid(const Var& a) {
  Matrix out = a.value().unaryExpr([](double x) {
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
  });
  return MakeResult("Sigmoid", std::move(out), {&a}, [](Node& self) {
    const Matrix& y = self.value;
    Matrix d = y.array() * (1.0 - y.array());
    self.inputs[0]->AccumulateGrad(self.grad.cwiseProduct(d));
  });
}

Var LayerNorm(const Var& x, const Var& gain, const Var& bias, double eps) {
  const int d = x.cols();
  if (gain.rows() != 1 || gain.cols() != d || bias.rows() != 1 ||
      bias.cols() != d) {
    throw std::invalid_argument("LayerNorm: gain/bias must be 1x" +
                                std::to_string(d));
  }
  const Matrix& in = x.value();
  Matrix xhat(in.rows(), d);
  Eigen::VectorXd inv_std(in.rows());
  for (Eigen::Index r = 0; r < in.rows(); ++r) {
    const double mu = in.row(r).mean();
    const double var = (in.row(r).array() - mu).square().mean();
    inv_std(r) = 1.0 / std::sqrt(var + eps);
    xhat.row(r) = (in.row(r).array() - mu) * inv_std(r);
  }
  Matrix out = xhat.array().rowwise() * gain.value().row(0).array();
  out.rowwise() += bias.value().row(0);
  return MakeResult(
      "LayerNorm", std::move(out), {&x, &gain, &bias},
      [xhat = std::move(xhat), inv_std = std::move(inv_std)](Node& self) {
        const Matrix& g = self.grad;
        if (Wants(self, 1)) {
          self.inputs[1]->AccumulateGrad(
              g.cwiseProduct(xhat).colwise().sum());
        }
        if (Wants(self, 2)) {
          self.inputs[2]->AccumulateGrad(g.colwise().sum());
        }
        if (Wants(self, 0)) {
          Matrix dxhat =
              g.array().rowwise() * self.inputs[1]->value.row(0).array();
          Matrix dx(g.rows(), g.cols());
          for (Eigen::Index r = 0; r < g.rows(); ++r) {
            const double m1 = dxhat.row(r).mean();
            const double m2 = dxhat.row(r).dot(xhat.row(r)) / g.cols();
            dx.row(r) = inv_std(r) * (dxhat.row(r).array() - m1 -
                                      xhat.row(r).array() * m2);
          }
          self.inputs[0]->AccumulateGrad(dx);
        }
      });
}

Var MaskedSoftmax(const Var& scores, const Mask* mask) {
  const Matrix& s = scores.value();
  if (mask != nullptr &&
      (mask->rows() != s.rows() || mask->cols() != s.cols())) {
    throw std::invalid_argument("MaskedSoftmax: mask " +
                                std::to_string(mask->rows()) + "x" +
                                std::to_string(mask->cols()) +
                                " does not match scores " + ShapeOf(s));
  }
  Matrix out = Matrix::Zero(s.rows(), s.cols());
  for (Eigen::Index r = 0; r < s.rows(); ++r) {
    double max_v = -std::numeric_limits<double>::infinity();
    bool any = false;
    for (Eigen::Index c = 0; c < s.cols(); ++c) {
      if (mask == nullptr || (*mask)(r, c)) {
        max_v = std::max(max_v, s(r, c));
        any = true;
      }
    }
    if (!any) {
      throw std::invalid_argument("MaskedSoftmax: query row " +
                                  std::to_string(r) +
                                  " has no allowed key");
    }
    double total = 0.0;
    for (Eigen::Index c = 0; c < s.cols(); ++c) {
      if (mask == nullptr || (*mask)(r, c)) {
        const double e = std::exp(s(r, c) - max_v);
        out(r, c) = e;
        total += e;
      }
    }
    out.row(r) /= total;
  }
  return MakeResult("MaskedSoftmax", std::move(out), {&scores},
                    [](Node& self) {
                      const Matrix& y = self.value;
                      Eigen::VectorXd dots =
                          self.grad.cwiseProduct(y).rowwise().sum();
                      Matrix dx = self.grad;
                      dx.colwise() -= dots;
                      self.inputs[0]->AccumulateGrad(dx.cwiseProduct(y));
                    });
}

Var SliceRows(const Var& a, int start, int count) {
  if (start < 0 || count < 0 || start + count > a.rows()) {
    throw std::out_of_range("SliceRows: [" + std::to_string(start) + ", " +
                            std::to_string(start + count) + ") outside " +
                            std::to_string(a.rows()) + " rows");
  }
  Matrix out = a.value().middleRows(start, count);
  return MakeResult("SliceRows", std::move(out), {&a},
                    [start, count](Node& self) {
                      Node& in = *self.inputs[0];
                      Matrix g = Matrix::Zero(in.value.rows(),
                                              in.value.cols());
                      g.middleRows(start, count) = self.grad;
                      in.AccumulateGrad(g);
                    });
}

Var SliceCols(const Var& a, int start, int count) {
  if (start < 0 || count < 0 || start + count > a.cols()) {
    throw std::out_of_range("SliceCols: [" + std::to_string(start) + ", " +
                            std::to_string(start + count) + ") outside " +
                            std::to_string(a.cols()) + " cols");
  }
  Matrix out = a.value().middleCols(start, count);
  return MakeResult("SliceCols", std::move(out), {&a},
                    [start, count](Node& self) {
                      Node& in = *self.inputs[0];
                      Matrix g = Matrix::Zero(in.value.rows(),
                                              in.value.cols());
                      g.middleCols(start, count) = self.grad;
                      in.AccumulateGrad(g);
                    });
}

Var ConcatRows(std::span<const Var> parts) {
  if (parts.empty()) throw std::invalid_argument("ConcatRows: no inputs");
  const int cols = parts[0].cols();
  int rows = 0;
  for (const Var& p : parts) {
    if (p.cols() != cols) {
      throw std::invalid_argument("ConcatRows: column mismatch");
    }
    rows += p.rows();
  }
  Matrix out(rows, cols);
  std::vector<int> offsets;
  int at = 0;
  for (const Var& p : parts) {
    offsets.push_back(at);
    out.middleRows(at, p.rows()) = p.value();
    at += p.rows();
  }
  return MakeResultN("ConcatRows", std::move(out), parts,
                     [offsets = std::move(offsets)](Node& self) {
                       for (size_t i = 0; i < self.inputs.size(); ++i) {
                         Node& in = *self.inputs[i];
                         if (!in.requires_grad) continue;
                         in.AccumulateGrad(self.grad.middleRows(
                             offsets[i], in.value.rows()));
                       }
                     });
}

Var ConcatCols(std::span<const Var> parts) {
  if (parts.empty()) throw std::invalid_argument("ConcatCols: no inputs");
  const int rows = parts[0].rows();
  int cols = 0;
  for (const Var& p : parts) {
    if (p.rows() != rows) {
      throw std::invalid_argument("ConcatCols: row mismatch");
    }
    cols += p.cols();
  }
  Matrix out(rows, cols);
  std::vector<int> offsets;
  int at = 0;
  for (const Var& p : parts) {
    offsets.push_back(at);
    out.middleCols(at, p.cols()) = p.value();
    at += p.cols();
  }
  return MakeResultN("ConcatCols", std::move(out), parts,
                     [offsets = std::move(offsets)](Node& self) {
                       for (size_t i = 0; i < self.inputs.size(); ++i) {
                         Node& in = *self.inputs[i];
                         if (!in.requires_grad) continue;
                         in.AccumulateGrad(self.grad.middleCols(
                             offsets[i], in.value.cols()));
                       }
                     });
}

Var GatherRows(const Var& table, std::span<const int> ids) {
  Matrix out(static_cast<Eigen::Index>(ids.size()), table.cols());
  for (size_t i = 0; i < ids.size(); ++i) {
    if (ids[i] < 0 || ids[i] >= table.rows()) {
      throw std::out_of_range("GatherRows: id " + std::to_string(ids[i]) +
                              " outside table of " +
                              std::to_string(table.rows()) + " rows");
    }
    out.row(static_cast<Eigen::Index>(i)) = table.value().row(ids[i]);
  }
  std::vector<int> saved(ids.begin(), ids.end());
  return MakeResult("GatherRows", std::move(out), {&table},
                    [saved = std::move(saved)](Node& self) {
                      Node& in = *self.inputs[0];
                      if (in.grad.size() == 0) {
                        in.grad = Matrix::Zero(in.value.rows(),
                                               in.value.cols());
                      }
                      for (size_t i = 0; i < saved.size(); ++i) {
                        in.grad.row(saved[i]) +=
                            self.grad.row(static_cast<Eigen::Index>(i));
                      }
                    });
}

Var MeanRows(const Var& a) {
  if (a.rows() == 0) throw std::invalid_argument("MeanRows: no rows");
  Matrix out = a.value().colwise().mean();
  return MakeResult("MeanRows", std::move(out), {&a}, [](Node& self) {
    Node& in = *self.inputs[0];
    const auto n = in.value.rows();
    Matrix g = self.grad.replicate(n, 1) / static_cast<double>(n);
    in.AccumulateGrad(g);
  });
}

Var Sum(const Var& a) {
  Matrix out(1, 1);
  out(0, 0) = a.value().sum();
  return MakeResult("Sum", std::move(out), {&a}, [](Node& self) {
    Node& in = *self.inputs[0];
    in.AccumulateGrad(
        Matrix::Constant(in.value.rows(), in.value.cols(), self.grad(0, 0)));
  });
}

Var Mean(const Var& a) {
  if (a.value().size() == 0) throw std::invalid_argument("Mean: empty");
  const double n = static_cast<double>(a.value().size());
  return Scale(Sum(a), 1.0 / n);
}

Var NormalizeRows(const Var& a) {
  Eigen::VectorXd norms = a.value().rowwise().norm();
  for (Eigen::Index r = 0; r < norms.size(); ++r) {
    if (norms(r) == 0.0) {
      throw std::invalid_argument("NormalizeRows: zero-norm row " +
                                  std::to_string(r));
    }
  }
  Matrix out = a.value().array().colwise() / norms.array();
  return MakeResult("NormalizeRows", std::move(out), {&a},
                    [norms = std::move(norms)](Node& self) {
                      const Matrix& y = self.value;
                      Eigen::VectorXd dots =
                          self.grad.cwiseProduct(y).rowwise().sum();
                      Matrix dx = self.grad - (y.array().colwise() *
                                               dots.array()).matrix();
                      dx.array().colwise() /= norms.array();
                      self.inputs[0]->AccumulateGrad(dx);
                    });
}

Var RowDot(const Var& a, const Var& b) {
  RequireSameShape(a, b, "RowDot");
  Matrix out = a.value().cwiseProduct(b.value()).rowwise().sum();
  return MakeResult("RowDot", std::move(out), {&a, &b}, [](Node& self) {
    Node& x = *self.inputs[0];
    Node& y = *self.inputs[1];
    if (Wants(self, 0)) {
      x.AccumulateGrad(y.value.array().colwise() *
                       self.grad.col(0).array());
    }
    if (Wants(self, 1)) {
      y.AccumulateGrad(x.value.array().colwise() *
                       self.grad.col(0).array());
    }
  });
}

Var CrossEntropy(const Var& logits, std::span<const int> targets) {
  const Matrix& z = logits.value();
  if (static_cast<size_t>(z.rows()) != targets.size() || targets.empty()) {
    throw std::invalid_argument("CrossEntropy: " +
                                std::to_string(targets.size()) +
                                " targets for " + ShapeOf(z) + " logits");
  }
  Matrix probs(z.rows(), z.cols());
  double total = 0.0;
  for (Eigen::Index r = 0; r < z.rows(); ++r) {
    const int t = targets[static_cast<size_t>(r)];
    if (t < 0 || t >= z.cols()) {
      throw std::out_of_range("CrossEntropy: target id " + std::to_string(t));
    }
    const double m = z.row(r).maxCoeff();
    probs.row(r) = (z.row(r).array() - m).exp();
    const double s = probs.row(r).sum();
    probs.row(r) /= s;
    total += (std::log(s) + m) - z(r, t);
  }
  const double n = static_cast<double>(targets.size());
  Matrix out(1, 1);
  out(0, 0) = total / n;
  std::vector<int> saved(targets.begin(), targets.end());
  return MakeResult("CrossEntropy", std::move(out), {&logits},
                    [probs = std::move(probs), saved = std::move(saved),
                     n](Node& self) {
                      Matrix g = probs;
                      for (size_t r = 0; r < saved.size(); ++r) {
                        g(static_cast<Eigen::Index>(r), saved[r]) -= 1.0;
                      }
                      self.inputs[0]->AccumulateGrad(g *
                                                     (self.grad(0, 0) / n));
                    });
}

Var BceWithLogits(const Var& logit, double target) {
  if (logit.rows() != 1 || logit.cols() != 1) {
    throw std::invalid_argument("BceWithLogits: logit must be 1x1");
  }
  const double z = logit.scalar();
  Matrix out(1, 1);
  out(0, 0) = std::max(z, 0.0) - z * target + std::log1p(std::exp(-std::abs(z)));
  return MakeResult("BceWithLogits", std::move(out), {&logit},
                    [z, target](Node& self) {
                      const double s = z >= 0.0
                                           ? 1.0 / (1.0 + std::exp(-z))
                                           : std::exp(z) / (1.0 + std::exp(z));
                      Matrix g(1, 1);
                      g(0, 0) = (s - target) * self.grad(0, 0);
                      self.inputs[0]->AccumulateGrad(g);
                    });
}

}  // namespace ops
}  // namespace nedict::numerics
