// Copyright 2026 The wolonet Authors
// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <functional>
#include <initializer_list>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace wolonet {

using Shape = std::vector<int64_t>;

int64_t shape_numel(const Shape& shape);
std::string shape_str(const Shape& shape);

// Raised by every op whose operands have incompatible shapes. Carries the op
// name and the offending shapes so callers can report them.
class ShapeError : public std::invalid_argument {
 public:
  ShapeError(std::string op, std::vector<Shape> shapes, const std::string& detail = {});

  const std::string& op() const { return op_; }
  const std::vector<Shape>& shapes() const { return shapes_; }

 private:
  std::string op_;
  std::vector<Shape> shapes_;
};

// Invalid argument values: non-finite input where the op forbids it, even
// kernel sizes, unknown modes and so on.
class ValueError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Malformed or unsupported files: WAV, MEL1, checkpoints, configs.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

struct Node {
  Shape shape;
  std::shared_ptr<std::vector<double>> data;
  std::vector<double> grad;  // empty until something accumulates into it
  bool requires_grad = false;
  const char* op = "leaf";
  std::vector<std::shared_ptr<Node>> parents;
  std::function<void(Node&)> backward;

  // Zero-initialised gradient buffer, allocated on first use.
  double* grad_buffer();
  bool is_leaf() const { return !backward; }
};

}  // namespace detail

// Dense row-major float64 array. Copies share storage and graph node; use
// clone() for an independent copy.
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(Shape shape, double fill = 0.0);
  Tensor(Shape shape, std::vector<double> values);

  static Tensor scalar(double value);

  bool defined() const { return node_ != nullptr; }
  const Shape& shape() const;
  int64_t rank() const { return static_cast<int64_t>(shape().size()); }
  int64_t dim(int64_t axis) const;
  int64_t numel() const;

  std::span<const double> data() const;
  // In-place access for optimizers and finite-difference probes. Any graph
  // already built on top of this tensor sees the new values.
  std::span<double> mutable_data();
  double item() const;
  double at(std::initializer_list<int64_t> index) const;

  bool requires_grad() const;
  Tensor& set_requires_grad(bool flag);

  bool has_grad() const;
  // Accumulated gradient; empty span when nothing has been accumulated.
  std::span<const double> grad() const;
  void zero_grad();

  // Reverse-mode sweep from this tensor. Scalar roots are seeded with 1.
  void backward() const;
  void backward(std::span<const double> seed) const;

  Tensor detach() const;
  Tensor clone() const;

  detail::Node* node() const { return node_.get(); }
  const std::shared_ptr<detail::Node>& node_ptr() const { return node_; }
  explicit Tensor(std::shared_ptr<detail::Node> node) : node_(std::move(node)) {}

 private:
  std::shared_ptr<detail::Node> node_;
};

// Nodes reachable from a root, in topological order (inputs before users).
// backward() walks it in reverse, visiting each node once.
class Tape {
 public:
  explicit Tape(const Tensor& root);

  const std::vector<detail::Node*>& nodes() const { return order_; }
  size_t size() const { return order_.size(); }
  void run_backward(std::span<const double> seed);

 private:
  std::shared_ptr<detail::Node> root_;
  std::vector<detail::Node*> order_;
};

// Counts multiply-add pairs and additions executed by instrumented ops on the
// current thread while the scope is alive. Scopes nest; the innermost wins.
class OpCountScope {
 public:
  OpCountScope();
  ~OpCountScope();
  OpCountScope(const OpCountScope&) = delete;
  OpCountScope& operator=(const OpCountScope&) = delete;

  int64_t count() const { return count_; }

 private:
  friend void count_ops(int64_t n);
  int64_t count_ = 0;
  OpCountScope* previous_;
};

void count_ops(int64_t n);
bool op_counting_active();

// While alive, ops on the current thread record nothing for backward.
class NoGradGuard {
 public:
  NoGradGuard();
  ~NoGradGuard();
  NoGradGuard(const NoGradGuard&) = delete;
  NoGradGuard& operator=(const NoGradGuard&) = delete;

 private:
  bool previous_;
};

bool grad_enabled();

}  // namespace wolonet
