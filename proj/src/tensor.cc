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

#include "wolonet/tensor.h"

#include <algorithm>
#include <sstream>
#include <unordered_set>

#include "autograd.h"

namespace wolonet {

int64_t shape_numel(const Shape& shape) {
  int64_t n = 1;
  for (int64_t d : shape) n *= d;
  return n;
}

std::string shape_str(const Shape& shape) {
  std::ostringstream os;
  os << '(';
  for (size_t i = 0; i < shape.size(); ++i) {
    if (i) os << ", ";
    os << shape[i];
  }
  os << ')';
  return os.str();
}

namespace {

std::string shape_error_message(const std::string& op, const std::vector<Shape>& shapes,
                                const std::string& detail) {
  std::ostringstream os;
  os << op << ": incompatible shapes";
  for (const auto& s : shapes) os << ' ' << shape_str(s);
  if (!detail.empty()) os << " (" << detail << ')';
  return os.str();
}

}  // namespace

ShapeError::ShapeError(std::string op, std::vector<Shape> shapes, const std::string& detail)
    : std::invalid_argument(shape_error_message(op, shapes, detail)),
      op_(std::move(op)),
      shapes_(std::move(shapes)) {}

namespace detail {

double* Node::grad_buffer() {
  if (grad.empty()) grad.assign(data->size(), 0.0);
  return grad.data();
}

Tensor make_result(const char* op, Shape shape, std::vector<double> data,
                   const std::vector<Tensor>& inputs, BackwardFn backward) {
  auto node = std::make_shared<Node>();
  node->shape = std::move(shape);
  node->data = std::make_shared<std::vector<double>>(std::move(data));
  node->op = op;
  bool needs = grad_enabled() &&
               std::any_of(inputs.begin(), inputs.end(),
                           [](const Tensor& t) { return t.defined() && t.requires_grad(); });
  if (needs) {
    node->requires_grad = true;
    node->parents.reserve(inputs.size());
    for (const auto& t : inputs) node->parents.push_back(t.node_ptr());
    node->backward = std::move(backward);
  }
  return Tensor(std::move(node));
}

Tensor make_view(const char* op, const Tensor& source, Shape shape, BackwardFn backward) {
  auto node = std::make_shared<Node>();
  node->shape = std::move(shape);
  node->data = source.node_ptr()->data;
  node->op = op;
  if (grad_enabled() && source.requires_grad()) {
    node->requires_grad = true;
    node->parents.push_back(source.node_ptr());
    node->backward = std::move(backward);
  }
  return Tensor(std::move(node));
}

}  // namespace detail

Tensor::Tensor(Shape shape, double fill) {
  for (int64_t d : shape)
    if (d < 0) throw ShapeError("Tensor", {shape}, "negative dimension");
  node_ = std::make_shared<detail::Node>();
  node_->data = std::make_shared<std::vector<double>>(shape_numel(shape), fill);
  node_->shape = std::move(shape);
}

Tensor::Tensor(Shape shape, std::vector<double> values) {
  if (shape_numel(shape) != static_cast<int64_t>(values.size()))
    throw ShapeError("Tensor", {shape, Shape{static_cast<int64_t>(values.size())}},
                     "element count does not match shape");
  node_ = std::make_shared<detail::Node>();
  node_->data = std::make_shared<std::vector<double>>(std::move(values));
  node_->shape = std::move(shape);
}

Tensor Tensor::scalar(double value) { return Tensor(Shape{}, std::vector<double>{value}); }

const Shape& Tensor::shape() const {
  static const Shape kEmpty;
  return node_ ? node_->shape : kEmpty;
}

int64_t Tensor::dim(int64_t axis) const {
  int64_t r = rank();
  if (axis < 0) axis += r;
  if (axis < 0 || axis >= r) throw ShapeError("dim", {shape()}, "axis out of range");
  return shape()[axis];
}

int64_t Tensor::numel() const { return node_ ? static_cast<int64_t>(node_->data->size()) : 0; }

std::span<const double> Tensor::data() const {
  if (!node_) return {};
  return {node_->data->data(), node_->data->size()};
}

std::span<double> Tensor::mutable_data() {
  if (!node_) return {};
  return {node_->data->data(), node_->data->size()};
}

double Tensor::item() const {
  if (numel() != 1) throw ShapeError("item", {shape()}, "expected a single element");
  return (*node_->data)[0];
}

double Tensor::at(std::initializer_list<int64_t> index) const {
  const Shape& s = shape();
  if (index.size() != s.size()) throw ShapeError("at", {s}, "index rank mismatch");
  int64_t flat = 0;
  size_t i = 0;
  for (int64_t ix : index) {
    if (ix < 0 || ix >= s[i]) throw ShapeError("at", {s}, "index out of range");
    flat = flat * s[i] + ix;
    ++i;
  }
  return (*node_->data)[flat];
}

bool Tensor::requires_grad() const { return node_ && node_->requires_grad; }

Tensor& Tensor::set_requires_grad(bool flag) {
  if (!node_->is_leaf())
    throw ValueError("set_requires_grad: only leaf tensors can change requires_grad");
  node_->requires_grad = flag;
  return *this;
}

bool Tensor::has_grad() const { return node_ && !node_->grad.empty(); }

std::span<const double> Tensor::grad() const {
  if (!node_) return {};
  return {node_->grad.data(), node_->grad.size()};
}

void Tensor::zero_grad() {
  if (node_) node_->grad.clear();
}

void Tensor::backward() const {
  if (numel() != 1) throw ShapeError("backward", {shape()}, "implicit seed needs a scalar root");
  const double one = 1.0;
  backward(std::span<const double>(&one, 1));
}

void Tensor::backward(std::span<const double> seed) const {
  if (static_cast<int64_t>(seed.size()) != numel())
    throw ShapeError("backward", {shape(), Shape{static_cast<int64_t>(seed.size())}},
                     "seed size mismatch");
  if (!requires_grad()) return;
  Tape(*this).run_backward(seed);
}

Tensor Tensor::detach() const {
  auto node = std::make_shared<detail::Node>();
  node->shape = node_->shape;
  node->data = node_->data;
  return Tensor(std::move(node));
}

Tensor Tensor::clone() const {
  return Tensor(node_->shape, std::vector<double>(node_->data->begin(), node_->data->end()));
}

Tape::Tape(const Tensor& root) : root_(root.node_ptr()) {
  if (!root_ || !root_->requires_grad) return;
  // Iterative post-order DFS; a node is emitted after all of its parents.
  std::unordered_set<detail::Node*> seen;
  std::vector<std::pair<detail::Node*, size_t>> stack;
  stack.emplace_back(root_.get(), 0);
  seen.insert(root_.get());
  while (!stack.empty()) {
    auto& [node, next] = stack.back();
    if (next < node->parents.size()) {
      detail::Node* p = node->parents[next++].get();
      if (p && p->requires_grad && !seen.count(p)) {
        seen.insert(p);
        stack.emplace_back(p, 0);
      }
    } else {
      order_.push_back(node);
      stack.pop_back();
    }
  }
}

void Tape::run_backward(std::span<const double> seed) {
  if (order_.empty()) return;
  double* g = root_->grad_buffer();
  for (size_t i = 0; i < seed.size(); ++i) g[i] += seed[i];
  for (auto it = order_.rbegin(); it != order_.rend(); ++it) {
    detail::Node* node = *it;
    if (node->is_leaf() || node->grad.empty()) continue;
    node->backward(*node);
    // Interior gradients are consumed once; dropping them keeps repeated
    // sweeps over shared subgraphs from double counting.
    std::vector<double>().swap(node->grad);
  }
}

namespace {
thread_local OpCountScope* g_active_counter = nullptr;
thread_local bool g_grad_enabled = true;
}  // namespace

NoGradGuard::NoGradGuard() : previous_(g_grad_enabled) { g_grad_enabled = false; }
NoGradGuard::~NoGradGuard() { g_grad_enabled = previous_; }
bool grad_enabled() { return g_grad_enabled; }

OpCountScope::OpCountScope() : previous_(g_active_counter) { g_active_counter = this; }
OpCountScope::~OpCountScope() { g_active_counter = previous_; }

void count_ops(int64_t n) {
  if (g_active_counter) g_active_counter->count_ += n;
}

bool op_counting_active() { return g_active_counter != nullptr; }

}  // namespace wolonet
