// Copyright 2026 The ffsing Authors
// SPDX-License-Identifier: Apache-2.0

#include "ffsing/numerics/tensor.hpp"

#include <algorithm>
#include <unordered_set>
#include <utility>

#include "ffsing/error.hpp"

namespace ffsing::num {

namespace {
thread_local bool g_grad_enabled = true;
}

std::size_t element_count(const Shape& shape) {
  std::size_t n = 1;
  for (std::size_t d : shape) {
    n *= d;
  }
  return n;
}

std::string to_string(const Shape& shape) {
  std::string out = "[";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i > 0) {
      out += "x";
    }
    out += std::to_string(shape[i]);
  }
  return out + "]";
}

Tensor::Tensor(Shape shape, std::vector<double> values, bool requires_grad) {
  if (element_count(shape) != values.size()) {
    throw ShapeMismatch("tensor: shape " + to_string(shape) + " holds " +
                        std::to_string(element_count(shape)) + " values, got " +
                        std::to_string(values.size()));
  }
  for (std::size_t d : shape) {
    if (d == 0) {
      throw ShapeMismatch("tensor: zero extent in shape " + to_string(shape));
    }
  }
  node_ = std::make_shared<detail::Node>();
  node_->shape = std::move(shape);
  node_->value = std::move(values);
  node_->requires_grad = requires_grad;
}

Tensor Tensor::zeros(Shape shape, bool requires_grad) {
  const std::size_t n = element_count(shape);
  return Tensor(std::move(shape), std::vector<double>(n, 0.0), requires_grad);
}

Tensor Tensor::filled(Shape shape, double value, bool requires_grad) {
  const std::size_t n = element_count(shape);
  return Tensor(std::move(shape), std::vector<double>(n, value), requires_grad);
}

Tensor Tensor::scalar(double value, bool requires_grad) {
  return Tensor({1}, {value}, requires_grad);
}

const Shape& Tensor::shape() const {
  return node_->shape;
}

std::size_t Tensor::rows() const {
  return node_->shape.at(0);
}

std::size_t Tensor::cols() const {
  if (node_->shape.size() != 2) {
    throw ShapeMismatch("cols: expected rank 2, got " + to_string(node_->shape));
  }
  return node_->shape[1];
}

double Tensor::at(std::size_t r, std::size_t c) const {
  return node_->value[r * cols() + c];
}

double Tensor::item() const {
  if (size() != 1) {
    throw ShapeMismatch("item: tensor of shape " + to_string(shape()) + " is not a scalar");
  }
  return node_->value[0];
}

void Tensor::zero_grad() {
  if (node_ && !node_->grad.empty()) {
    std::fill(node_->grad.begin(), node_->grad.end(), 0.0);
  }
}

void Tensor::backward() const {
  if (size() != 1) {
    throw ShapeMismatch("backward: root must hold a single element, got " +
                        to_string(shape()));
  }
  if (!node_->requires_grad) {
    return;
  }

  // Iterative post-order DFS gives a topological order (parents first).
  std::vector<detail::Node*> order;
  std::unordered_set<detail::Node*> seen;
  std::vector<std::pair<detail::Node*, std::size_t>> stack;
  stack.emplace_back(node_.get(), 0);
  seen.insert(node_.get());
  while (!stack.empty()) {
    auto& [node, next] = stack.back();
    if (next < node->parents.size()) {
      detail::Node* parent = node->parents[next++].get();
      if (parent->requires_grad && seen.insert(parent).second) {
        stack.emplace_back(parent, 0);
      }
      continue;
    }
    order.push_back(node);
    stack.pop_back();
  }

  for (detail::Node* node : order) {
    const bool leaf = !node->backward;
    if (!leaf || node->grad.size() != node->value.size()) {
      node->grad.assign(node->value.size(), 0.0);
    }
  }
  node_->grad[0] += 1.0;

  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    if ((*it)->backward) {
      (*it)->backward(**it);
    }
  }
}

Tensor Tensor::detached() const {
  return Tensor(shape(), node_->value, false);
}

Tensor Tensor::from_node(std::shared_ptr<detail::Node> node) {
  Tensor t;
  t.node_ = std::move(node);
  return t;
}

bool grad_enabled() noexcept {
  return g_grad_enabled;
}

NoGradGuard::NoGradGuard() : previous_(g_grad_enabled) {
  g_grad_enabled = false;
}

NoGradGuard::~NoGradGuard() {
  g_grad_enabled = previous_;
}

}  // namespace ffsing::num
