/* Copyright 2026 The SDANet Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include "sdanet/tensor.h"

#include <algorithm>
#include <functional>
#include <numeric>
#include <sstream>
#include <unordered_set>
#include <utility>

#include "sdanet/errors.h"

namespace sdanet {

namespace {
thread_local bool g_grad_enabled = true;
}  // namespace

std::size_t shape_numel(const Shape& shape) {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1},
                         std::multiplies<>());
}

std::string shape_string(const Shape& shape) {
  std::ostringstream os;
  os << '(';
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) os << ", ";
    os << shape[i];
  }
  os << ')';
  return os.str();
}

Tensor::Tensor() : impl_(std::make_shared<detail::TensorImpl>()) {
  impl_->data.assign(1, 0.0);
}

Tensor::Tensor(Shape shape, double fill)
    : impl_(std::make_shared<detail::TensorImpl>()) {
  impl_->data.assign(shape_numel(shape), fill);
  impl_->shape = std::move(shape);
}

Tensor::Tensor(Shape shape, std::vector<double> values)
    : impl_(std::make_shared<detail::TensorImpl>()) {
  if (shape_numel(shape) != values.size()) {
    throw DimensionError("tensor shape " + shape_string(shape) + " holds " +
                         std::to_string(shape_numel(shape)) +
                         " elements but " + std::to_string(values.size()) +
                         " values were given");
  }
  impl_->shape = std::move(shape);
  impl_->data = std::move(values);
}

Tensor::Tensor(std::shared_ptr<detail::TensorImpl> impl)
    : impl_(std::move(impl)) {}

Tensor Tensor::scalar(double value) { return Tensor(Shape{}, {value}); }

std::size_t Tensor::dim(std::size_t axis) const {
  if (axis >= rank()) {
    throw DimensionError("axis " + std::to_string(axis) +
                         " out of range for shape " + shape_string(shape()));
  }
  return impl_->shape[axis];
}

double Tensor::item() const {
  if (numel() != 1) {
    throw ContractError("item() on tensor of shape " + shape_string(shape()));
  }
  return impl_->data[0];
}

double& Tensor::at(std::size_t i0, std::size_t i1, std::size_t i2,
                   std::size_t i3) {
  const Shape& s = impl_->shape;
  return impl_->data[((i0 * s[1] + i1) * s[2] + i2) * s[3] + i3];
}

double Tensor::at(std::size_t i0, std::size_t i1, std::size_t i2,
                  std::size_t i3) const {
  const Shape& s = impl_->shape;
  return impl_->data[((i0 * s[1] + i1) * s[2] + i2) * s[3] + i3];
}

Tensor& Tensor::set_requires_grad(bool on) {
  if (!is_leaf()) {
    throw ContractError("requires_grad can only be toggled on leaf tensors");
  }
  impl_->requires_grad = on;
  return *this;
}

std::span<double> Tensor::mutable_grad() {
  if (impl_->grad.empty()) impl_->grad.assign(numel(), 0.0);
  return impl_->grad;
}

void Tensor::zero_grad() {
  std::fill(impl_->grad.begin(), impl_->grad.end(), 0.0);
}

Tensor Tensor::detach() const { return Tensor(impl_->shape, impl_->data); }

bool grad_enabled() { return g_grad_enabled; }

NoGradGuard::NoGradGuard() : previous_(g_grad_enabled) {
  g_grad_enabled = false;
}

NoGradGuard::~NoGradGuard() { g_grad_enabled = previous_; }

namespace detail {

namespace {

template <typename Range>
Tensor make_result_impl(const char* name, Shape shape,
                        std::vector<double> values, const Range& inputs,
                        std::function<void(std::span<const double>)> apply) {
  Tensor out(std::move(shape), std::move(values));
  if (!g_grad_enabled) return out;
  bool any = false;
  for (const Tensor& t : inputs) any = any || t.requires_grad();
  if (!any) return out;
  auto fn = std::make_shared<GradFn>();
  fn->name = name;
  for (const Tensor& t : inputs) {
    if (t.requires_grad()) fn->inputs.push_back(t.impl());
  }
  fn->apply = std::move(apply);
  out.impl()->requires_grad = true;
  out.impl()->grad_fn = std::move(fn);
  return out;
}

}  // namespace

Tensor make_result(const char* name, Shape shape, std::vector<double> values,
                   std::initializer_list<Tensor> inputs,
                   std::function<void(std::span<const double>)> apply) {
  return make_result_impl(name, std::move(shape), std::move(values), inputs,
                          std::move(apply));
}

Tensor make_result(const char* name, Shape shape, std::vector<double> values,
                   const std::vector<Tensor>& inputs,
                   std::function<void(std::span<const double>)> apply) {
  return make_result_impl(name, std::move(shape), std::move(values), inputs,
                          std::move(apply));
}

std::span<double> grad_sink(const Tensor& t) {
  TensorImpl& impl = *t.impl();
  if (!impl.requires_grad) return {};
  if (impl.grad.empty()) impl.grad.assign(impl.data.size(), 0.0);
  return impl.grad;
}

}  // namespace detail

void backward(const Tensor& scalar_loss) {
  using detail::TensorImpl;
  TensorImpl* root = scalar_loss.impl().get();
  if (root->data.size() != 1) {
    throw ContractError("backward() needs a single-element loss, got shape " +
                        shape_string(root->shape));
  }
  if (root->consumed) {
    throw LifecycleError(
        "backward() called twice through the same computation record");
  }
  if (!root->requires_grad) {
    throw ContractError("loss does not depend on any tensor requiring grad");
  }

  // Iterative post-order DFS; reversed, it is a valid processing order.
  // Shared ownership keeps nodes alive while their parents are released.
  std::vector<std::shared_ptr<TensorImpl>> order;
  std::unordered_set<TensorImpl*> visited;
  std::vector<std::pair<std::shared_ptr<TensorImpl>, std::size_t>> stack;
  stack.emplace_back(scalar_loss.impl(), 0);
  visited.insert(root);
  while (!stack.empty()) {
    auto& [node, next] = stack.back();
    if (node->grad_fn && next < node->grad_fn->inputs.size()) {
      std::shared_ptr<TensorImpl> child = node->grad_fn->inputs[next++];
      if (child->consumed) {
        throw LifecycleError(
            "backward() reached a node released by an earlier backward()");
      }
      if (visited.insert(child.get()).second) stack.emplace_back(child, 0);
      continue;
    }
    order.push_back(node);
    stack.pop_back();
  }

  if (root->grad.empty()) root->grad.assign(1, 0.0);
  root->grad[0] += 1.0;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    TensorImpl* node = it->get();
    if (!node->grad_fn) continue;  // leaf: keep accumulated gradient
    if (node->grad.empty()) node->grad.assign(node->data.size(), 0.0);
    node->grad_fn->apply(node->grad);
    node->grad_fn.reset();
    node->consumed = true;
    std::vector<double>().swap(node->grad);
  }
}

}  // namespace sdanet
