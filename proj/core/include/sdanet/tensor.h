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

#ifndef SDANET_TENSOR_H_
#define SDANET_TENSOR_H_

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace sdanet {

using Shape = std::vector<std::size_t>;

std::size_t shape_numel(const Shape& shape);
std::string shape_string(const Shape& shape);

class Tensor;

namespace detail {

struct TensorImpl;

// Backward closure of one recorded operation. `apply` receives the gradient
// of the operation's output and accumulates into the inputs it captured.
struct GradFn {
  const char* name = "";
  std::vector<std::shared_ptr<TensorImpl>> inputs;
  std::function<void(std::span<const double>)> apply;
};

struct TensorImpl {
  Shape shape;
  std::vector<double> data;
  std::vector<double> grad;  // empty until the first accumulation
  bool requires_grad = false;
  bool consumed = false;     // set once backward() has run through this node
  std::shared_ptr<GradFn> grad_fn;
};

}  // namespace detail

// Dense row-major float64 array with an optional gradient buffer.
//
// Tensor is a handle: copies share storage and gradient. Operations in ops.h
// produce fresh tensors and, when any input requires grad and recording is
// enabled, attach a backward closure so that backward() can propagate.
class Tensor {
 public:
  Tensor();
  explicit Tensor(Shape shape, double fill = 0.0);
  Tensor(Shape shape, std::vector<double> values);

  static Tensor scalar(double value);

  const Shape& shape() const { return impl_->shape; }
  std::size_t rank() const { return impl_->shape.size(); }
  std::size_t dim(std::size_t axis) const;
  std::size_t numel() const { return impl_->data.size(); }

  std::span<double> data() { return impl_->data; }
  std::span<const double> data() const { return impl_->data; }
  double item() const;

  // Flat element access with row-major index arithmetic on up to 4 axes.
  double& at(std::size_t i0, std::size_t i1, std::size_t i2, std::size_t i3);
  double at(std::size_t i0, std::size_t i1, std::size_t i2, std::size_t i3) const;

  bool requires_grad() const { return impl_->requires_grad; }
  Tensor& set_requires_grad(bool on);
  bool is_leaf() const { return impl_->grad_fn == nullptr; }
  bool has_grad() const { return !impl_->grad.empty(); }

  // Gradient view; zero-length when nothing has been accumulated yet.
  std::span<const double> grad() const { return impl_->grad; }
  std::span<double> mutable_grad();
  void zero_grad();

  // New leaf tensor holding a copy of the values and no history.
  Tensor detach() const;
  Tensor clone() const { return detach(); }

  bool same_storage(const Tensor& other) const { return impl_ == other.impl_; }

  // Internal: used by op implementations and the backward engine.
  const std::shared_ptr<detail::TensorImpl>& impl() const { return impl_; }
  explicit Tensor(std::shared_ptr<detail::TensorImpl> impl);

 private:
  std::shared_ptr<detail::TensorImpl> impl_;
};

// Runs reverse-mode differentiation from a single-element tensor. Leaf
// tensors that require grad accumulate d(loss)/d(leaf); intermediate nodes are
// released and cannot be traversed again.
void backward(const Tensor& scalar_loss);

bool grad_enabled();

// Disables operation recording on the current thread for its lifetime.
class NoGradGuard {
 public:
  NoGradGuard();
  ~NoGradGuard();
  NoGradGuard(const NoGradGuard&) = delete;
  NoGradGuard& operator=(const NoGradGuard&) = delete;

 private:
  bool previous_;
};

namespace detail {

// Builds an op result. When recording is on and some input requires grad,
// the result requires grad and owns `apply` as its backward closure.
Tensor make_result(const char* name, Shape shape, std::vector<double> values,
                   std::initializer_list<Tensor> inputs,
                   std::function<void(std::span<const double>)> apply);
Tensor make_result(const char* name, Shape shape, std::vector<double> values,
                   const std::vector<Tensor>& inputs,
                   std::function<void(std::span<const double>)> apply);

// Gradient buffer of `t` (allocated on first use), or an empty span when `t`
// does not participate in differentiation.
std::span<double> grad_sink(const Tensor& t);

}  // namespace detail

}  // namespace sdanet

#endif  // SDANET_TENSOR_H_
