//
// Copyright 2026 The HCGR Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#ifndef HCGR_AUTODIFF_HPP_
#define HCGR_AUTODIFF_HPP_

// Reverse-mode differentiation over 2-D tensors.
//
// A Tape records every primitive applied to Vars created from it. Calling
// backward() on a 1x1 result walks the tape once in reverse and returns the
// gradient for every parameter registered on the tape. Binary elementwise ops
// require equal shapes; the only broadcasts are the explicit *_row, *_scalar
// and scale_rows ops.
//
// Every forward value is checked for NaN/Inf; a failure throws NumericError
// naming the primitive.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <vector>

#include "hcgr/tensor.hpp"

namespace hcgr::ad {

using ParamId = std::size_t;

class Tape;

class Var {
 public:
  Var() = default;

  const Tensor& value() const;
  std::size_t rows() const { return value().rows(); }
  std::size_t cols() const { return value().cols(); }
  bool requires_grad() const;
  Tape* tape() const { return tape_; }
  std::uint32_t id() const { return id_; }
  bool valid() const { return tape_ != nullptr; }

 private:
  friend class Tape;
  Var(Tape* tape, std::uint32_t id) : tape_(tape), id_(id) {}

  Tape* tape_ = nullptr;
  std::uint32_t id_ = 0;
};

// Parameter id -> gradient. Parameters never reached by the loss hold zeros.
class Gradients {
 public:
  const Tensor& at(ParamId id) const;
  bool contains(ParamId id) const { return grads_.count(id) != 0; }
  const std::map<ParamId, Tensor>& all() const { return grads_; }
  std::map<ParamId, Tensor>& all() { return grads_; }

 private:
  friend class Tape;
  std::map<ParamId, Tensor> grads_;
};

class Tape {
 public:
  // Receives the tape, the id of the node being differentiated and its adjoint.
  using BackwardFn = std::function<void(Tape&, std::uint32_t self, const Tensor& grad_out)>;

  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  Var constant(Tensor value);
  Var variable(Tensor value);
  // References `value` without copying; it must outlive the tape.
  Var parameter(ParamId id, const Tensor& value);

  Gradients backward(const Var& loss);
  // Adjoint of any node after backward(); empty tensor if never reached.
  const Tensor& adjoint(const Var& v) const;

  std::size_t size() const { return nodes_.size(); }

  // Used by primitives.
  Var record(const char* op, Tensor value, std::initializer_list<Var> inputs, BackwardFn backward);
  const Tensor& value(std::uint32_t id) const;
  bool requires_grad(std::uint32_t id) const { return nodes_[id].requires_grad; }
  // Adds g into the adjoint of `id` when that node requires grad.
  void accumulate(std::uint32_t id, const Tensor& g);
  // Mutable adjoint buffer for scattered accumulation (lazily zero-filled).
  Tensor* grad_buffer(std::uint32_t id);

 private:
  struct Node {
    Tensor value;
    const Tensor* external = nullptr;
    bool requires_grad = false;
    std::int64_t param = -1;
    BackwardFn backward;
  };

  std::vector<Node> nodes_;
  std::vector<Tensor> adjoints_;
};

// Elementwise, equal shapes.
Var add(const Var& a, const Var& b);
Var sub(const Var& a, const Var& b);
Var mul(const Var& a, const Var& b);
Var div(const Var& a, const Var& b);
// Constant factor / offset.
Var scale(const Var& a, double s);
Var add_const(const Var& a, double c);
// Explicit broadcasts.
Var mul_scalar(const Var& a, const Var& s);   // s is 1x1
Var add_scalar(const Var& a, const Var& s);   // s is 1x1
Var add_row(const Var& a, const Var& r);      // r is 1 x cols
Var mul_row(const Var& a, const Var& r);      // r is 1 x cols
Var scale_rows(const Var& a, const Var& c);   // c is rows x 1

Var matmul(const Var& a, const Var& b);
// a * b^T without materialising the transpose.
Var matmul_bt(const Var& a, const Var& b);
Var transpose(const Var& a);
Var reshape(const Var& a, std::size_t rows, std::size_t cols);
Var concat_cols(const Var& a, const Var& b);
Var slice_cols(const Var& a, std::size_t start, std::size_t count);
Var slice_rows(const Var& a, std::size_t start, std::size_t count);
Var gather_rows(const Var& a, std::span<const std::size_t> index);
// out[index[i]] += a[i]; out has `rows` rows.
Var scatter_add_rows(const Var& a, std::span<const std::size_t> index, std::size_t rows);

Var sum(const Var& a);
Var row_sum(const Var& a);
Var softmax_rows(const Var& a);

Var exp(const Var& a);
Var log(const Var& a);
Var sqrt(const Var& a);
Var cosh(const Var& a);
Var sinh(const Var& a);
// arcosh(max(u, 1)); gradient 1/sqrt(u^2 - 1) with u >= 1 + 1e-12, zero where clamped.
Var arcosh(const Var& a);
Var clamp(const Var& a, double lo, double hi);
Var relu(const Var& a);
Var leaky_relu(const Var& a, double slope);
Var tanh(const Var& a);
Var sigmoid(const Var& a);
Var softplus(const Var& a);

// Smooth fused functions used by the exp/log maps.
// cosh(sqrt(max(q, 0)))
Var cosh_sqrt(const Var& q);
// sinh(sqrt(q)) / sqrt(q), 1 at q = 0
Var sinhc_sqrt(const Var& q);
// arcosh(a) / sqrt(a^2 - 1), 1 at a = 1; below 1 (roundoff) the analytic
// continuation acos(a) / sqrt(1 - a^2) keeps it smooth.
Var arcosh_ratio(const Var& a);

}  // namespace hcgr::ad

#endif  // HCGR_AUTODIFF_HPP_
