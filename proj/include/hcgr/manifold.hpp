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

#ifndef HCGR_MANIFOLD_HPP_
#define HCGR_MANIFOLD_HPP_

// Lorentz (hyperboloid) model of hyperbolic space.
//
// A point of H^d lives in R^{d+1} with <x,x>_L = -k and x_0 > 0, where
// <x,y>_L = -x_0 y_0 + sum_{i>=1} x_i y_i and the sectional curvature is -1/k.
// The origin o = (sqrt(k), 0, ..., 0) is the reference point at which all
// embeddings and biases are stored; tangency at o means coords[0] == 0.
//
// Everything here is plain double-precision value code. The differentiable
// path used for training lives in model.cpp and is cross-checked against
// these functions in the tests.

#include <cstddef>
#include <span>
#include <vector>

#include "hcgr/tensor.hpp"

namespace hcgr::manifold {

inline constexpr double kCurvatureFloor = 1e-4;

// Trainable curvature: k = softplus(kappa_raw) + 1e-4 > 0.
struct Curvature {
  double kappa_raw = 0.0;

  double k() const;
  double c() const { return -1.0 / k(); }
  static Curvature from_k(double k);
};

double softplus(double x);
double inverse_softplus(double y);

class LorentzPoint {
 public:
  LorentzPoint() = default;
  // Stores coords as given; use project_to_hyperboloid to enforce the constraint.
  LorentzPoint(std::vector<double> coords, double k);

  std::span<const double> coords() const { return coords_; }
  double operator[](std::size_t i) const { return coords_[i]; }
  std::size_t dim() const { return coords_.size(); }  // d + 1
  double k() const { return k_; }
  // |<x,x>_L + k|
  double constraint_error() const;

  friend bool operator==(const LorentzPoint&, const LorentzPoint&) = default;

 private:
  std::vector<double> coords_;
  double k_ = 1.0;
};

class TangentVector {
 public:
  TangentVector() = default;
  TangentVector(std::vector<double> coords, LorentzPoint base);

  std::span<const double> coords() const { return coords_; }
  double operator[](std::size_t i) const { return coords_[i]; }
  std::size_t dim() const { return coords_.size(); }
  const LorentzPoint& base() const { return base_; }
  // |<v, base>_L|
  double tangency_error() const;

  friend bool operator==(const TangentVector&, const TangentVector&) = default;

 private:
  std::vector<double> coords_;
  LorentzPoint base_;
};

enum class Activation { kIdentity, kRelu, kLeakyRelu, kTanh };

inline constexpr double kLeakySlope = 0.2;

double apply_activation(Activation act, double x);

double lorentz_inner(std::span<const double> x, std::span<const double> y);
double lorentz_norm(const TangentVector& v);
double lorentz_norm(std::span<const double> v);

LorentzPoint origin(std::size_t dim, double k);
LorentzPoint project_to_hyperboloid(std::span<const double> coords, double k);
// Vector at o with the given space-like part (time coordinate 0).
TangentVector tangent_at_origin(std::span<const double> space, double k);

double distance(const LorentzPoint& x, const LorentzPoint& y);

LorentzPoint exp_map(const LorentzPoint& x, const TangentVector& v);
TangentVector log_map(const LorentzPoint& x, const LorentzPoint& y);
TangentVector parallel_transport(const LorentzPoint& x, const LorentzPoint& y,
                                 const TangentVector& v);

// W (x) x = exp_o(W log_o(x)); W is m x (d+1), result has m coordinates.
LorentzPoint hyp_matmul(const Tensor& w, const LorentzPoint& x);
// x (+) b = exp_x(PT_{o->x}(b)); b must be based at the origin.
LorentzPoint hyp_bias_add(const LorentzPoint& x, const TangentVector& b);
// exp_o^{k_next}(act(log_o^{k}(x))).
LorentzPoint hyp_activation(const LorentzPoint& x, Activation act, double k_next);

}  // namespace hcgr::manifold

#endif  // HCGR_MANIFOLD_HPP_
