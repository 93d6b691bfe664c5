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

#include "hcgr/manifold.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace hcgr::manifold {
namespace {

constexpr double kExpSeriesThreshold = 1e-12;
constexpr double kLogZeroDistance = 1e-10;
// Below this arcosh argument the chord form 2 asinh(|y-x|_L / 2 sqrt(k)) is
// used; it avoids the cancellation in -<x,y>/k - 1 for nearby points.
constexpr double kChordFormBelow = 1.5;

void require_same_k(double a, double b, const char* op) {
  if (a != b) {
    throw std::invalid_argument(std::string(op) + ": curvature mismatch (" + std::to_string(a) +
                                " vs " + std::to_string(b) + ")");
  }
}

void require_same_dim(std::size_t a, std::size_t b, const char* op) {
  if (a != b) {
    throw std::invalid_argument(std::string(op) + ": dimension mismatch (" + std::to_string(a) +
                                " vs " + std::to_string(b) + ")");
  }
}

// Projects v onto the tangent space at x: v + (<x,v>_L / k) x.
void project_tangent(std::vector<double>& v, const LorentzPoint& x) {
  const double s = lorentz_inner(x.coords(), v) / x.k();
  for (std::size_t i = 0; i < v.size(); ++i) v[i] += s * x[i];
}

}  // namespace

double softplus(double x) { return x > 30.0 ? x : std::log1p(std::exp(x)); }

double inverse_softplus(double y) {
  if (y <= 0.0) throw std::invalid_argument("inverse_softplus: argument must be positive");
  return y > 30.0 ? y : std::log(std::expm1(y));
}

double Curvature::k() const { return softplus(kappa_raw) + kCurvatureFloor; }

Curvature Curvature::from_k(double k) {
  if (!(k > kCurvatureFloor)) throw std::invalid_argument("Curvature::from_k: k must exceed 1e-4");
  return Curvature{inverse_softplus(k - kCurvatureFloor)};
}

LorentzPoint::LorentzPoint(std::vector<double> coords, double k)
    : coords_(std::move(coords)), k_(k) {
  if (coords_.size() < 2) throw std::invalid_argument("LorentzPoint: need d + 1 >= 2 coordinates");
  if (!(k_ > 0.0)) throw std::invalid_argument("LorentzPoint: k must be positive");
}

double LorentzPoint::constraint_error() const {
  return std::abs(lorentz_inner(coords_, coords_) + k_);
}

TangentVector::TangentVector(std::vector<double> coords, LorentzPoint base)
    : coords_(std::move(coords)), base_(std::move(base)) {
  require_same_dim(coords_.size(), base_.dim(), "TangentVector");
}

double TangentVector::tangency_error() const {
  return std::abs(lorentz_inner(coords_, base_.coords()));
}

double apply_activation(Activation act, double x) {
  switch (act) {
    case Activation::kIdentity: return x;
    case Activation::kRelu: return x > 0.0 ? x : 0.0;
    case Activation::kLeakyRelu: return x > 0.0 ? x : kLeakySlope * x;
    case Activation::kTanh: return std::tanh(x);
  }
  return x;
}

double lorentz_inner(std::span<const double> x, std::span<const double> y) {
  require_same_dim(x.size(), y.size(), "lorentz_inner");
  if (x.size() < 2) throw std::invalid_argument("lorentz_inner: dimension must be >= 2");
  double s = -x[0] * y[0];
  for (std::size_t i = 1; i < x.size(); ++i) s += x[i] * y[i];
  return s;
}

double lorentz_norm(std::span<const double> v) {
  return std::sqrt(std::max(lorentz_inner(v, v), 0.0));
}

double lorentz_norm(const TangentVector& v) { return lorentz_norm(v.coords()); }

LorentzPoint origin(std::size_t dim, double k) {
  std::vector<double> c(dim, 0.0);
  if (dim > 0) c[0] = std::sqrt(k);
  return LorentzPoint(std::move(c), k);
}

LorentzPoint project_to_hyperboloid(std::span<const double> coords, double k) {
  std::vector<double> c(coords.begin(), coords.end());
  double s = k;
  for (std::size_t i = 1; i < c.size(); ++i) s += c[i] * c[i];
  if (!c.empty()) c[0] = std::sqrt(s);
  return LorentzPoint(std::move(c), k);
}

TangentVector tangent_at_origin(std::span<const double> space, double k) {
  std::vector<double> c(space.size() + 1, 0.0);
  std::copy(space.begin(), space.end(), c.begin() + 1);
  return TangentVector(std::move(c), origin(space.size() + 1, k));
}

double distance(const LorentzPoint& x, const LorentzPoint& y) {
  require_same_k(x.k(), y.k(), "distance");
  require_same_dim(x.dim(), y.dim(), "distance");
  const double k = x.k();
  const double alpha = std::max(-lorentz_inner(x.coords(), y.coords()) / k, 1.0);
  if (alpha >= kChordFormBelow) return std::sqrt(k) * std::acosh(alpha);
  // arcosh(1 + 2 s^2) = 2 asinh(s), s = |y - x|_L / (2 sqrt(k)).
  std::vector<double> diff(x.dim());
  for (std::size_t i = 0; i < diff.size(); ++i) diff[i] = y[i] - x[i];
  const double chord = lorentz_norm(diff);
  return 2.0 * std::sqrt(k) * std::asinh(chord / (2.0 * std::sqrt(k)));
}

LorentzPoint exp_map(const LorentzPoint& x, const TangentVector& v) {
  if (!(v.base() == x)) throw std::invalid_argument("exp_map: tangent vector is not based at x");
  const double k = x.k();
  const double sk = std::sqrt(k);
  const double n = lorentz_norm(v);
  std::vector<double> out(x.dim());
  if (n < kExpSeriesThreshold) {
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = x[i] + v[i];
  } else {
    const double c = std::cosh(n / sk);
    const double s = sk * std::sinh(n / sk) / n;
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = c * x[i] + s * v[i];
  }
  return project_to_hyperboloid(out, k);
}

TangentVector log_map(const LorentzPoint& x, const LorentzPoint& y) {
  require_same_k(x.k(), y.k(), "log_map");
  require_same_dim(x.dim(), y.dim(), "log_map");
  const double k = x.k();
  const double d = distance(x, y);
  std::vector<double> u(x.dim(), 0.0);
  if (d < kLogZeroDistance) return TangentVector(std::move(u), x);
  // u = y + (1/k)<x,y>_L x, written as (y - x) - ((alpha - 1)) x with
  // alpha - 1 = |y - x|_L^2 / (2k) so nearby points do not cancel.
  std::vector<double> diff(x.dim());
  for (std::size_t i = 0; i < diff.size(); ++i) diff[i] = y[i] - x[i];
  const double alpha_minus_one = std::max(lorentz_inner(diff, diff), 0.0) / (2.0 * k);
  for (std::size_t i = 0; i < u.size(); ++i) u[i] = diff[i] - alpha_minus_one * x[i];
  project_tangent(u, x);
  const double un = lorentz_norm(u);
  if (un == 0.0) return TangentVector(std::vector<double>(x.dim(), 0.0), x);
  for (double& ui : u) ui *= d / un;
  return TangentVector(std::move(u), x);
}

TangentVector parallel_transport(const LorentzPoint& x, const LorentzPoint& y,
                                 const TangentVector& v) {
  require_same_k(x.k(), y.k(), "parallel_transport");
  if (!(v.base() == x)) throw std::invalid_argument("parallel_transport: vector is not based at x");
  const double d = distance(x, y);
  if (d < kLogZeroDistance) return TangentVector(std::vector<double>(v.coords().begin(), v.coords().end()), y);
  const TangentVector lxy = log_map(x, y);
  const TangentVector lyx = log_map(y, x);
  const double coef = lorentz_inner(lxy.coords(), v.coords()) / (d * d);
  std::vector<double> out(v.dim());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = v[i] - coef * (lxy[i] + lyx[i]);
  project_tangent(out, y);
  return TangentVector(std::move(out), y);
}

LorentzPoint hyp_matmul(const Tensor& w, const LorentzPoint& x) {
  if (w.cols() != x.dim() || w.rows() < 2) {
    throw std::invalid_argument("hyp_matmul: weight " + w.shape_str() + " incompatible with point of dim " +
                                std::to_string(x.dim()));
  }
  const double k = x.k();
  const TangentVector t = log_map(origin(x.dim(), k), x);
  std::vector<double> u(w.rows(), 0.0);
  for (std::size_t r = 1; r < w.rows(); ++r) {
    double s = 0.0;
    for (std::size_t c = 0; c < w.cols(); ++c) s += w(r, c) * t[c];
    u[r] = s;
  }
  const LorentzPoint o = origin(w.rows(), k);
  return exp_map(o, TangentVector(std::move(u), o));
}

LorentzPoint hyp_bias_add(const LorentzPoint& x, const TangentVector& b) {
  const LorentzPoint o = origin(x.dim(), x.k());
  if (!(b.base() == o)) throw std::invalid_argument("hyp_bias_add: bias must be based at the origin");
  return exp_map(x, parallel_transport(o, x, b));
}

LorentzPoint hyp_activation(const LorentzPoint& x, Activation act, double k_next) {
  const TangentVector t = log_map(origin(x.dim(), x.k()), x);
  std::vector<double> a(t.dim(), 0.0);
  for (std::size_t i = 1; i < a.size(); ++i) a[i] = apply_activation(act, t[i]);
  const LorentzPoint o = origin(x.dim(), k_next);
  return exp_map(o, TangentVector(std::move(a), o));
}

}  // namespace hcgr::manifold
