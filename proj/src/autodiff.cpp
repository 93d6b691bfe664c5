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

#include "hcgr/autodiff.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "hcgr/error.hpp"

namespace hcgr::ad {

// ---------------------------------------------------------------------------
// Var / Gradients / Tape

const Tensor& Var::value() const {
  if (tape_ == nullptr) throw std::invalid_argument("Var: uninitialized");
  return tape_->value(id_);
}

bool Var::requires_grad() const { return tape_ != nullptr && tape_->requires_grad(id_); }

const Tensor& Gradients::at(ParamId id) const {
  auto it = grads_.find(id);
  if (it == grads_.end()) throw std::invalid_argument("Gradients: unknown parameter id " + std::to_string(id));
  return it->second;
}

Var Tape::constant(Tensor value) {
  nodes_.push_back(Node{std::move(value), nullptr, false, -1, {}});
  return Var(this, static_cast<std::uint32_t>(nodes_.size() - 1));
}

Var Tape::variable(Tensor value) {
  nodes_.push_back(Node{std::move(value), nullptr, true, -1, {}});
  return Var(this, static_cast<std::uint32_t>(nodes_.size() - 1));
}

Var Tape::parameter(ParamId id, const Tensor& value) {
  nodes_.push_back(Node{Tensor{}, &value, true, static_cast<std::int64_t>(id), {}});
  return Var(this, static_cast<std::uint32_t>(nodes_.size() - 1));
}

const Tensor& Tape::value(std::uint32_t id) const {
  const Node& n = nodes_[id];
  return n.external != nullptr ? *n.external : n.value;
}

Var Tape::record(const char* op, Tensor value, std::initializer_list<Var> inputs, BackwardFn backward) {
  if (!value.all_finite()) throw NumericError(std::string(op) + ": non-finite forward value");
  bool rg = false;
  for (const Var& v : inputs) {
    if (v.tape() != this) throw std::invalid_argument(std::string(op) + ": operands from different tapes");
    rg = rg || requires_grad(v.id());
  }
  nodes_.push_back(Node{std::move(value), nullptr, rg, -1, rg ? std::move(backward) : BackwardFn{}});
  return Var(this, static_cast<std::uint32_t>(nodes_.size() - 1));
}

Tensor* Tape::grad_buffer(std::uint32_t id) {
  if (!nodes_[id].requires_grad) return nullptr;
  Tensor& a = adjoints_[id];
  if (a.empty()) {
    const Tensor& v = value(id);
    a = Tensor(v.rows(), v.cols());
  }
  return &a;
}

void Tape::accumulate(std::uint32_t id, const Tensor& g) {
  Tensor* buf = grad_buffer(id);
  if (buf == nullptr) return;
  auto& d = buf->data();
  const auto& s = g.data();
  for (std::size_t i = 0; i < d.size(); ++i) d[i] += s[i];
}

Gradients Tape::backward(const Var& loss) {
  if (nodes_.empty()) throw std::invalid_argument("backward: empty tape");
  if (loss.tape() != this) throw std::invalid_argument("backward: loss from another tape");
  if (loss.value().size() != 1) {
    throw std::invalid_argument("backward: loss must be scalar, got " + loss.value().shape_str());
  }
  adjoints_.assign(nodes_.size(), Tensor{});
  if (nodes_[loss.id()].requires_grad) adjoints_[loss.id()] = Tensor::scalar(1.0);
  for (std::int64_t i = loss.id(); i >= 0; --i) {
    const auto id = static_cast<std::uint32_t>(i);
    if (adjoints_[id].empty() || !nodes_[id].backward) continue;
    // The adjoint is complete here: every consumer has a larger id.
    nodes_[id].backward(*this, id, adjoints_[id]);
  }
  Gradients out;
  for (std::uint32_t id = 0; id < nodes_.size(); ++id) {
    const Node& n = nodes_[id];
    if (n.param < 0) continue;
    const Tensor& v = value(id);
    Tensor g = adjoints_[id].empty() ? Tensor(v.rows(), v.cols()) : adjoints_[id];
    auto [it, inserted] = out.grads_.try_emplace(static_cast<ParamId>(n.param), std::move(g));
    if (!inserted) {
      // Same parameter registered twice on one tape.
      for (std::size_t j = 0; j < it->second.size(); ++j) it->second[j] += adjoints_[id].empty() ? 0.0 : adjoints_[id][j];
    }
  }
  return out;
}

const Tensor& Tape::adjoint(const Var& v) const {
  static const Tensor kEmpty;
  if (v.id() >= adjoints_.size()) return kEmpty;
  return adjoints_[v.id()];
}

// ---------------------------------------------------------------------------
// Helpers

namespace {

void require_same_shape(const Var& a, const Var& b, const char* op) {
  if (!a.value().same_shape(b.value())) {
    throw std::invalid_argument(std::string(op) + ": shape mismatch " + a.value().shape_str() + " vs " +
                                b.value().shape_str());
  }
}

Tape* tape_of(const Var& a) {
  if (!a.valid()) throw std::invalid_argument("uninitialized Var");
  return a.tape();
}

// Elementwise unary op. df(x, y) returns dy/dx given input x and output y.
template <class F, class DF>
Var unary(const char* op, const Var& a, F f, DF df) {
  const Tensor& av = a.value();
  Tensor out(av.rows(), av.cols());
  for (std::size_t i = 0; i < av.size(); ++i) out[i] = f(av[i]);
  const std::uint32_t ai = a.id();
  return tape_of(a)->record(op, std::move(out), {a}, [ai, df](Tape& t, std::uint32_t self, const Tensor& g) {
    Tensor* ga = t.grad_buffer(ai);
    if (ga == nullptr) return;
    const Tensor& x = t.value(ai);
    const Tensor& y = t.value(self);
    for (std::size_t i = 0; i < g.size(); ++i) (*ga)[i] += g[i] * df(x[i], y[i]);
  });
}

}  // namespace

// ---------------------------------------------------------------------------
// Elementwise binary

Var add(const Var& a, const Var& b) {
  require_same_shape(a, b, "add");
  Tensor out = a.value();
  const Tensor& bv = b.value();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += bv[i];
  const auto ai = a.id(), bi = b.id();
  return tape_of(a)->record("add", std::move(out), {a, b}, [ai, bi](Tape& t, std::uint32_t, const Tensor& g) {
    t.accumulate(ai, g);
    t.accumulate(bi, g);
  });
}

Var sub(const Var& a, const Var& b) {
  require_same_shape(a, b, "sub");
  Tensor out = a.value();
  const Tensor& bv = b.value();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] -= bv[i];
  const auto ai = a.id(), bi = b.id();
  return tape_of(a)->record("sub", std::move(out), {a, b}, [ai, bi](Tape& t, std::uint32_t, const Tensor& g) {
    t.accumulate(ai, g);
    if (Tensor* gb = t.grad_buffer(bi)) {
      for (std::size_t i = 0; i < g.size(); ++i) (*gb)[i] -= g[i];
    }
  });
}

Var mul(const Var& a, const Var& b) {
  require_same_shape(a, b, "mul");
  Tensor out = a.value();
  const Tensor& bv = b.value();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= bv[i];
  const auto ai = a.id(), bi = b.id();
  return tape_of(a)->record("mul", std::move(out), {a, b}, [ai, bi](Tape& t, std::uint32_t, const Tensor& g) {
    const Tensor& av = t.value(ai);
    const Tensor& bv = t.value(bi);
    if (Tensor* ga = t.grad_buffer(ai)) {
      for (std::size_t i = 0; i < g.size(); ++i) (*ga)[i] += g[i] * bv[i];
    }
    if (Tensor* gb = t.grad_buffer(bi)) {
      for (std::size_t i = 0; i < g.size(); ++i) (*gb)[i] += g[i] * av[i];
    }
  });
}

Var div(const Var& a, const Var& b) {
  require_same_shape(a, b, "div");
  Tensor out = a.value();
  const Tensor& bv = b.value();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] /= bv[i];
  const auto ai = a.id(), bi = b.id();
  return tape_of(a)->record("div", std::move(out), {a, b}, [ai, bi](Tape& t, std::uint32_t self, const Tensor& g) {
    const Tensor& bv = t.value(bi);
    const Tensor& y = t.value(self);
    if (Tensor* ga = t.grad_buffer(ai)) {
      for (std::size_t i = 0; i < g.size(); ++i) (*ga)[i] += g[i] / bv[i];
    }
    if (Tensor* gb = t.grad_buffer(bi)) {
      for (std::size_t i = 0; i < g.size(); ++i) (*gb)[i] -= g[i] * y[i] / bv[i];
    }
  });
}

Var scale(const Var& a, double s) {
  return unary("scale", a, [s](double x) { return s * x; }, [s](double, double) { return s; });
}

Var add_const(const Var& a, double c) {
  return unary("add_const", a, [c](double x) { return x + c; }, [](double, double) { return 1.0; });
}

// ---------------------------------------------------------------------------
// Broadcasts

Var mul_scalar(const Var& a, const Var& s) {
  if (s.value().size() != 1) throw std::invalid_argument("mul_scalar: expected 1x1 scalar, got " + s.value().shape_str());
  const double sv = s.value().item();
  Tensor out = a.value();
  for (double& x : out.data()) x *= sv;
  const auto ai = a.id(), si = s.id();
  return tape_of(a)->record("mul_scalar", std::move(out), {a, s}, [ai, si](Tape& t, std::uint32_t, const Tensor& g) {
    const Tensor& av = t.value(ai);
    const double sv = t.value(si).item();
    if (Tensor* ga = t.grad_buffer(ai)) {
      for (std::size_t i = 0; i < g.size(); ++i) (*ga)[i] += g[i] * sv;
    }
    if (Tensor* gs = t.grad_buffer(si)) {
      double acc = 0.0;
      for (std::size_t i = 0; i < g.size(); ++i) acc += g[i] * av[i];
      (*gs)[0] += acc;
    }
  });
}

Var add_scalar(const Var& a, const Var& s) {
  if (s.value().size() != 1) throw std::invalid_argument("add_scalar: expected 1x1 scalar, got " + s.value().shape_str());
  const double sv = s.value().item();
  Tensor out = a.value();
  for (double& x : out.data()) x += sv;
  const auto ai = a.id(), si = s.id();
  return tape_of(a)->record("add_scalar", std::move(out), {a, s}, [ai, si](Tape& t, std::uint32_t, const Tensor& g) {
    t.accumulate(ai, g);
    if (Tensor* gs = t.grad_buffer(si)) {
      double acc = 0.0;
      for (double x : g.data()) acc += x;
      (*gs)[0] += acc;
    }
  });
}

Var add_row(const Var& a, const Var& r) {
  const Tensor& av = a.value();
  const Tensor& rv = r.value();
  if (rv.rows() != 1 || rv.cols() != av.cols()) {
    throw std::invalid_argument("add_row: row " + rv.shape_str() + " vs matrix " + av.shape_str());
  }
  Tensor out = av;
  for (std::size_t i = 0; i < out.rows(); ++i)
    for (std::size_t j = 0; j < out.cols(); ++j) out(i, j) += rv[j];
  const auto ai = a.id(), ri = r.id();
  return tape_of(a)->record("add_row", std::move(out), {a, r}, [ai, ri](Tape& t, std::uint32_t, const Tensor& g) {
    t.accumulate(ai, g);
    if (Tensor* gr = t.grad_buffer(ri)) {
      for (std::size_t i = 0; i < g.rows(); ++i)
        for (std::size_t j = 0; j < g.cols(); ++j) (*gr)[j] += g(i, j);
    }
  });
}

Var mul_row(const Var& a, const Var& r) {
  const Tensor& av = a.value();
  const Tensor& rv = r.value();
  if (rv.rows() != 1 || rv.cols() != av.cols()) {
    throw std::invalid_argument("mul_row: row " + rv.shape_str() + " vs matrix " + av.shape_str());
  }
  Tensor out = av;
  for (std::size_t i = 0; i < out.rows(); ++i)
    for (std::size_t j = 0; j < out.cols(); ++j) out(i, j) *= rv[j];
  const auto ai = a.id(), ri = r.id();
  return tape_of(a)->record("mul_row", std::move(out), {a, r}, [ai, ri](Tape& t, std::uint32_t, const Tensor& g) {
    const Tensor& av = t.value(ai);
    const Tensor& rv = t.value(ri);
    if (Tensor* ga = t.grad_buffer(ai)) {
      for (std::size_t i = 0; i < g.rows(); ++i)
        for (std::size_t j = 0; j < g.cols(); ++j) (*ga)(i, j) += g(i, j) * rv[j];
    }
    if (Tensor* gr = t.grad_buffer(ri)) {
      for (std::size_t i = 0; i < g.rows(); ++i)
        for (std::size_t j = 0; j < g.cols(); ++j) (*gr)[j] += g(i, j) * av(i, j);
    }
  });
}

Var scale_rows(const Var& a, const Var& c) {
  const Tensor& av = a.value();
  const Tensor& cv = c.value();
  if (cv.cols() != 1 || cv.rows() != av.rows()) {
    throw std::invalid_argument("scale_rows: column " + cv.shape_str() + " vs matrix " + av.shape_str());
  }
  Tensor out = av;
  for (std::size_t i = 0; i < out.rows(); ++i)
    for (std::size_t j = 0; j < out.cols(); ++j) out(i, j) *= cv[i];
  const auto ai = a.id(), ci = c.id();
  return tape_of(a)->record("scale_rows", std::move(out), {a, c}, [ai, ci](Tape& t, std::uint32_t, const Tensor& g) {
    const Tensor& av = t.value(ai);
    const Tensor& cv = t.value(ci);
    if (Tensor* ga = t.grad_buffer(ai)) {
      for (std::size_t i = 0; i < g.rows(); ++i)
        for (std::size_t j = 0; j < g.cols(); ++j) (*ga)(i, j) += g(i, j) * cv[i];
    }
    if (Tensor* gc = t.grad_buffer(ci)) {
      for (std::size_t i = 0; i < g.rows(); ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < g.cols(); ++j) acc += g(i, j) * av(i, j);
        (*gc)[i] += acc;
      }
    }
  });
}

// ---------------------------------------------------------------------------
// Linear algebra and shape

namespace {

// c += a * b  (a: n x m, b: m x p)
void gemm_acc(const Tensor& a, const Tensor& b, Tensor& c) {
  const std::size_t n = a.rows(), m = a.cols(), p = b.cols();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < m; ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      const double* brow = b.data().data() + k * p;
      double* crow = c.data().data() + i * p;
      for (std::size_t j = 0; j < p; ++j) crow[j] += aik * brow[j];
    }
  }
}

}  // namespace

Var matmul(const Var& a, const Var& b) {
  const Tensor& av = a.value();
  const Tensor& bv = b.value();
  if (av.cols() != bv.rows()) {
    throw std::invalid_argument("matmul: shape mismatch " + av.shape_str() + " x " + bv.shape_str());
  }
  Tensor out(av.rows(), bv.cols());
  gemm_acc(av, bv, out);
  const auto ai = a.id(), bi = b.id();
  return tape_of(a)->record("matmul", std::move(out), {a, b}, [ai, bi](Tape& t, std::uint32_t, const Tensor& g) {
    const Tensor& av = t.value(ai);
    const Tensor& bv = t.value(bi);
    if (Tensor* ga = t.grad_buffer(ai)) {
      // dA = G B^T
      for (std::size_t i = 0; i < g.rows(); ++i)
        for (std::size_t k = 0; k < bv.rows(); ++k) {
          double acc = 0.0;
          for (std::size_t j = 0; j < g.cols(); ++j) acc += g(i, j) * bv(k, j);
          (*ga)(i, k) += acc;
        }
    }
    if (Tensor* gb = t.grad_buffer(bi)) {
      // dB = A^T G
      for (std::size_t i = 0; i < av.rows(); ++i)
        for (std::size_t k = 0; k < av.cols(); ++k) {
          const double aik = av(i, k);
          if (aik == 0.0) continue;
          for (std::size_t j = 0; j < g.cols(); ++j) (*gb)(k, j) += aik * g(i, j);
        }
    }
  });
}

Var matmul_bt(const Var& a, const Var& b) {
  const Tensor& av = a.value();
  const Tensor& bv = b.value();
  if (av.cols() != bv.cols()) {
    throw std::invalid_argument("matmul_bt: shape mismatch " + av.shape_str() + " x " + bv.shape_str() + "^T");
  }
  const std::size_t n = av.rows(), m = av.cols(), p = bv.rows();
  Tensor out(n, p);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < p; ++j) {
      double acc = 0.0;
      for (std::size_t k = 0; k < m; ++k) acc += av(i, k) * bv(j, k);
      out(i, j) = acc;
    }
  const auto ai = a.id(), bi = b.id();
  return tape_of(a)->record("matmul_bt", std::move(out), {a, b}, [ai, bi](Tape& t, std::uint32_t, const Tensor& g) {
    const Tensor& av = t.value(ai);
    const Tensor& bv = t.value(bi);
    // dA = G B, dB = G^T A
    if (Tensor* ga = t.grad_buffer(ai)) gemm_acc(g, bv, *ga);
    if (Tensor* gb = t.grad_buffer(bi)) {
      for (std::size_t i = 0; i < g.rows(); ++i)
        for (std::size_t j = 0; j < g.cols(); ++j) {
          const double gij = g(i, j);
          if (gij == 0.0) continue;
          for (std::size_t k = 0; k < av.cols(); ++k) (*gb)(j, k) += gij * av(i, k);
        }
    }
  });
}

Var transpose(const Var& a) {
  const Tensor& av = a.value();
  Tensor out(av.cols(), av.rows());
  for (std::size_t i = 0; i < av.rows(); ++i)
    for (std::size_t j = 0; j < av.cols(); ++j) out(j, i) = av(i, j);
  const auto ai = a.id();
  return tape_of(a)->record("transpose", std::move(out), {a}, [ai](Tape& t, std::uint32_t, const Tensor& g) {
    if (Tensor* ga = t.grad_buffer(ai)) {
      for (std::size_t i = 0; i < g.rows(); ++i)
        for (std::size_t j = 0; j < g.cols(); ++j) (*ga)(j, i) += g(i, j);
    }
  });
}

Var reshape(const Var& a, std::size_t rows, std::size_t cols) {
  const Tensor& av = a.value();
  if (rows * cols != av.size()) {
    throw std::invalid_argument("reshape: cannot view " + av.shape_str() + " as [" + std::to_string(rows) + "x" +
                                std::to_string(cols) + "]");
  }
  Tensor out(rows, cols, av.data());
  const auto ai = a.id();
  return tape_of(a)->record("reshape", std::move(out), {a}, [ai](Tape& t, std::uint32_t, const Tensor& g) {
    if (Tensor* ga = t.grad_buffer(ai)) {
      for (std::size_t i = 0; i < g.size(); ++i) (*ga)[i] += g[i];
    }
  });
}

Var concat_cols(const Var& a, const Var& b) {
  const Tensor& av = a.value();
  const Tensor& bv = b.value();
  if (av.rows() != bv.rows()) {
    throw std::invalid_argument("concat_cols: row mismatch " + av.shape_str() + " vs " + bv.shape_str());
  }
  const std::size_t ca = av.cols(), cb = bv.cols();
  Tensor out(av.rows(), ca + cb);
  for (std::size_t i = 0; i < av.rows(); ++i) {
    for (std::size_t j = 0; j < ca; ++j) out(i, j) = av(i, j);
    for (std::size_t j = 0; j < cb; ++j) out(i, ca + j) = bv(i, j);
  }
  const auto ai = a.id(), bi = b.id();
  return tape_of(a)->record("concat_cols", std::move(out), {a, b}, [ai, bi, ca, cb](Tape& t, std::uint32_t, const Tensor& g) {
    if (Tensor* ga = t.grad_buffer(ai)) {
      for (std::size_t i = 0; i < g.rows(); ++i)
        for (std::size_t j = 0; j < ca; ++j) (*ga)(i, j) += g(i, j);
    }
    if (Tensor* gb = t.grad_buffer(bi)) {
      for (std::size_t i = 0; i < g.rows(); ++i)
        for (std::size_t j = 0; j < cb; ++j) (*gb)(i, j) += g(i, ca + j);
    }
  });
}

Var slice_cols(const Var& a, std::size_t start, std::size_t count) {
  const Tensor& av = a.value();
  if (count == 0 || start + count > av.cols()) {
    throw std::invalid_argument("slice_cols: range [" + std::to_string(start) + ", " + std::to_string(start + count) +
                                ") outside " + av.shape_str());
  }
  Tensor out(av.rows(), count);
  for (std::size_t i = 0; i < av.rows(); ++i)
    for (std::size_t j = 0; j < count; ++j) out(i, j) = av(i, start + j);
  const auto ai = a.id();
  return tape_of(a)->record("slice_cols", std::move(out), {a}, [ai, start](Tape& t, std::uint32_t, const Tensor& g) {
    if (Tensor* ga = t.grad_buffer(ai)) {
      for (std::size_t i = 0; i < g.rows(); ++i)
        for (std::size_t j = 0; j < g.cols(); ++j) (*ga)(i, start + j) += g(i, j);
    }
  });
}

Var slice_rows(const Var& a, std::size_t start, std::size_t count) {
  const Tensor& av = a.value();
  if (count == 0 || start + count > av.rows()) {
    throw std::invalid_argument("slice_rows: range [" + std::to_string(start) + ", " + std::to_string(start + count) +
                                ") outside " + av.shape_str());
  }
  const std::size_t c = av.cols();
  Tensor out(count, c, std::vector<double>(av.data().begin() + start * c, av.data().begin() + (start + count) * c));
  const auto ai = a.id();
  return tape_of(a)->record("slice_rows", std::move(out), {a}, [ai, start, c](Tape& t, std::uint32_t, const Tensor& g) {
    if (Tensor* ga = t.grad_buffer(ai)) {
      for (std::size_t i = 0; i < g.size(); ++i) (*ga)[start * c + i] += g[i];
    }
  });
}

Var gather_rows(const Var& a, std::span<const std::size_t> index) {
  const Tensor& av = a.value();
  const std::size_t c = av.cols();
  Tensor out(index.size(), c);
  for (std::size_t i = 0; i < index.size(); ++i) {
    if (index[i] >= av.rows()) {
      throw std::invalid_argument("gather_rows: index " + std::to_string(index[i]) + " outside " + av.shape_str());
    }
    std::copy_n(av.data().begin() + index[i] * c, c, out.data().begin() + i * c);
  }
  std::vector<std::size_t> idx(index.begin(), index.end());
  const auto ai = a.id();
  return tape_of(a)->record("gather_rows", std::move(out), {a}, [ai, idx = std::move(idx), c](Tape& t, std::uint32_t, const Tensor& g) {
    if (Tensor* ga = t.grad_buffer(ai)) {
      for (std::size_t i = 0; i < idx.size(); ++i)
        for (std::size_t j = 0; j < c; ++j) (*ga)[idx[i] * c + j] += g[i * c + j];
    }
  });
}

Var scatter_add_rows(const Var& a, std::span<const std::size_t> index, std::size_t rows) {
  const Tensor& av = a.value();
  if (index.size() != av.rows()) {
    throw std::invalid_argument("scatter_add_rows: " + std::to_string(index.size()) + " indices for " + av.shape_str());
  }
  const std::size_t c = av.cols();
  Tensor out(rows, c);
  for (std::size_t i = 0; i < index.size(); ++i) {
    if (index[i] >= rows) throw std::invalid_argument("scatter_add_rows: index out of range");
    for (std::size_t j = 0; j < c; ++j) out(index[i], j) += av(i, j);
  }
  std::vector<std::size_t> idx(index.begin(), index.end());
  const auto ai = a.id();
  return tape_of(a)->record("scatter_add_rows", std::move(out), {a}, [ai, idx = std::move(idx), c](Tape& t, std::uint32_t, const Tensor& g) {
    if (Tensor* ga = t.grad_buffer(ai)) {
      for (std::size_t i = 0; i < idx.size(); ++i)
        for (std::size_t j = 0; j < c; ++j) (*ga)(i, j) += g(idx[i], j);
    }
  });
}

// ---------------------------------------------------------------------------
// Reductions

Var sum(const Var& a) {
  double s = 0.0;
  for (double x : a.value().data()) s += x;
  const auto ai = a.id();
  return tape_of(a)->record("sum", Tensor::scalar(s), {a}, [ai](Tape& t, std::uint32_t, const Tensor& g) {
    if (Tensor* ga = t.grad_buffer(ai)) {
      for (double& x : ga->data()) x += g[0];
    }
  });
}

Var row_sum(const Var& a) {
  const Tensor& av = a.value();
  Tensor out(av.rows(), 1);
  for (std::size_t i = 0; i < av.rows(); ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < av.cols(); ++j) s += av(i, j);
    out[i] = s;
  }
  const auto ai = a.id();
  return tape_of(a)->record("row_sum", std::move(out), {a}, [ai](Tape& t, std::uint32_t, const Tensor& g) {
    if (Tensor* ga = t.grad_buffer(ai)) {
      for (std::size_t i = 0; i < ga->rows(); ++i)
        for (std::size_t j = 0; j < ga->cols(); ++j) (*ga)(i, j) += g[i];
    }
  });
}

Var softmax_rows(const Var& a) {
  const Tensor& av = a.value();
  Tensor out(av.rows(), av.cols());
  for (std::size_t i = 0; i < av.rows(); ++i) {
    double mx = av(i, 0);
    for (std::size_t j = 1; j < av.cols(); ++j) mx = std::max(mx, av(i, j));
    double z = 0.0;
    for (std::size_t j = 0; j < av.cols(); ++j) {
      out(i, j) = std::exp(av(i, j) - mx);
      z += out(i, j);
    }
    for (std::size_t j = 0; j < av.cols(); ++j) out(i, j) /= z;
  }
  const auto ai = a.id();
  return tape_of(a)->record("softmax_rows", std::move(out), {a}, [ai](Tape& t, std::uint32_t self, const Tensor& g) {
    Tensor* ga = t.grad_buffer(ai);
    if (ga == nullptr) return;
    const Tensor& y = t.value(self);
    for (std::size_t i = 0; i < y.rows(); ++i) {
      double dot = 0.0;
      for (std::size_t j = 0; j < y.cols(); ++j) dot += g(i, j) * y(i, j);
      for (std::size_t j = 0; j < y.cols(); ++j) (*ga)(i, j) += y(i, j) * (g(i, j) - dot);
    }
  });
}

// ---------------------------------------------------------------------------
// Elementwise unary

Var exp(const Var& a) {
  return unary("exp", a, [](double x) { return std::exp(x); }, [](double, double y) { return y; });
}

Var log(const Var& a) {
  return unary("log", a, [](double x) { return std::log(x); }, [](double x, double) { return 1.0 / x; });
}

Var sqrt(const Var& a) {
  return unary("sqrt", a, [](double x) { return std::sqrt(x); }, [](double, double y) { return 0.5 / y; });
}

Var cosh(const Var& a) {
  return unary("cosh", a, [](double x) { return std::cosh(x); }, [](double x, double) { return std::sinh(x); });
}

Var sinh(const Var& a) {
  return unary("sinh", a, [](double x) { return std::sinh(x); }, [](double x, double) { return std::cosh(x); });
}

Var arcosh(const Var& a) {
  return unary(
      "arcosh", a, [](double x) { return std::acosh(std::max(x, 1.0)); },
      [](double x, double) {
        if (x <= 1.0) return 0.0;
        const double u = std::max(x, 1.0 + 1e-12);
        return 1.0 / std::sqrt(u * u - 1.0);
      });
}

Var clamp(const Var& a, double lo, double hi) {
  return unary(
      "clamp", a, [lo, hi](double x) { return std::clamp(x, lo, hi); },
      [lo, hi](double x, double) { return (x < lo || x > hi) ? 0.0 : 1.0; });
}

Var relu(const Var& a) {
  return unary("relu", a, [](double x) { return x > 0.0 ? x : 0.0; }, [](double x, double) { return x > 0.0 ? 1.0 : 0.0; });
}

Var leaky_relu(const Var& a, double slope) {
  return unary(
      "leaky_relu", a, [slope](double x) { return x > 0.0 ? x : slope * x; },
      [slope](double x, double) { return x > 0.0 ? 1.0 : slope; });
}

Var tanh(const Var& a) {
  return unary("tanh", a, [](double x) { return std::tanh(x); }, [](double, double y) { return 1.0 - y * y; });
}

Var sigmoid(const Var& a) {
  return unary(
      "sigmoid", a,
      [](double x) {
        if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
        const double e = std::exp(x);
        return e / (1.0 + e);
      },
      [](double, double y) { return y * (1.0 - y); });
}

Var softplus(const Var& a) {
  return unary(
      "softplus", a, [](double x) { return x > 30.0 ? x : std::log1p(std::exp(x)); },
      [](double x, double) {
        if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
        const double e = std::exp(x);
        return e / (1.0 + e);
      });
}

namespace {

constexpr double kSeriesBand = 1e-4;

double cosh_sqrt_value(double q) {
  if (std::abs(q) < kSeriesBand) return 1.0 + q / 2.0 + q * q / 24.0 + q * q * q / 720.0;
  return q > 0.0 ? std::cosh(std::sqrt(q)) : std::cos(std::sqrt(-q));
}

double sinhc_sqrt_value(double q) {
  if (std::abs(q) < kSeriesBand) return 1.0 + q / 6.0 + q * q / 120.0 + q * q * q / 5040.0;
  if (q > 0.0) {
    const double r = std::sqrt(q);
    return std::sinh(r) / r;
  }
  const double r = std::sqrt(-q);
  return std::sin(r) / r;
}

double sinhc_sqrt_deriv(double q, double f) {
  if (std::abs(q) < kSeriesBand) return 1.0 / 6.0 + q / 60.0 + q * q / 1680.0;
  return (cosh_sqrt_value(q) - f) / (2.0 * q);
}

double arcosh_ratio_value(double a) {
  const double t = a - 1.0;
  if (std::abs(t) < kSeriesBand) return 1.0 - t / 3.0 + 2.0 * t * t / 15.0 - 2.0 * t * t * t / 35.0;
  if (a > 1.0) return std::acosh(a) / std::sqrt(a * a - 1.0);
  const double ac = std::clamp(a, -1.0, 1.0);
  return std::acos(ac) / std::sqrt(1.0 - ac * ac);
}

double arcosh_ratio_deriv(double a, double g) {
  const double t = a - 1.0;
  if (std::abs(t) < kSeriesBand) return -1.0 / 3.0 + 4.0 * t / 15.0 - 6.0 * t * t / 35.0;
  return (1.0 - a * g) / (a * a - 1.0);
}

}  // namespace

Var cosh_sqrt(const Var& q) {
  return unary("cosh_sqrt", q, cosh_sqrt_value, [](double x, double) { return 0.5 * sinhc_sqrt_value(x); });
}

Var sinhc_sqrt(const Var& q) {
  return unary("sinhc_sqrt", q, sinhc_sqrt_value, sinhc_sqrt_deriv);
}

Var arcosh_ratio(const Var& a) {
  return unary("arcosh_ratio", a, arcosh_ratio_value, arcosh_ratio_deriv);
}

}  // namespace hcgr::ad
