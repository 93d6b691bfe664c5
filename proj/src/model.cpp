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

#include "hcgr/model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hcgr {

using ad::Tape;
using ad::Var;

std::string to_string(Aggregator a) {
  switch (a) {
    case Aggregator::kMultiHop: return "multi_hop";
    case Aggregator::kGatLastLayer: return "gat_last_layer";
    case Aggregator::kGcnMean: return "gcn_mean";
  }
  return "multi_hop";
}

Aggregator parse_aggregator(const std::string& s) {
  if (s == "multi_hop") return Aggregator::kMultiHop;
  if (s == "gat_last_layer") return Aggregator::kGatLastLayer;
  if (s == "gcn_mean") return Aggregator::kGcnMean;
  throw std::invalid_argument("unknown aggregator '" + s + "' (multi_hop, gat_last_layer, gcn_mean)");
}

std::string to_string(manifold::Activation a) {
  switch (a) {
    case manifold::Activation::kIdentity: return "identity";
    case manifold::Activation::kRelu: return "relu";
    case manifold::Activation::kLeakyRelu: return "leaky_relu";
    case manifold::Activation::kTanh: return "tanh";
  }
  return "leaky_relu";
}

manifold::Activation parse_activation(const std::string& s) {
  if (s == "identity") return manifold::Activation::kIdentity;
  if (s == "relu") return manifold::Activation::kRelu;
  if (s == "leaky_relu") return manifold::Activation::kLeakyRelu;
  if (s == "tanh") return manifold::Activation::kTanh;
  throw std::invalid_argument("unknown activation '" + s + "' (identity, relu, leaky_relu, tanh)");
}

void HyperParams::validate() const {
  if (dim < 2) throw std::invalid_argument("dim must be >= 2");
  if (graph_layers < 1) throw std::invalid_argument("graph_layers must be >= 1");
  if (attention_blocks < 1) throw std::invalid_argument("attention_blocks must be >= 1");
  if (max_session_len < 1) throw std::invalid_argument("max_session_len must be >= 1");
  if (!(init_std >= 0.0)) throw std::invalid_argument("init_std must be >= 0");
}

// ---------------------------------------------------------------------------
// ModelParams

ad::ParamId ModelParams::add(std::string name, std::size_t rows, std::size_t cols) {
  names_.push_back(std::move(name));
  tensors_.emplace_back(rows, cols);
  return tensors_.size() - 1;
}

ModelParams::ModelParams(const HyperParams& hp, std::size_t catalog_size) {
  const std::size_t d = hp.dim, D = hp.dim + 1;
  embeddings = add("embeddings", catalog_size, d);
  attn_w = add("attn.w", 1, 2 * D);
  attn_b = add("attn.b", 1, 1);
  fusion = add("fusion.alpha", 1, hp.graph_layers + 1);
  for (std::size_t j = 0; j < hp.attention_blocks; ++j) {
    const std::string p = "sa" + std::to_string(j) + ".";
    Block b{};
    b.wq = add(p + "wq", D, D);
    b.wk = add(p + "wk", D, D);
    b.wv = add(p + "wv", D, D);
    b.w1 = add(p + "w1", D, D);
    b.w2 = add(p + "w2", D, D);
    b.b1 = add(p + "b1", 1, D);
    b.b2 = add(p + "b2", 1, D);
    b.kappa = add(p + "kappa", 1, 1);
    blocks.push_back(b);
  }
  gate = add("gate", 1, 1);
  for (std::size_t l = 0; l <= hp.graph_layers; ++l) graph_kappa.push_back(add("kappa.graph" + std::to_string(l), 1, 1));
}

void ModelParams::initialize(const HyperParams& hp, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, hp.init_std);
  const double kappa_unit = manifold::Curvature::from_k(1.0).kappa_raw;
  for (ad::ParamId id = 0; id < tensors_.size(); ++id) {
    if (is_curvature(id)) {
      tensors_[id].fill(kappa_unit);
      continue;
    }
    for (double& x : tensors_[id].data()) x = normal(rng);
  }
}

std::optional<ad::ParamId> ModelParams::find(const std::string& name) const {
  auto it = std::find(names_.begin(), names_.end(), name);
  if (it == names_.end()) return std::nullopt;
  return static_cast<ad::ParamId>(it - names_.begin());
}

bool ModelParams::is_curvature(ad::ParamId id) const {
  if (std::find(graph_kappa.begin(), graph_kappa.end(), id) != graph_kappa.end()) return true;
  return std::any_of(blocks.begin(), blocks.end(), [id](const Block& b) { return b.kappa == id; });
}

std::size_t ModelParams::scalar_count() const {
  std::size_t n = 0;
  for (const Tensor& t : tensors_) n += t.size();
  return n;
}

// ---------------------------------------------------------------------------
// Differentiable Lorentz ops

namespace lorentz {
namespace {

Var time_mask(Tape& t, std::size_t cols) {
  Tensor m(1, cols, 1.0);
  m[0] = 0.0;
  return t.constant(std::move(m));
}

Var minkowski_signs(Tape& t, std::size_t cols) {
  Tensor m(1, cols, 1.0);
  m[0] = -1.0;
  return t.constant(std::move(m));
}

Var reciprocal(const Var& s) { return ad::div(s.tape()->constant(Tensor::scalar(1.0)), s); }

// Recomputes the time coordinate from the space part: x0 = sqrt(k + |x_s|^2).
Var project_rows(const Var& space, const Var& k) {
  Var t0 = ad::sqrt(ad::add_scalar(ad::row_sum(ad::mul(space, space)), k));
  return ad::concat_cols(t0, space);
}

}  // namespace

Var curvature(const Var& kappa_raw) { return ad::add_const(ad::softplus(kappa_raw), manifold::kCurvatureFloor); }

Var inner_rows(const Var& a, const Var& b) {
  return ad::row_sum(ad::mul(a, ad::mul_row(b, minkowski_signs(*a.tape(), b.cols()))));
}

Var to_origin_tangent(const Var& v) { return ad::mul_row(v, time_mask(*v.tape(), v.cols())); }

Var expmap0(const Var& v, const Var& k) {
  const std::size_t d = v.cols() - 1;
  Var vs = ad::slice_cols(v, 1, d);
  Var q = ad::mul_scalar(ad::row_sum(ad::mul(vs, vs)), reciprocal(k));
  Var space = ad::scale_rows(vs, ad::sinhc_sqrt(q));
  return project_rows(space, k);
}

Var logmap0(const Var& x, const Var& k) {
  Var alpha = ad::mul_scalar(ad::slice_cols(x, 0, 1), reciprocal(ad::sqrt(k)));
  return ad::scale_rows(to_origin_tangent(x), ad::arcosh_ratio(alpha));
}

Var expmap(const Var& x, const Var& v, const Var& k) {
  Var q = ad::mul_scalar(inner_rows(v, v), reciprocal(k));
  Var out = ad::add(ad::scale_rows(x, ad::cosh_sqrt(q)), ad::scale_rows(v, ad::sinhc_sqrt(q)));
  return project_rows(ad::slice_cols(out, 1, out.cols() - 1), k);
}

Var logmap(const Var& x, const Var& y, const Var& k) {
  Var alpha = ad::scale(ad::mul_scalar(inner_rows(x, y), reciprocal(k)), -1.0);
  Var u = ad::sub(y, ad::scale_rows(x, alpha));
  return ad::scale_rows(u, ad::arcosh_ratio(alpha));
}

Var transport_from_origin(const Var& x, const Var& b, const Var& k) {
  // PT_{o->x}(b) = b + <x,b>_L / (k + sqrt(k) x0) * (o + x)
  Var sk = ad::sqrt(k);
  Var x0 = ad::slice_cols(x, 0, 1);
  Var denom = ad::add_scalar(ad::mul_scalar(x0, sk), k);
  Var coef = ad::div(inner_rows(x, b), denom);
  Var o_plus_x = ad::concat_cols(ad::add_scalar(x0, sk), ad::slice_cols(x, 1, x.cols() - 1));
  return ad::add(b, ad::scale_rows(o_plus_x, coef));
}

Var distance_rows(const Var& x, const Var& y, const Var& k) {
  Var alpha = ad::scale(ad::mul_scalar(inner_rows(x, y), reciprocal(k)), -1.0);
  return ad::mul_scalar(ad::arcosh(alpha), ad::sqrt(k));
}

}  // namespace lorentz

// ---------------------------------------------------------------------------
// Model

namespace {

constexpr double kMaskedLogit = -1e30;

Var ones(Tape& t, std::size_t rows, std::size_t cols) { return t.constant(Tensor(rows, cols, 1.0)); }

Var activate(const Var& v, manifold::Activation act) {
  switch (act) {
    case manifold::Activation::kIdentity: return v;
    case manifold::Activation::kRelu: return ad::relu(v);
    case manifold::Activation::kLeakyRelu: return ad::leaky_relu(v, manifold::kLeakySlope);
    case manifold::Activation::kTanh: return ad::tanh(v);
  }
  return v;
}

// W (x) X for row points: exp_o(log_o(X) W^T).
Var hyp_matmul_rows(const Var& x, const Var& w, const Var& k) {
  return lorentz::expmap0(ad::matmul_bt(lorentz::logmap0(x, k), w), k);
}

// X (+) b for a 1 x (d+1) bias broadcast to every row.
Var hyp_bias_rows(const Var& x, const Var& b, const Var& k) {
  Tape& t = *x.tape();
  Var rows = ad::matmul(ones(t, x.rows(), 1), lorentz::to_origin_tangent(b));
  return lorentz::expmap(x, lorentz::transport_from_origin(x, rows, k), k);
}

Var graph_attention(const Model& m, const BoundParams& p, const SessionGraph& g, const Var& x, const Var& k,
                    Tensor& weights_out) {
  Tape& t = *x.tape();
  const std::size_t n = g.num_nodes();
  const std::size_t D = x.cols();
  const ModelParams& mp = m.params();

  Var attn;
  if (m.hyper().aggregator == Aggregator::kGcnMean) {
    Tensor w(n, n);
    for (std::size_t i = 0; i < n; ++i) {
      const auto& nb = g.neighborhood(i);
      for (const Neighbor& e : nb) w(i, e.node) = 1.0 / static_cast<double>(nb.size());
    }
    attn = t.constant(std::move(w));
  } else {
    Var tan = lorentz::logmap0(x, k);
    Var a_src = ad::matmul_bt(tan, ad::slice_cols(p[mp.attn_w], 0, D));
    Var a_dst = ad::matmul_bt(tan, ad::slice_cols(p[mp.attn_w], D, D));
    Var logits = ad::add(ad::matmul(a_src, ones(t, 1, n)), ad::matmul_bt(ones(t, n, 1), a_dst));
    logits = ad::add_scalar(logits, p[mp.attn_b]);
    Tensor bias(n, n, kMaskedLogit);
    for (std::size_t i = 0; i < n; ++i)
      for (const Neighbor& e : g.neighborhood(i)) bias(i, e.node) = std::log(static_cast<double>(e.weight));
    attn = ad::softmax_rows(ad::add(logits, t.constant(std::move(bias))));
  }
  weights_out = attn.value();

  std::vector<std::size_t> src, dst, flat;
  for (std::size_t i = 0; i < n; ++i) {
    for (const Neighbor& e : g.neighborhood(i)) {
      if (e.node == i) continue;  // log_{x_i}(x_i) = 0
      src.push_back(i);
      dst.push_back(e.node);
      flat.push_back(i * n + e.node);
    }
  }
  if (src.empty()) return x;
  Var xi = ad::gather_rows(x, src);
  Var xj = ad::gather_rows(x, dst);
  Var w = ad::gather_rows(ad::reshape(attn, n * n, 1), flat);
  Var msg = ad::scale_rows(lorentz::logmap(xi, xj, k), w);
  Var agg = ad::scatter_add_rows(msg, src, n);
  return lorentz::expmap(x, agg, k);
}

struct BlockOut {
  Var points;
  Var k;
};

BlockOut self_attention(const Model& m, const BoundParams& p, const ModelParams::Block& b, const Var& z,
                        const Var& k_in, Tensor& weights_out) {
  const double scale = 1.0 / std::sqrt(static_cast<double>(z.cols()));
  Var tan = lorentz::logmap0(z, k_in);
  Var q = ad::matmul(tan, p[b.wq]);
  Var kk = ad::matmul(tan, p[b.wk]);
  Var v = ad::matmul(tan, p[b.wv]);
  Var s = ad::softmax_rows(ad::scale(ad::matmul_bt(q, kk), scale));
  weights_out = s.value();
  Var f = lorentz::expmap0(ad::matmul(s, v), k_in);

  Var k_out = lorentz::curvature(p[b.kappa]);
  Var h = hyp_matmul_rows(f, p[b.w1], k_in);
  h = hyp_bias_rows(h, p[b.b1], k_in);
  h = lorentz::expmap0(activate(lorentz::logmap0(h, k_in), m.hyper().activation), k_out);
  h = hyp_matmul_rows(h, p[b.w2], k_out);
  h = hyp_bias_rows(h, p[b.b2], k_out);
  Var e = lorentz::expmap0(ad::add(lorentz::logmap0(h, k_out), lorentz::logmap0(f, k_in)), k_out);
  return {e, k_out};
}

}  // namespace

Model::Model(HyperParams hp, std::size_t catalog_size)
    : hp_(hp), catalog_size_(catalog_size), params_(hp, catalog_size) {
  hp_.validate();
  if (catalog_size == 0) throw std::invalid_argument("Model: empty catalog");
}

BoundParams Model::bind(Tape& tape) const {
  BoundParams b;
  b.vars.reserve(params_.count());
  for (ad::ParamId id = 0; id < params_.count(); ++id) b.vars.push_back(tape.parameter(id, params_[id]));
  return b;
}

ForwardVars Model::forward(Tape& tape, const BoundParams& p, std::span<const ItemId> session) const {
  if (session.empty()) throw std::invalid_argument("forward: empty session");
  if (session.size() > hp_.max_session_len) session = session.last(hp_.max_session_len);
  for (ItemId it : session) {
    if (it >= catalog_size_) {
      throw std::invalid_argument("forward: item " + std::to_string(it) + " outside catalog of " +
                                  std::to_string(catalog_size_));
    }
  }
  const SessionGraph g = build_graph(session);
  const std::size_t n = g.num_nodes();
  const std::size_t L = hp_.graph_layers;

  ForwardVars out;
  out.trace.nodes = g.nodes();

  std::vector<Var> ks;
  for (ad::ParamId id : params_.graph_kappa) ks.push_back(lorentz::curvature(p[id]));
  out.k0 = ks[0];

  std::vector<std::size_t> items(g.nodes().begin(), g.nodes().end());
  Var rows = ad::gather_rows(p[params_.embeddings], items);
  Var x = lorentz::expmap0(ad::concat_cols(tape.constant(Tensor(n, 1)), rows), ks[0]);

  std::vector<Var> layers{x};
  for (std::size_t l = 1; l <= L; ++l) {
    Var xin = lorentz::expmap0(lorentz::logmap0(layers.back(), ks[l - 1]), ks[l]);
    Tensor w;
    layers.push_back(graph_attention(*this, p, g, xin, ks[l], w));
    out.trace.graph.push_back(std::move(w));
  }

  Var z = layers[L];
  if (hp_.aggregator == Aggregator::kMultiHop) {
    Var alpha = ad::softmax_rows(p[params_.fusion]);
    Var acc = ad::mul_scalar(lorentz::logmap0(layers[0], ks[0]), ad::slice_cols(alpha, 0, 1));
    for (std::size_t l = 1; l <= L; ++l) {
      acc = ad::add(acc, ad::mul_scalar(lorentz::logmap0(layers[l], ks[l]), ad::slice_cols(alpha, l, 1)));
    }
    z = lorentz::expmap0(acc, ks[L]);
  }
  const Var& kz = ks[L];

  Var e = z;
  Var ke = kz;
  for (const auto& blk : params_.blocks) {
    Tensor w;
    BlockOut bo = self_attention(*this, p, blk, e, ke, w);
    out.trace.self.push_back(std::move(w));
    e = bo.points;
    ke = bo.k;
  }

  const std::size_t last = g.last_node();
  Var gate = ad::sigmoid(p[params_.gate]);
  Var long_term = lorentz::logmap0(ad::slice_rows(e, last, 1), ke);
  Var short_term = lorentz::logmap0(ad::slice_rows(z, last, 1), kz);
  out.o_vec = ad::add(ad::mul_scalar(long_term, gate), ad::sub(short_term, ad::mul_scalar(short_term, gate)));

  // log_o(embed(v)) is the stored tangent row itself.
  out.logits = ad::matmul_bt(ad::slice_cols(out.o_vec, 1, hp_.dim), p[params_.embeddings]);
  out.probs = ad::softmax_rows(out.logits);
  return out;
}

std::vector<double> Model::predict(std::span<const ItemId> session) const {
  AttentionTrace trace;
  return predict_traced(session, trace);
}

std::vector<double> Model::predict_traced(std::span<const ItemId> session, AttentionTrace& trace) const {
  Tape tape;
  BoundParams p = bind(tape);
  ForwardVars fv = forward(tape, p, session);
  trace = std::move(fv.trace);
  return fv.probs.value().data();
}

double Model::curvature(ad::ParamId kappa) const {
  return manifold::Curvature{params_[kappa].item()}.k();
}

double Model::embedding_curvature() const { return curvature(params_.graph_kappa[0]); }

manifold::LorentzPoint Model::embed(ItemId item) const {
  if (item >= catalog_size_) {
    throw std::invalid_argument("embed: item " + std::to_string(item) + " outside catalog of " +
                                std::to_string(catalog_size_));
  }
  const double k = embedding_curvature();
  const Tensor& e = params_[params_.embeddings];
  const manifold::TangentVector v = manifold::tangent_at_origin(e.row_span(item), k);
  return manifold::exp_map(v.base(), v);
}

}  // namespace hcgr
