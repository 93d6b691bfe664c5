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

#ifndef HCGR_MODEL_HPP_
#define HCGR_MODEL_HPP_

// The HCGR network.
//
//   session -> graph -> embed (exp_o) -> L x hyperbolic graph attention
//           -> multi-hop fusion -> J x hyperbolic self-attention + FFN
//           -> gated readout -> softmax over the catalog
//
// All trainable state is stored flat (tangent vectors at the origin, plain
// matrices, raw curvature logits); the hyperbolic structure enters only
// through exp_o / log_o inside forward().

#include <cstddef>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "hcgr/autodiff.hpp"
#include "hcgr/manifold.hpp"
#include "hcgr/session_graph.hpp"
#include "hcgr/tensor.hpp"

namespace hcgr {

enum class Aggregator { kMultiHop, kGatLastLayer, kGcnMean };

std::string to_string(Aggregator a);
Aggregator parse_aggregator(const std::string& s);
std::string to_string(manifold::Activation a);
manifold::Activation parse_activation(const std::string& s);

struct HyperParams {
  std::size_t dim = 128;            // d; points have d + 1 coordinates
  std::size_t graph_layers = 2;     // L
  std::size_t attention_blocks = 1; // J
  std::size_t max_session_len = 50;
  Aggregator aggregator = Aggregator::kMultiHop;
  manifold::Activation activation = manifold::Activation::kLeakyRelu;
  double init_std = 0.1;

  void validate() const;
  friend bool operator==(const HyperParams&, const HyperParams&) = default;
};

// Named flat parameter store. Ids are stable indices into the store.
class ModelParams {
 public:
  struct Block {
    ad::ParamId wq, wk, wv, w1, w2, b1, b2, kappa;
    friend bool operator==(const Block&, const Block&) = default;
  };

  ModelParams() = default;
  // Zero-initialised tensors of the right shapes.
  ModelParams(const HyperParams& hp, std::size_t catalog_size);

  // Gaussian N(0, init_std) for every entry; curvatures start at k = 1.
  void initialize(const HyperParams& hp, std::mt19937_64& rng);

  std::size_t count() const { return tensors_.size(); }
  Tensor& operator[](ad::ParamId id) { return tensors_[id]; }
  const Tensor& operator[](ad::ParamId id) const { return tensors_[id]; }
  const std::string& name(ad::ParamId id) const { return names_[id]; }
  std::optional<ad::ParamId> find(const std::string& name) const;
  bool is_curvature(ad::ParamId id) const;
  std::size_t scalar_count() const;

  ad::ParamId embeddings = 0;
  ad::ParamId attn_w = 0;
  ad::ParamId attn_b = 0;
  ad::ParamId fusion = 0;
  ad::ParamId gate = 0;
  std::vector<ad::ParamId> graph_kappa;  // L + 1 entries; [0] is the embedding curvature
  std::vector<Block> blocks;

  friend bool operator==(const ModelParams&, const ModelParams&) = default;

 private:
  ad::ParamId add(std::string name, std::size_t rows, std::size_t cols);

  std::vector<std::string> names_;
  std::vector<Tensor> tensors_;
};

// Per-pass attention weights, node-indexed (n x n, zero off the neighbourhood).
struct AttentionTrace {
  std::vector<ItemId> nodes;
  std::vector<Tensor> graph;  // one per graph layer
  std::vector<Tensor> self;   // one per self-attention block
};

// Everything a loss needs from one forward pass on a tape.
struct ForwardVars {
  ad::Var logits;  // 1 x |V|
  ad::Var probs;   // 1 x |V|
  ad::Var o_vec;   // 1 x (d+1), tangent at the origin, time coordinate 0
  ad::Var k0;      // embedding curvature
  AttentionTrace trace;
};

// Parameters bound to one tape.
struct BoundParams {
  std::vector<ad::Var> vars;
  const ad::Var& operator[](ad::ParamId id) const { return vars[id]; }
};

class Model {
 public:
  Model() = default;
  Model(HyperParams hp, std::size_t catalog_size);

  const HyperParams& hyper() const { return hp_; }
  std::size_t catalog_size() const { return catalog_size_; }
  ModelParams& params() { return params_; }
  const ModelParams& params() const { return params_; }

  void initialize(std::mt19937_64& rng) { params_.initialize(hp_, rng); }

  BoundParams bind(ad::Tape& tape) const;

  // Differentiable pass. Sessions longer than max_session_len keep the most
  // recent items.
  ForwardVars forward(ad::Tape& tape, const BoundParams& p, std::span<const ItemId> session) const;

  // Probability vector for one session.
  std::vector<double> predict(std::span<const ItemId> session) const;
  // Probabilities plus attention weights.
  std::vector<double> predict_traced(std::span<const ItemId> session, AttentionTrace& trace) const;

  // Hyperbolic point of an item under the embedding curvature.
  manifold::LorentzPoint embed(ItemId item) const;
  double embedding_curvature() const;
  double curvature(ad::ParamId kappa) const;

 private:
  HyperParams hp_;
  std::size_t catalog_size_ = 0;
  ModelParams params_;
};

// Differentiable Lorentz operations on row batches (one point per row).
// Shared by the model and the contrastive loss.
namespace lorentz {

// k = softplus(kappa_raw) + 1e-4
ad::Var curvature(const ad::Var& kappa_raw);
// <a_i, b_i>_L per row, n x 1.
ad::Var inner_rows(const ad::Var& a, const ad::Var& b);
// Zeroes the time coordinate.
ad::Var to_origin_tangent(const ad::Var& v);
ad::Var expmap0(const ad::Var& v, const ad::Var& k);
ad::Var logmap0(const ad::Var& x, const ad::Var& k);
ad::Var expmap(const ad::Var& x, const ad::Var& v, const ad::Var& k);
ad::Var logmap(const ad::Var& x, const ad::Var& y, const ad::Var& k);
// Parallel transport of origin-tangent rows b to the points x.
ad::Var transport_from_origin(const ad::Var& x, const ad::Var& b, const ad::Var& k);
// Row-wise geodesic distance, n x 1.
ad::Var distance_rows(const ad::Var& x, const ad::Var& y, const ad::Var& k);

}  // namespace lorentz

}  // namespace hcgr

#endif  // HCGR_MODEL_HPP_
