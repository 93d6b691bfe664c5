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

#ifndef HCGR_TRAINING_HPP_
#define HCGR_TRAINING_HPP_

// Joint loss, optimizer and training loop.
//
//   total = gamma * mean(CE) + beta * mean(margin) + l2 * sum ||theta||^2
//
// CE is binary cross-entropy over the whole catalog; the margin term compares
// hyperbolic distances from the session anchor exp_o(o_vec) to the target and
// to sampled negatives. Curvatures are excluded from the L2 term.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "hcgr/autodiff.hpp"
#include "hcgr/data.hpp"
#include "hcgr/eval.hpp"
#include "hcgr/manifold.hpp"
#include "hcgr/model.hpp"

namespace hcgr {

struct TrainConfig {
  double learning_rate = 0.001;
  double lr_decay = 0.5;
  std::size_t lr_decay_every = 3;
  double l2 = 3e-3;
  std::size_t batch_size = 128;
  std::size_t epochs = 30;
  std::size_t patience = 10;
  double gamma = 1.0;
  double beta = 0.1;
  double margin = 0.5;
  std::size_t negatives = 1;
  std::uint64_t seed = 0;
  std::size_t threads = 1;

  void validate() const;
};

inline constexpr double kProbClamp = 1e-12;

// Plain-value losses.
double cross_entropy_loss(std::span<const double> probs, ItemId target);
double contrastive_loss(const manifold::LorentzPoint& anchor, const manifold::LorentzPoint& positive,
                        const std::vector<manifold::LorentzPoint>& negatives, double margin);

// Tape versions. probs is 1 x |V|; anchor and positive are 1 x (d+1) points,
// negatives m x (d+1).
ad::Var cross_entropy_var(const ad::Var& probs, ItemId target);
ad::Var contrastive_var(const ad::Var& anchor, const ad::Var& positive, const ad::Var& negatives, const ad::Var& k,
                        double margin);

// gamma * CE + beta * margin term for one pair (no L2).
ad::Var example_loss(const Model& model, ad::Tape& tape, const BoundParams& p, const Example& ex,
                     std::span<const ItemId> negatives, const TrainConfig& cfg);

// Uniform draws (with replacement) from the catalog minus the session's items
// and the target. Empty when nothing is left to draw from.
std::vector<ItemId> sample_negatives(std::mt19937_64& rng, const Example& ex, std::size_t catalog_size,
                                     std::size_t count);

struct BatchGradient {
  double loss = 0.0;
  std::vector<Tensor> grads;  // indexed by parameter id
};

double l2_penalty(const ModelParams& p);

// total loss of a batch and, optionally, its gradient. Per-pair gradients are
// summed in pair order within each worker's contiguous chunk, and chunk sums
// in chunk order, so results depend only on the thread count.
BatchGradient batch_gradient(const Model& model, std::span<const Example> batch,
                             const std::vector<std::vector<ItemId>>& negatives, const TrainConfig& cfg,
                             bool with_grad = true);
double total_loss(const Model& model, std::span<const Example> batch,
                  const std::vector<std::vector<ItemId>>& negatives, const TrainConfig& cfg);

struct AdamState {
  std::vector<Tensor> m, v;
  std::uint64_t step = 0;
};

inline constexpr double kAdamBeta1 = 0.9;
inline constexpr double kAdamBeta2 = 0.999;
inline constexpr double kAdamEps = 1e-8;

// One Adam step. Embedding rows whose gradient is exactly zero are left
// untouched, moments included.
void adam_step(ModelParams& params, AdamState& state, const std::vector<Tensor>& grads, double lr);

// lr * decay^floor((epoch - 1) / every), epochs counted from 1.
double learning_rate_at(const TrainConfig& cfg, std::size_t epoch);

struct EpochStats {
  std::size_t epoch = 0;
  double loss = 0.0;  // pair-weighted mean of batch losses
  double lr = 0.0;
};

// Shuffles with an rng seeded by (seed, epoch), draws negatives on the calling
// thread, then steps once per batch. A non-finite loss raises NumericError
// naming the batch.
EpochStats train_epoch(Model& model, AdamState& state, const std::vector<Example>& train, const TrainConfig& cfg,
                       std::size_t epoch);

struct EpochRecord {
  std::size_t epoch = 0;
  double loss = 0.0;
  double lr = 0.0;
  RankingMetrics valid;
};

std::string format_epoch_line(const EpochRecord& r);

using Validator = std::function<RankingMetrics(const Model&)>;
using EpochCallback = std::function<void(const EpochRecord&)>;

// evaluate() on the split at K = 10, 20.
Validator split_validator(const std::vector<Example>& split, std::size_t threads = 1);

struct FitResult {
  std::size_t best_epoch = 0;  // 0: no epoch ran, the initial state is kept
  double best_valid_mrr20 = 0.0;
  std::size_t epochs_run = 0;
  bool stopped_early = false;
  std::vector<EpochRecord> history;
};

// Trains until cfg.epochs or until validation MRR@20 has not improved for
// cfg.patience epochs, then restores the best epoch's parameters.
FitResult fit(Model& model, const std::vector<Example>& train, const TrainConfig& cfg, const Validator& validate,
              const EpochCallback& on_epoch = {});

struct GradCheckReport {
  double max_rel_error = 0.0;
  std::string worst_param;
  std::size_t worst_index = 0;
  double analytic = 0.0;
  double numeric = 0.0;
  std::size_t checked = 0;
  bool passed = false;
};

// |a - n| / max(|a|, |n|, floor)
double relative_error(double analytic, double numeric, double floor = 1e-6);

// Central differences of `loss` over every scalar in `params` against `grad`.
GradCheckReport gradient_check(ModelParams& params, const std::function<double(const ModelParams&)>& loss,
                               const std::vector<Tensor>& grad, double h, double tol);

// The same for total_loss on a batch with fixed negatives.
GradCheckReport gradient_check(const Model& model, std::span<const Example> batch,
                               const std::vector<std::vector<ItemId>>& negatives, const TrainConfig& cfg, double h,
                               double tol);

}  // namespace hcgr

#endif  // HCGR_TRAINING_HPP_
