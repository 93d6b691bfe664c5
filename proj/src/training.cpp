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

#include "hcgr/training.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <thread>

#include "hcgr/error.hpp"

namespace hcgr {

using ad::Tape;
using ad::Var;

void TrainConfig::validate() const {
  if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) throw std::invalid_argument("lr must be >= 0");
  if (!(lr_decay > 0.0)) throw std::invalid_argument("lr_decay must be > 0");
  if (lr_decay_every < 1) throw std::invalid_argument("lr_decay_every must be >= 1");
  if (!(l2 >= 0.0)) throw std::invalid_argument("l2 must be >= 0");
  if (batch_size < 1) throw std::invalid_argument("batch_size must be >= 1");
  if (patience < 1) throw std::invalid_argument("patience must be >= 1");
  if (!(gamma >= 0.0)) throw std::invalid_argument("gamma must be >= 0");
  if (!(beta >= 0.0)) throw std::invalid_argument("beta must be >= 0");
  if (!(margin >= 0.0)) throw std::invalid_argument("margin must be >= 0");
  if (beta > 0.0 && negatives < 1) throw std::invalid_argument("negatives must be >= 1 when beta > 0");
  if (threads < 1) throw std::invalid_argument("threads must be >= 1");
}

// ---------------------------------------------------------------------------
// Losses

double cross_entropy_loss(std::span<const double> probs, ItemId target) {
  if (target >= probs.size()) throw std::invalid_argument("cross_entropy_loss: target outside catalog");
  double loss = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    const double p = std::clamp(probs[i], kProbClamp, 1.0 - kProbClamp);
    loss -= i == target ? std::log(p) : std::log(1.0 - p);
  }
  return loss;
}

double contrastive_loss(const manifold::LorentzPoint& anchor, const manifold::LorentzPoint& positive,
                        const std::vector<manifold::LorentzPoint>& negatives, double margin) {
  if (negatives.empty()) throw std::invalid_argument("contrastive_loss: no negatives");
  const double dp = manifold::distance(anchor, positive);
  double loss = 0.0;
  for (const auto& n : negatives) loss += std::max(dp - manifold::distance(anchor, n) + margin, 0.0);
  return loss;
}

Var cross_entropy_var(const Var& probs, ItemId target) {
  if (probs.rows() != 1 || target >= probs.cols())
    throw std::invalid_argument("cross_entropy_var: target outside catalog");
  Tape& t = *probs.tape();
  Tensor hot(1, probs.cols(), 0.0);
  hot[target] = 1.0;
  Tensor cold(1, probs.cols(), 1.0);
  cold[target] = 0.0;
  Var p = ad::clamp(probs, kProbClamp, 1.0 - kProbClamp);
  Var lp = ad::log(p);
  Var lq = ad::log(ad::add_const(ad::scale(p, -1.0), 1.0));
  Var ll = ad::add(ad::mul(lp, t.constant(std::move(hot))), ad::mul(lq, t.constant(std::move(cold))));
  return ad::scale(ad::sum(ll), -1.0);
}

Var contrastive_var(const Var& anchor, const Var& positive, const Var& negatives, const Var& k, double margin) {
  if (negatives.rows() == 0) throw std::invalid_argument("contrastive_var: no negatives");
  Tape& t = *anchor.tape();
  Var dp = lorentz::distance_rows(anchor, positive, k);
  Var rep = ad::matmul(t.constant(Tensor(negatives.rows(), 1, 1.0)), anchor);
  Var dn = lorentz::distance_rows(rep, negatives, k);
  Var hinge = ad::relu(ad::add_scalar(ad::scale(dn, -1.0), ad::add_const(dp, margin)));
  return ad::sum(hinge);
}

namespace {

// Origin-tangent rows for the given items: [0 | embedding row].
Var item_tangents(Tape& t, const BoundParams& p, const ModelParams& mp, std::span<const ItemId> items) {
  std::vector<std::size_t> idx(items.begin(), items.end());
  return ad::concat_cols(t.constant(Tensor(idx.size(), 1)), ad::gather_rows(p[mp.embeddings], idx));
}

}  // namespace

Var example_loss(const Model& model, Tape& tape, const BoundParams& p, const Example& ex,
                 std::span<const ItemId> negatives, const TrainConfig& cfg) {
  const ForwardVars fv = model.forward(tape, p, ex.prefix);
  Var loss = ad::scale(cross_entropy_var(fv.probs, ex.target), cfg.gamma);
  if (cfg.beta > 0.0 && !negatives.empty()) {
    const ModelParams& mp = model.params();
    Var anchor = lorentz::expmap0(fv.o_vec, fv.k0);
    const ItemId tgt[] = {ex.target};
    Var pos = lorentz::expmap0(item_tangents(tape, p, mp, tgt), fv.k0);
    Var neg = lorentz::expmap0(item_tangents(tape, p, mp, negatives), fv.k0);
    loss = ad::add(loss, ad::scale(contrastive_var(anchor, pos, neg, fv.k0, cfg.margin), cfg.beta));
  }
  return loss;
}

std::vector<ItemId> sample_negatives(std::mt19937_64& rng, const Example& ex, std::size_t catalog_size,
                                     std::size_t count) {
  std::vector<ItemId> banned(ex.prefix.begin(), ex.prefix.end());
  banned.push_back(ex.target);
  std::sort(banned.begin(), banned.end());
  banned.erase(std::unique(banned.begin(), banned.end()), banned.end());
  while (!banned.empty() && banned.back() >= catalog_size) banned.pop_back();
  const std::size_t free = catalog_size - banned.size();
  std::vector<ItemId> out;
  if (free == 0) return out;
  std::uniform_int_distribution<std::size_t> pick(0, free - 1);
  for (std::size_t i = 0; i < count; ++i) {
    // r-th allowed id: skip every banned id at or below the running candidate.
    std::size_t v = pick(rng);
    for (ItemId b : banned) {
      if (b <= v) ++v;
      else break;
    }
    out.push_back(static_cast<ItemId>(v));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Batch loss and gradient

double l2_penalty(const ModelParams& p) {
  double s = 0.0;
  for (ad::ParamId id = 0; id < p.count(); ++id) {
    if (p.is_curvature(id)) continue;
    for (double x : p[id].data()) s += x * x;
  }
  return s;
}

namespace {

struct Partial {
  std::vector<double> losses;
  std::vector<Tensor> grads;
};

void add_into(std::vector<Tensor>& acc, const std::vector<Tensor>& g) {
  for (std::size_t id = 0; id < g.size(); ++id) {
    auto& a = acc[id].data();
    const auto& b = g[id].data();
    for (std::size_t i = 0; i < a.size(); ++i) a[i] += b[i];
  }
}

std::vector<Tensor> zeros_like(const ModelParams& p) {
  std::vector<Tensor> z;
  z.reserve(p.count());
  for (ad::ParamId id = 0; id < p.count(); ++id) z.emplace_back(p[id].rows(), p[id].cols());
  return z;
}

}  // namespace

BatchGradient batch_gradient(const Model& model, std::span<const Example> batch,
                             const std::vector<std::vector<ItemId>>& negatives, const TrainConfig& cfg,
                             bool with_grad) {
  if (batch.empty()) throw std::invalid_argument("batch_gradient: empty batch");
  if (negatives.size() != batch.size()) throw std::invalid_argument("batch_gradient: one negative list per pair");
  const ModelParams& mp = model.params();
  const std::size_t n = batch.size();
  const std::size_t workers = std::max<std::size_t>(1, std::min(cfg.threads, n));

  std::vector<double> losses(n);
  std::vector<std::vector<Tensor>> chunk_grads(workers);
  std::vector<std::exception_ptr> errors(workers);
  auto run = [&](std::size_t w) {
    try {
      if (with_grad) chunk_grads[w] = zeros_like(mp);
      for (std::size_t i = n * w / workers; i < n * (w + 1) / workers; ++i) {
        Tape tape;
        const BoundParams p = model.bind(tape);
        const Var loss = example_loss(model, tape, p, batch[i], negatives[i], cfg);
        losses[i] = loss.value().item();
        if (!with_grad) continue;
        ad::Gradients g = tape.backward(loss);
        for (auto& [id, t] : g.all()) {
          auto& a = chunk_grads[w][id].data();
          const auto& b = t.data();
          for (std::size_t j = 0; j < a.size(); ++j) a[j] += b[j];
        }
      }
    } catch (...) {
      errors[w] = std::current_exception();
    }
  };
  if (workers == 1) {
    run(0);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(run, w);
    for (auto& th : pool) th.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);

  BatchGradient out;
  const double inv = 1.0 / static_cast<double>(n);
  for (double l : losses) out.loss += l;
  out.loss = out.loss * inv + cfg.l2 * l2_penalty(mp);
  if (!with_grad) return out;
  out.grads = std::move(chunk_grads[0]);
  for (std::size_t w = 1; w < workers; ++w) add_into(out.grads, chunk_grads[w]);
  for (ad::ParamId id = 0; id < mp.count(); ++id) {
    auto& g = out.grads[id].data();
    const auto& theta = mp[id].data();
    const bool decay = cfg.l2 > 0.0 && !mp.is_curvature(id);
    for (std::size_t j = 0; j < g.size(); ++j) {
      g[j] *= inv;
      if (decay) g[j] += 2.0 * cfg.l2 * theta[j];
    }
  }
  return out;
}

double total_loss(const Model& model, std::span<const Example> batch,
                  const std::vector<std::vector<ItemId>>& negatives, const TrainConfig& cfg) {
  return batch_gradient(model, batch, negatives, cfg, false).loss;
}

// ---------------------------------------------------------------------------
// Optimizer

void adam_step(ModelParams& params, AdamState& st, const std::vector<Tensor>& grads, double lr) {
  if (grads.size() != params.count()) throw std::invalid_argument("adam_step: gradient count mismatch");
  if (st.m.empty()) {
    st.m = zeros_like(params);
    st.v = zeros_like(params);
  }
  ++st.step;
  const double t = static_cast<double>(st.step);
  const double c1 = 1.0 - std::pow(kAdamBeta1, t);
  const double c2 = 1.0 - std::pow(kAdamBeta2, t);
  for (ad::ParamId id = 0; id < params.count(); ++id) {
    Tensor& theta = params[id];
    const Tensor& g = grads[id];
    Tensor& m = st.m[id];
    Tensor& v = st.v[id];
    const std::size_t cols = theta.cols();
    const bool lazy_rows = id == params.embeddings;
    for (std::size_t r = 0; r < theta.rows(); ++r) {
      if (lazy_rows) {
        bool touched = false;
        for (std::size_t c = 0; c < cols && !touched; ++c) touched = g(r, c) != 0.0;
        if (!touched) continue;
      }
      for (std::size_t c = 0; c < cols; ++c) {
        const double gi = g(r, c);
        double& mi = m(r, c);
        double& vi = v(r, c);
        mi = kAdamBeta1 * mi + (1.0 - kAdamBeta1) * gi;
        vi = kAdamBeta2 * vi + (1.0 - kAdamBeta2) * gi * gi;
        theta(r, c) -= lr * (mi / c1) / (std::sqrt(vi / c2) + kAdamEps);
      }
    }
  }
}

double learning_rate_at(const TrainConfig& cfg, std::size_t epoch) {
  const std::size_t halvings = epoch == 0 ? 0 : (epoch - 1) / cfg.lr_decay_every;
  return cfg.learning_rate * std::pow(cfg.lr_decay, static_cast<double>(halvings));
}

// ---------------------------------------------------------------------------
// Training loop

EpochStats train_epoch(Model& model, AdamState& state, const std::vector<Example>& train, const TrainConfig& cfg,
                       std::size_t epoch) {
  cfg.validate();
  if (train.empty()) throw std::invalid_argument("train_epoch: empty training split");
  std::seed_seq seq{static_cast<std::uint32_t>(cfg.seed), static_cast<std::uint32_t>(cfg.seed >> 32),
                    static_cast<std::uint32_t>(epoch)};
  std::mt19937_64 rng(seq);
  std::vector<std::size_t> order(train.size());
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);

  EpochStats st;
  st.epoch = epoch;
  st.lr = learning_rate_at(cfg, epoch);
  double weighted = 0.0;
  std::size_t batch_index = 0;
  for (std::size_t start = 0; start < order.size(); start += cfg.batch_size, ++batch_index) {
    const std::size_t end = std::min(order.size(), start + cfg.batch_size);
    std::vector<Example> batch;
    std::vector<std::vector<ItemId>> negs;
    for (std::size_t i = start; i < end; ++i) {
      batch.push_back(train[order[i]]);
      negs.push_back(cfg.beta > 0.0 ? sample_negatives(rng, batch.back(), model.catalog_size(), cfg.negatives)
                                    : std::vector<ItemId>{});
    }
    BatchGradient bg;
    try {
      bg = batch_gradient(model, batch, negs, cfg);
    } catch (const NumericError& e) {
      throw NumericError("epoch " + std::to_string(epoch) + " batch " + std::to_string(batch_index) + ": " +
                         e.what());
    }
    if (!std::isfinite(bg.loss)) {
      throw NumericError("epoch " + std::to_string(epoch) + " batch " + std::to_string(batch_index) +
                         ": non-finite loss");
    }
    weighted += bg.loss * static_cast<double>(batch.size());
    adam_step(model.params(), state, bg.grads, st.lr);
  }
  st.loss = weighted / static_cast<double>(train.size());
  return st;
}

std::string format_epoch_line(const EpochRecord& r) {
  auto get = [](const std::map<std::size_t, double>& m) {
    auto it = m.find(20);
    return it == m.end() ? 0.0 : it->second;
  };
  char buf[256];
  std::snprintf(buf, sizeof buf, "epoch=%zu loss=%.6f val_hr20=%.6f val_mrr20=%.6f val_ndcg20=%.6f lr=%.8f", r.epoch,
                r.loss, get(r.valid.hr), get(r.valid.mrr), get(r.valid.ndcg), r.lr);
  return buf;
}

Validator split_validator(const std::vector<Example>& split, std::size_t threads) {
  return [&split, threads](const Model& m) { return evaluate(model_scorer(m), split, {10, 20}, threads); };
}

FitResult fit(Model& model, const std::vector<Example>& train, const TrainConfig& cfg, const Validator& validate,
              const EpochCallback& on_epoch) {
  cfg.validate();
  if (train.empty()) throw std::invalid_argument("fit: empty training split");
  if (!validate) throw std::invalid_argument("fit: no validator");
  FitResult res;
  AdamState state;
  ModelParams best = model.params();
  double best_mrr = -std::numeric_limits<double>::infinity();
  std::size_t stale = 0;
  for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    const EpochStats es = train_epoch(model, state, train, cfg, epoch);
    EpochRecord rec{epoch, es.loss, es.lr, validate(model)};
    const auto it = rec.valid.mrr.find(20);
    if (it == rec.valid.mrr.end()) throw std::invalid_argument("fit: validator must report MRR@20");
    res.history.push_back(rec);
    res.epochs_run = epoch;
    if (on_epoch) on_epoch(rec);
    if (it->second > best_mrr) {
      best_mrr = it->second;
      best = model.params();
      res.best_epoch = epoch;
      stale = 0;
    } else if (++stale >= cfg.patience) {
      res.stopped_early = epoch < cfg.epochs;
      break;
    }
  }
  if (res.best_epoch > 0) {
    model.params() = std::move(best);
    res.best_valid_mrr20 = best_mrr;
  }
  return res;
}

// ---------------------------------------------------------------------------
// Gradient verification

double relative_error(double a, double n, double floor) {
  return std::abs(a - n) / std::max({std::abs(a), std::abs(n), floor});
}

GradCheckReport gradient_check(ModelParams& params, const std::function<double(const ModelParams&)>& loss,
                               const std::vector<Tensor>& grad, double h, double tol) {
  if (grad.size() != params.count()) throw std::invalid_argument("gradient_check: gradient count mismatch");
  GradCheckReport rep;
  for (ad::ParamId id = 0; id < params.count(); ++id) {
    Tensor& theta = params[id];
    for (std::size_t j = 0; j < theta.size(); ++j) {
      const double orig = theta[j];
      theta[j] = orig + h;
      const double fp = loss(params);
      theta[j] = orig - h;
      const double fm = loss(params);
      theta[j] = orig;
      const double num = (fp - fm) / (2.0 * h);
      const double err = relative_error(grad[id][j], num);
      ++rep.checked;
      if (err > rep.max_rel_error || rep.worst_param.empty()) {
        rep.max_rel_error = err;
        rep.worst_param = params.name(id);
        rep.worst_index = j;
        rep.analytic = grad[id][j];
        rep.numeric = num;
      }
    }
  }
  rep.passed = rep.max_rel_error < tol;
  return rep;
}

GradCheckReport gradient_check(const Model& model, std::span<const Example> batch,
                               const std::vector<std::vector<ItemId>>& negatives, const TrainConfig& cfg, double h,
                               double tol) {
  const BatchGradient bg = batch_gradient(model, batch, negatives, cfg);
  Model probe = model;
  return gradient_check(
      probe.params(),
      [&](const ModelParams&) { return total_loss(probe, batch, negatives, cfg); }, bg.grads, h, tol);
}

}  // namespace hcgr
