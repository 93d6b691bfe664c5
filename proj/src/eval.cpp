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

#include "hcgr/eval.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <thread>

#include "hcgr/metrics.hpp"

namespace hcgr {

namespace {

std::string fmt(double x, int prec = 8) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", prec, x);
  return buf;
}

// Runs body(i) for i in [0, n) over contiguous chunks.
template <typename F>
void parallel_for(std::size_t n, std::size_t threads, F body) {
  threads = std::max<std::size_t>(1, std::min(threads, n));
  if (threads == 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(threads);
  for (std::size_t t = 0; t < threads; ++t) {
    pool.emplace_back([&, t] {
      try {
        for (std::size_t i = n * t / threads; i < n * (t + 1) / threads; ++i) body(i);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace

Scorer model_scorer(const Model& model) {
  return [&model](std::span<const ItemId> s) { return model.predict(s); };
}

Scorer popularity_scorer(std::vector<std::size_t> counts) {
  std::vector<double> scores(counts.begin(), counts.end());
  return [scores](std::span<const ItemId>) { return scores; };
}

RankingMetrics evaluate(const Scorer& scorer, const std::vector<Example>& split, const std::vector<std::size_t>& ks,
                        std::size_t threads) {
  if (split.empty()) throw std::invalid_argument("evaluate: empty split");
  if (ks.empty()) throw std::invalid_argument("evaluate: no cutoffs");
  for (std::size_t k : ks)
    if (k == 0) throw std::invalid_argument("evaluate: K must be >= 1");
  std::vector<std::size_t> ranks(split.size());
  parallel_for(split.size(), threads, [&](std::size_t i) {
    const std::vector<double> scores = scorer(split[i].prefix);
    if (split[i].target >= scores.size()) throw std::invalid_argument("evaluate: target outside catalog");
    ranks[i] = rank_of(scores, split[i].target);
  });

  RankingMetrics m;
  m.ks = ks;
  m.n = split.size();
  const double n = static_cast<double>(split.size());
  for (std::size_t k : ks) {
    double hr = 0.0, nd = 0.0, rr = 0.0;
    for (std::size_t r : ranks) {
      hr += hit_rate_from_rank(r, k);
      nd += ndcg_from_rank(r, k);
      rr += mrr_from_rank(r, k);
    }
    m.hr[k] = hr / n;
    m.ndcg[k] = nd / n;
    m.mrr[k] = rr / n;
  }
  return m;
}

std::vector<HierarchyRow> hierarchy_report(const std::vector<double>& dist, const std::vector<std::size_t>& counts) {
  if (dist.size() != counts.size()) throw std::invalid_argument("hierarchy_report: size mismatch");
  const std::size_t n = dist.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return dist[a] < dist[b]; });
  std::vector<HierarchyRow> rows(4);
  for (std::size_t r = 0; r < 4; ++r) {
    HierarchyRow& row = rows[r];
    row.region = r + 1;
    const std::size_t lo = n * r / 4, hi = n * (r + 1) / 4;
    row.n_items = hi - lo;
    if (row.n_items == 0) continue;
    double c = 0.0, d = 0.0;
    for (std::size_t i = lo; i < hi; ++i) {
      c += static_cast<double>(counts[order[i]]);
      d += dist[order[i]];
    }
    row.mean_interactions = c / static_cast<double>(row.n_items);
    row.mean_distance = d / static_cast<double>(row.n_items);
  }
  return rows;
}

std::vector<double> distances_to_origin(const Model& model) {
  const double k = model.embedding_curvature();
  const std::size_t dim = model.hyper().dim + 1;
  const manifold::LorentzPoint o = manifold::origin(dim, k);
  std::vector<double> out(model.catalog_size());
  for (std::size_t v = 0; v < out.size(); ++v) out[v] = manifold::distance(o, model.embed(static_cast<ItemId>(v)));
  return out;
}

void write_metrics_csv(std::ostream& out, const std::string& split, const RankingMetrics& m, bool header) {
  if (header) out << "split,K,hit_rate,ndcg,mrr,n\n";
  for (std::size_t k : m.ks) {
    out << split << ',' << k << ',' << fmt(m.hr.at(k)) << ',' << fmt(m.ndcg.at(k)) << ',' << fmt(m.mrr.at(k)) << ','
        << m.n << '\n';
  }
}

void write_hierarchy_csv(std::ostream& out, const std::vector<HierarchyRow>& rows) {
  out << "region,n_items,mean_interactions,mean_dist_to_origin\n";
  for (const HierarchyRow& r : rows)
    out << r.region << ',' << r.n_items << ',' << fmt(r.mean_interactions, 6) << ',' << fmt(r.mean_distance, 10)
        << '\n';
}

void write_embeddings_csv(std::ostream& out, const Model& model, const std::vector<std::size_t>& counts) {
  if (counts.size() != model.catalog_size()) throw std::invalid_argument("write_embeddings_csv: size mismatch");
  const std::size_t D = model.hyper().dim + 1;
  out << "item_id,interaction_count,dist_to_origin";
  for (std::size_t c = 1; c <= D; ++c) out << ",c" << c;
  out << '\n';
  const std::vector<double> dist = distances_to_origin(model);
  for (std::size_t v = 0; v < counts.size(); ++v) {
    const manifold::LorentzPoint x = model.embed(static_cast<ItemId>(v));
    out << v << ',' << counts[v] << ',' << fmt(dist[v], 12);
    for (double c : x.coords()) out << ',' << fmt(c, 12);
    out << '\n';
  }
}

void write_attention_csv(std::ostream& out, const std::vector<SessionTrace>& traces) {
  out << "session,kind,layer,src_item,dst_item,weight\n";
  for (const SessionTrace& st : traces) {
    const auto& nodes = st.trace.nodes;
    auto emit = [&](const char* kind, std::size_t layer, const Tensor& w, bool skip_zero) {
      for (std::size_t i = 0; i < w.rows(); ++i)
        for (std::size_t j = 0; j < w.cols(); ++j) {
          if (skip_zero && w(i, j) == 0.0) continue;
          out << st.session << ',' << kind << ',' << layer << ',' << nodes[i] << ',' << nodes[j] << ','
              << fmt(w(i, j), 12) << '\n';
        }
    };
    for (std::size_t l = 0; l < st.trace.graph.size(); ++l) emit("graph", l + 1, st.trace.graph[l], true);
    for (std::size_t b = 0; b < st.trace.self.size(); ++b) emit("self", b + 1, st.trace.self[b], false);
  }
}

}  // namespace hcgr
