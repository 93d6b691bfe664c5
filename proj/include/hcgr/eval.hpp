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

#ifndef HCGR_EVAL_HPP_
#define HCGR_EVAL_HPP_

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "hcgr/data.hpp"
#include "hcgr/model.hpp"

namespace hcgr {

struct RankingMetrics {
  std::vector<std::size_t> ks;
  std::map<std::size_t, double> hr, ndcg, mrr;
  std::size_t n = 0;
};

// Scores over the whole catalog for one session prefix.
using Scorer = std::function<std::vector<double>(std::span<const ItemId>)>;

Scorer model_scorer(const Model& model);
// Scores every item by its interaction count.
Scorer popularity_scorer(std::vector<std::size_t> counts);

// Ranks the full catalog for every pair. Per-pair work is spread over
// `threads` workers; means are accumulated in pair order so the result does
// not depend on the thread count.
RankingMetrics evaluate(const Scorer& scorer, const std::vector<Example>& split, const std::vector<std::size_t>& ks,
                        std::size_t threads = 1);

struct HierarchyRow {
  std::size_t region = 0;  // 1 = nearest the origin
  std::size_t n_items = 0;
  double mean_interactions = 0.0;
  double mean_distance = 0.0;
};

// Four equal-population regions by distance to the origin (ties by id).
std::vector<HierarchyRow> hierarchy_report(const std::vector<double>& dist_to_origin,
                                           const std::vector<std::size_t>& counts);
std::vector<double> distances_to_origin(const Model& model);

void write_metrics_csv(std::ostream& out, const std::string& split, const RankingMetrics& m, bool header = true);
void write_hierarchy_csv(std::ostream& out, const std::vector<HierarchyRow>& rows);
void write_embeddings_csv(std::ostream& out, const Model& model, const std::vector<std::size_t>& counts);

struct SessionTrace {
  std::size_t session = 0;
  AttentionTrace trace;
};
// Rows: session,kind,layer,src_item,dst_item,weight (graph rows list only
// neighbourhood entries).
void write_attention_csv(std::ostream& out, const std::vector<SessionTrace>& traces);

}  // namespace hcgr

#endif  // HCGR_EVAL_HPP_
