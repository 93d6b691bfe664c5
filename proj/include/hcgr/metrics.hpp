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

#ifndef HCGR_METRICS_HPP_
#define HCGR_METRICS_HPP_

// Top-K ranking metrics for a single relevant item. Ranks are 1-based; equal
// scores are ordered by ascending item id.

#include <cstddef>
#include <span>
#include <vector>

#include "hcgr/session_graph.hpp"

namespace hcgr {

// Catalog ordered by descending score.
std::vector<ItemId> ranked_items(std::span<const double> scores);
// Position of target in ranked_items(scores) without sorting.
std::size_t rank_of(std::span<const double> scores, ItemId target);
// Position of target in an explicit ranking; ranked.size() + 1 if absent.
std::size_t rank_in(std::span<const ItemId> ranked, ItemId target);

double hit_rate_from_rank(std::size_t rank, std::size_t k);
double mrr_from_rank(std::size_t rank, std::size_t k);
double ndcg_from_rank(std::size_t rank, std::size_t k);

double hit_rate_at_k(std::span<const ItemId> ranked, ItemId target, std::size_t k);
double mrr_at_k(std::span<const ItemId> ranked, ItemId target, std::size_t k);
double ndcg_at_k(std::span<const ItemId> ranked, ItemId target, std::size_t k);

}  // namespace hcgr

#endif  // HCGR_METRICS_HPP_
