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

#include "hcgr/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace hcgr {

std::vector<ItemId> ranked_items(std::span<const double> scores) {
  std::vector<ItemId> ids(scores.size());
  std::iota(ids.begin(), ids.end(), ItemId{0});
  std::stable_sort(ids.begin(), ids.end(), [&](ItemId a, ItemId b) { return scores[a] > scores[b]; });
  return ids;
}

std::size_t rank_of(std::span<const double> scores, ItemId target) {
  const double st = scores[target];
  std::size_t ahead = 0;
  for (std::size_t j = 0; j < scores.size(); ++j)
    if (scores[j] > st || (scores[j] == st && j < target)) ++ahead;
  return ahead + 1;
}

std::size_t rank_in(std::span<const ItemId> ranked, ItemId target) {
  auto it = std::find(ranked.begin(), ranked.end(), target);
  return static_cast<std::size_t>(it - ranked.begin()) + 1;
}

double hit_rate_from_rank(std::size_t rank, std::size_t k) { return rank <= k ? 1.0 : 0.0; }
double mrr_from_rank(std::size_t rank, std::size_t k) { return rank <= k ? 1.0 / static_cast<double>(rank) : 0.0; }
double ndcg_from_rank(std::size_t rank, std::size_t k) {
  return rank <= k ? 1.0 / std::log2(static_cast<double>(rank) + 1.0) : 0.0;
}

double hit_rate_at_k(std::span<const ItemId> ranked, ItemId target, std::size_t k) {
  return hit_rate_from_rank(rank_in(ranked, target), k);
}
double mrr_at_k(std::span<const ItemId> ranked, ItemId target, std::size_t k) {
  return mrr_from_rank(rank_in(ranked, target), k);
}
double ndcg_at_k(std::span<const ItemId> ranked, ItemId target, std::size_t k) {
  return ndcg_from_rank(rank_in(ranked, target), k);
}

}  // namespace hcgr
