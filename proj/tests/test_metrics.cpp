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

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

#include "doctest.h"
#include "hcgr/eval.hpp"
#include "hcgr/metrics.hpp"

using namespace hcgr;

namespace {

// Definitions by direct scan of the top-K prefix.
double brute_hr(const std::vector<ItemId>& ranked, ItemId t, std::size_t k) {
  for (std::size_t i = 0; i < k && i < ranked.size(); ++i)
    if (ranked[i] == t) return 1.0;
  return 0.0;
}
double brute_mrr(const std::vector<ItemId>& ranked, ItemId t, std::size_t k) {
  for (std::size_t i = 0; i < k && i < ranked.size(); ++i)
    if (ranked[i] == t) return 1.0 / static_cast<double>(i + 1);
  return 0.0;
}
double brute_ndcg(const std::vector<ItemId>& ranked, ItemId t, std::size_t k) {
  double dcg = 0.0;
  for (std::size_t i = 0; i < k && i < ranked.size(); ++i)
    if (ranked[i] == t) dcg += 1.0 / std::log2(static_cast<double>(i) + 2.0);
  return dcg;
}

}  // namespace

TEST_CASE("hand-checked values") {
  const std::vector<ItemId> ranked{7, 3, 5, 1, 0, 2, 4, 6, 8, 9, 10, 11};
  CHECK(hit_rate_at_k(ranked, 7, 10) == 1.0);
  CHECK(hit_rate_at_k(ranked, 10, 10) == 0.0);
  CHECK(mrr_at_k(ranked, 1, 10) == 0.25);
  CHECK(mrr_at_k(ranked, 10, 10) == 0.0);
  CHECK(ndcg_at_k(ranked, 7, 10) == 1.0);
  CHECK(ndcg_at_k(ranked, 5, 10) == 0.5);
  CHECK(ndcg_at_k(ranked, 11, 10) == 0.0);
}

TEST_CASE("ties break by ascending id") {
  const std::vector<double> s{0.5, 0.9, 0.5, 0.1, 0.9};
  CHECK(ranked_items(s) == std::vector<ItemId>{1, 4, 0, 2, 3});
  for (ItemId t = 0; t < 5; ++t) CHECK(rank_of(s, t) == rank_in(ranked_items(s), t));
}

TEST_CASE("random score vectors agree with a sorted scan") {
  std::mt19937_64 rng(4);
  std::uniform_int_distribution<int> coarse(0, 3);
  for (int trial = 0; trial < 2000; ++trial) {
    std::vector<double> s(8);
    for (double& x : s) x = coarse(rng);  // many ties
    const std::vector<ItemId> ranked = ranked_items(s);
    for (ItemId t = 0; t < 8; ++t)
      for (std::size_t k : {1, 5, 8}) {
        const std::size_t r = rank_of(s, t);
        CHECK(hit_rate_from_rank(r, k) == brute_hr(ranked, t, k));
        CHECK(mrr_from_rank(r, k) == brute_mrr(ranked, t, k));
        CHECK(ndcg_from_rank(r, k) == brute_ndcg(ranked, t, k));
      }
  }
}

TEST_CASE("evaluate") {
  std::vector<Example> split;
  for (ItemId t = 0; t < 10; ++t) split.push_back({{0}, t});

  const Scorer perfect = [&](std::span<const ItemId>) { return std::vector<double>(10, 0.0); };
  const RankingMetrics uni = evaluate(perfect, split, {10, 20});
  CHECK(uni.hr.at(10) == 1.0);
  double want = 0.0;
  for (int r = 1; r <= 10; ++r) want += 1.0 / r;
  CHECK(uni.mrr.at(10) == doctest::Approx(want / 10).epsilon(1e-15));
  CHECK(uni.n == 10);

  std::size_t next = 0;
  std::vector<Example> one{{{1, 2}, 6}};
  const Scorer oracle = [&](std::span<const ItemId>) {
    std::vector<double> s(10, 0.0);
    s[one[next].target] = 1.0;
    return s;
  };
  const RankingMetrics m = evaluate(oracle, one, {1, 10});
  for (std::size_t k : {1, 10}) {
    CHECK(m.hr.at(k) == 1.0);
    CHECK(m.mrr.at(k) == 1.0);
    CHECK(m.ndcg.at(k) == 1.0);
  }
  CHECK_THROWS_AS(evaluate(oracle, {}, {10}), std::invalid_argument);
  CHECK_THROWS_AS(evaluate(oracle, one, {0}), std::invalid_argument);
}

TEST_CASE("metrics grow with K and are thread-count independent") {
  std::mt19937_64 rng(12);
  std::uniform_int_distribution<ItemId> item(0, 29);
  std::vector<Example> split(300);
  for (Example& e : split) {
    e.prefix = {item(rng), item(rng)};
    e.target = item(rng);
  }
  const Scorer hashy = [](std::span<const ItemId> p) {
    std::vector<double> s(30);
    for (std::size_t i = 0; i < 30; ++i) s[i] = std::sin(static_cast<double>(i * 7 + p[0] * 13 + p[1]));
    return s;
  };
  const RankingMetrics a = evaluate(hashy, split, {10, 20}, 1);
  const RankingMetrics b = evaluate(hashy, split, {10, 20}, 4);
  CHECK(a.hr == b.hr);
  CHECK(a.mrr == b.mrr);
  CHECK(a.ndcg == b.ndcg);
  CHECK(a.hr.at(20) >= a.hr.at(10));
  CHECK(a.mrr.at(20) >= a.mrr.at(10));
  CHECK(a.ndcg.at(20) >= a.ndcg.at(10));
}

TEST_CASE("popularity scorer") {
  const Scorer pop = popularity_scorer({3, 9, 1, 9});
  CHECK(ranked_items(pop(std::vector<ItemId>{0})) == std::vector<ItemId>{1, 3, 0, 2});
}

TEST_CASE("hierarchy report") {
  const std::vector<double> dist{0.4, 0.1, 0.3, 0.2, 0.8, 0.7, 0.6, 0.5};
  const std::vector<std::size_t> counts{4, 10, 6, 8, 1, 1, 2, 3};
  const auto rows = hierarchy_report(dist, counts);
  REQUIRE(rows.size() == 4);
  CHECK(rows[0].mean_interactions == 9.0);
  CHECK(rows[1].mean_interactions == 5.0);
  CHECK(rows[2].mean_interactions == 2.5);
  CHECK(rows[3].mean_interactions == 1.0);

  // Equal distances: split by id, every region holds 2 items.
  const auto flat = hierarchy_report(std::vector<double>(8, 1.0), counts);
  CHECK(flat[0].mean_interactions == 7.0);
  CHECK(flat[3].mean_interactions == 2.5);
  for (const auto& r : flat) CHECK(r.n_items == 2);
}
