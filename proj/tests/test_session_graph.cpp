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

#include <map>
#include <random>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "hcgr/session_graph.hpp"

using namespace hcgr;

namespace {

using Edges = SessionGraph::EdgeMap;

SessionGraph graph_of(const std::vector<ItemId>& s) { return build_graph(s); }

}  // namespace

TEST_CASE("single click gives one node with a self-loop") {
  const SessionGraph g = graph_of({42});
  CHECK(g.nodes() == std::vector<ItemId>{42});
  CHECK(g.last_node() == 0);
  CHECK(g.edges() == Edges{{{0, 0}, 1}});
  CHECK(g.neighborhood(0) == std::vector<Neighbor>{{0, 1}});
}

TEST_CASE("revisit session") {
  // v1=10, v2=20, v3=30
  const SessionGraph g = graph_of({10, 20, 30, 20});
  CHECK(g.nodes() == std::vector<ItemId>{10, 20, 30});
  CHECK(g.last_node() == 1);
  const Edges want{{{0, 1}, 1}, {{1, 2}, 1}, {{2, 1}, 1}, {{0, 0}, 1}, {{1, 1}, 1}, {{2, 2}, 1}};
  CHECK(g.edges() == want);
  CHECK(g.neighborhood(1) == std::vector<Neighbor>{{0, 1}, {1, 1}, {2, 2}});
}

TEST_CASE("alternating pair") {
  const SessionGraph g = graph_of({1, 2, 1, 2});
  const Edges want{{{0, 1}, 2}, {{1, 0}, 1}, {{0, 0}, 1}, {{1, 1}, 1}};
  CHECK(g.edges() == want);
  CHECK(g.last_node() == 1);
}

TEST_CASE("consecutive repeats increment the self-loop") {
  const SessionGraph g = graph_of({5, 5, 5, 6});
  CHECK(g.edge_weight(0, 0) == 2);
  CHECK(g.edge_weight(1, 1) == 1);
  CHECK(g.edge_weight(0, 1) == 1);
  CHECK(g.edge_weight(1, 0) == 0);
}

TEST_CASE("errors") {
  CHECK_THROWS_AS(graph_of({}), std::invalid_argument);
  const SessionGraph g = graph_of({1, 2});
  CHECK_THROWS_AS(g.neighborhood(2), std::invalid_argument);
}

TEST_CASE("random sessions: transitions, symmetry, purity") {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int> len(1, 50), item(0, 11);
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<ItemId> s(len(rng));
    for (ItemId& v : s) v = static_cast<ItemId>(item(rng));
    const SessionGraph g = build_graph(s);
    CHECK(g == build_graph(s));
    REQUIRE(g.num_nodes() <= s.size());
    CHECK(g.nodes()[g.last_node()] == s.back());

    // Oracle: consecutive-pair multiset over item ids.
    std::map<std::pair<ItemId, ItemId>, std::uint32_t> pairs;
    std::uint32_t repeats = 0;
    for (std::size_t t = 0; t + 1 < s.size(); ++t) {
      ++pairs[{s[t], s[t + 1]}];
      if (s[t] == s[t + 1]) ++repeats;
    }
    std::uint32_t cross = 0;
    for (const auto& [e, w] : g.edges()) {
      const ItemId a = g.nodes()[e.first], b = g.nodes()[e.second];
      CHECK(w >= 1);
      if (a != b) {
        CHECK(pairs[{a, b}] == w);
        cross += w;
      } else {
        const std::uint32_t observed = pairs.count({a, a}) ? pairs[{a, a}] : 0;
        CHECK(w == std::max<std::uint32_t>(observed, 1));
      }
    }
    for (const auto& [p, w] : pairs)
      if (p.first != p.second) CHECK(w > 0);
    CHECK(cross + repeats == s.size() - 1);

    for (std::size_t i = 0; i < g.num_nodes(); ++i) {
      CHECK(g.edge_weight(i, i) >= 1);
      bool has_self = false;
      std::size_t prev = 0;
      bool first = true;
      for (const Neighbor& nb : g.neighborhood(i)) {
        if (!first) CHECK(nb.node > prev);
        first = false;
        prev = nb.node;
        if (nb.node == i) {
          has_self = true;
          CHECK(nb.weight == g.edge_weight(i, i));
        } else {
          CHECK(nb.weight == g.edge_weight(i, nb.node) + g.edge_weight(nb.node, i));
        }
        bool mirrored = false;
        for (const Neighbor& back : g.neighborhood(nb.node))
          if (back.node == i) mirrored = back.weight == nb.weight;
        CHECK(mirrored);
      }
      CHECK(has_self);
    }
  }
}
