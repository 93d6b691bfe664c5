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

#include "hcgr/session_graph.hpp"

#include <stdexcept>
#include <string>
#include <unordered_map>

namespace hcgr {

std::uint32_t SessionGraph::edge_weight(std::size_t src, std::size_t dst) const {
  auto it = edges_.find({src, dst});
  return it == edges_.end() ? 0 : it->second;
}

const std::vector<Neighbor>& SessionGraph::neighborhood(std::size_t i) const {
  if (i >= neighbors_.size()) {
    throw std::invalid_argument("neighborhood: node " + std::to_string(i) + " out of range (" +
                                std::to_string(neighbors_.size()) + " nodes)");
  }
  return neighbors_[i];
}

SessionGraph build_graph(std::span<const ItemId> session) {
  if (session.empty()) throw std::invalid_argument("build_graph: empty session");
  SessionGraph g;
  std::unordered_map<ItemId, std::size_t> index;
  std::vector<std::size_t> pos(session.size());
  for (std::size_t t = 0; t < session.size(); ++t) {
    auto [it, inserted] = index.try_emplace(session[t], g.nodes_.size());
    if (inserted) g.nodes_.push_back(session[t]);
    pos[t] = it->second;
  }
  g.last_ = pos.back();
  for (std::size_t t = 0; t + 1 < session.size(); ++t) ++g.edges_[{pos[t], pos[t + 1]}];
  for (std::size_t i = 0; i < g.nodes_.size(); ++i) g.edges_.try_emplace({i, i}, 1u);

  const std::size_t n = g.nodes_.size();
  std::vector<std::map<std::size_t, std::uint32_t>> acc(n);
  for (const auto& [e, w] : g.edges_) {
    const auto [s, d] = e;
    acc[s][d] += w;
    if (s != d) acc[d][s] += w;
  }
  g.neighbors_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (const auto& [j, w] : acc[i]) g.neighbors_[i].push_back(Neighbor{j, w});
  }
  return g;
}

}  // namespace hcgr
