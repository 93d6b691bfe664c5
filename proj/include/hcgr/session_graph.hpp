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

#ifndef HCGR_SESSION_GRAPH_HPP_
#define HCGR_SESSION_GRAPH_HPP_

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <utility>
#include <vector>

namespace hcgr {

using ItemId = std::uint32_t;

struct Neighbor {
  std::size_t node = 0;
  std::uint32_t weight = 0;

  friend bool operator==(const Neighbor&, const Neighbor&) = default;
};

// Weighted directed graph of one click session. Nodes are the unique items in
// first-occurrence order; edge weights count observed transitions, and every
// node carries a self-loop (weight >= 1).
class SessionGraph {
 public:
  using EdgeMap = std::map<std::pair<std::size_t, std::size_t>, std::uint32_t>;

  const std::vector<ItemId>& nodes() const { return nodes_; }
  std::size_t num_nodes() const { return nodes_.size(); }
  // Node index of the session's last click.
  std::size_t last_node() const { return last_; }
  const EdgeMap& edges() const { return edges_; }
  std::uint32_t edge_weight(std::size_t src, std::size_t dst) const;

  // Union of in- and out-neighbours of i, self included, ascending by node.
  // A neighbour's weight is w(i->j) + w(j->i); the self-loop counts once.
  const std::vector<Neighbor>& neighborhood(std::size_t i) const;

  friend bool operator==(const SessionGraph&, const SessionGraph&) = default;

 private:
  friend SessionGraph build_graph(std::span<const ItemId> session);

  std::vector<ItemId> nodes_;
  std::size_t last_ = 0;
  EdgeMap edges_;
  std::vector<std::vector<Neighbor>> neighbors_;
};

SessionGraph build_graph(std::span<const ItemId> session);

}  // namespace hcgr

#endif  // HCGR_SESSION_GRAPH_HPP_
