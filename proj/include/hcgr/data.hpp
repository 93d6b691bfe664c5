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

#ifndef HCGR_DATA_HPP_
#define HCGR_DATA_HPP_

// Session logs, preprocessing and the train/valid/test split.
//
// Session-log format, one session per line:
//   <session_id> TAB <item token> (SPACE <item token>)*
// Lines starting with '#' are comments; blank lines are skipped.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "hcgr/session_graph.hpp"

namespace hcgr {

// Sessions as read from disk. Item tokens are numbered in order of first
// appearance.
struct RawCorpus {
  std::vector<std::string> session_ids;
  std::vector<std::vector<std::uint32_t>> sessions;
  std::vector<std::string> tokens;  // raw id -> token

  std::size_t size() const { return sessions.size(); }
  friend bool operator==(const RawCorpus&, const RawCorpus&) = default;
};

// Throws IoError (unreadable) or std::invalid_argument naming the line.
RawCorpus ingest(const std::string& path);
RawCorpus ingest(std::istream& in, const std::string& source = "<stream>");
void write_session_log(std::ostream& out, const RawCorpus& corpus);

struct PrepareConfig {
  std::size_t min_item_freq = 3;
  std::size_t min_session_len = 3;
  std::size_t max_session_len = 50;
  std::uint64_t seed = 0;
  // Emit every (prefix, next) pair of a session instead of only the last one.
  bool all_prefixes = false;
};

// One supervised pair.
struct Example {
  std::vector<ItemId> prefix;
  ItemId target = 0;
  friend bool operator==(const Example&, const Example&) = default;
};

struct CorpusStats {
  std::size_t users = 0;  // sessions
  std::size_t items = 0;
  std::size_t behaviors = 0;  // clicks
  double avg_items_per_user = 0.0;
  double avg_interactions_per_item = 0.0;
  friend bool operator==(const CorpusStats&, const CorpusStats&) = default;
};

struct Dataset {
  std::vector<std::string> catalog;  // dense id -> token
  std::vector<Example> train, valid, test;
  CorpusStats stats;  // of the filtered corpus, before splitting

  std::size_t num_items() const { return catalog.size(); }
  const std::vector<Example>& split(const std::string& name) const;
  friend bool operator==(const Dataset&, const Dataset&) = default;
};

// Drops rare items, then short sessions, then keeps the most recent
// max_session_len clicks; repeated until nothing changes so that applying it
// twice is the same as applying it once.
RawCorpus filter_corpus(const RawCorpus& raw, const PrepareConfig& cfg);

// filter -> dense reindex -> seeded shuffle -> 80/10/10 split (remainder to
// train) -> supervised pairs. Throws std::invalid_argument when nothing
// survives.
Dataset preprocess(const RawCorpus& raw, const PrepareConfig& cfg);


CorpusStats corpus_stats(const RawCorpus& filtered);
std::string format_stats(const CorpusStats& s);

// Clicks per item in a split (prefix items and targets).
std::vector<std::size_t> interaction_counts(const std::vector<Example>& split, std::size_t num_items);

void save_dataset(const Dataset& ds, const std::string& path);
Dataset load_dataset(const std::string& path);

struct SynthConfig {
  std::size_t n_items = 100;
  std::size_t n_sessions = 2000;
  std::uint64_t seed = 7;
  double zipf_s = 1.2;
  double jump_prob = 0.1;
  std::size_t min_len = 3;
  std::size_t max_len = 50;
};

// Two-level category tree; a session walks one leaf category drawing items by
// Zipf weight and occasionally jumps to another leaf.
RawCorpus synth_hierarchical(const SynthConfig& cfg);

}  // namespace hcgr

#endif  // HCGR_DATA_HPP_
