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

#include "hcgr/data.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include "hcgr/error.hpp"
#include "json.hpp"

namespace hcgr {

namespace {

constexpr const char* kDatasetFormat = "hcgr-dataset-v1";

std::vector<std::string> split_ws(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

}  // namespace

RawCorpus ingest(std::istream& in, const std::string& source) {
  RawCorpus corpus;
  std::unordered_map<std::string, std::uint32_t> index;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    if (line[0] == '#') continue;
    const auto tab = line.find('\t');
    const std::string where = source + ":" + std::to_string(lineno) + ": ";
    if (tab == std::string::npos) throw std::invalid_argument(where + "expected '<session_id>\\t<items>'");
    std::string id = line.substr(0, tab);
    if (id.empty()) throw std::invalid_argument(where + "empty session id");
    const std::vector<std::string> items = split_ws(line.substr(tab + 1));
    if (items.empty()) throw std::invalid_argument(where + "session '" + id + "' has no items");
    std::vector<std::uint32_t> s;
    for (const std::string& tok : items) {
      auto [it, fresh] = index.emplace(tok, static_cast<std::uint32_t>(corpus.tokens.size()));
      if (fresh) corpus.tokens.push_back(tok);
      s.push_back(it->second);
    }
    corpus.session_ids.push_back(std::move(id));
    corpus.sessions.push_back(std::move(s));
  }
  if (in.bad()) throw IoError(source + ": read error");
  return corpus;
}

RawCorpus ingest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  return ingest(in, path);
}

void write_session_log(std::ostream& out, const RawCorpus& corpus) {
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    out << corpus.session_ids[i] << '\t';
    for (std::size_t t = 0; t < corpus.sessions[i].size(); ++t) {
      if (t) out << ' ';
      out << corpus.tokens[corpus.sessions[i][t]];
    }
    out << '\n';
  }
}

const std::vector<Example>& Dataset::split(const std::string& name) const {
  if (name == "train") return train;
  if (name == "valid") return valid;
  if (name == "test") return test;
  throw std::invalid_argument("unknown split '" + name + "' (train, valid, test)");
}

RawCorpus filter_corpus(const RawCorpus& raw, const PrepareConfig& cfg) {
  if (cfg.max_session_len == 0) throw std::invalid_argument("max_session_len must be >= 1");
  RawCorpus cur = raw;
  for (;;) {
    std::vector<std::size_t> freq(cur.tokens.size(), 0);
    for (const auto& s : cur.sessions)
      for (std::uint32_t v : s) ++freq[v];
    RawCorpus next;
    next.tokens = cur.tokens;
    bool changed = false;
    for (std::size_t i = 0; i < cur.size(); ++i) {
      std::vector<std::uint32_t> s;
      for (std::uint32_t v : cur.sessions[i])
        if (freq[v] >= cfg.min_item_freq) s.push_back(v);
      if (s.size() < cfg.min_session_len || s.empty()) {
        changed = true;
        continue;
      }
      if (s.size() > cfg.max_session_len) s.erase(s.begin(), s.end() - static_cast<long>(cfg.max_session_len));
      changed = changed || s.size() != cur.sessions[i].size();
      next.session_ids.push_back(cur.session_ids[i]);
      next.sessions.push_back(std::move(s));
    }
    cur = std::move(next);
    if (!changed) break;
  }
  return cur;
}

CorpusStats corpus_stats(const RawCorpus& filtered) {
  CorpusStats st;
  std::vector<bool> seen(filtered.tokens.size(), false);
  for (const auto& s : filtered.sessions) {
    st.behaviors += s.size();
    for (std::uint32_t v : s) seen[v] = true;
  }
  st.users = filtered.size();
  st.items = static_cast<std::size_t>(std::count(seen.begin(), seen.end(), true));
  if (st.users) st.avg_items_per_user = static_cast<double>(st.behaviors) / static_cast<double>(st.users);
  if (st.items) st.avg_interactions_per_item = static_cast<double>(st.behaviors) / static_cast<double>(st.items);
  return st;
}

std::string format_stats(const CorpusStats& s) {
  std::ostringstream o;
  o << std::fixed << std::setprecision(2);
  o << "users      " << s.users << '\n'
    << "items      " << s.items << '\n'
    << "behaviors  " << s.behaviors << '\n'
    << "avg_i_user " << s.avg_items_per_user << '\n'
    << "avg_i_item " << s.avg_interactions_per_item << '\n';
  return o.str();
}

Dataset preprocess(const RawCorpus& raw, const PrepareConfig& cfg) {
  if (raw.size() == 0) throw std::invalid_argument("preprocess: empty corpus");
  const RawCorpus f = filter_corpus(raw, cfg);
  if (f.size() == 0) throw std::invalid_argument("preprocess: every session was filtered out");

  Dataset ds;
  ds.stats = corpus_stats(f);
  std::vector<std::int64_t> dense(f.tokens.size(), -1);
  std::vector<std::vector<ItemId>> sessions;
  for (const auto& s : f.sessions) {
    std::vector<ItemId> out;
    for (std::uint32_t v : s) {
      if (dense[v] < 0) {
        dense[v] = static_cast<std::int64_t>(ds.catalog.size());
        ds.catalog.push_back(f.tokens[v]);
      }
      out.push_back(static_cast<ItemId>(dense[v]));
    }
    sessions.push_back(std::move(out));
  }

  std::vector<std::size_t> order(sessions.size());
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(cfg.seed);
  std::shuffle(order.begin(), order.end(), rng);

  const std::size_t n = order.size();
  const std::size_t n_valid = n / 10, n_test = n / 10, n_train = n - n_valid - n_test;
  auto emit = [&](std::vector<Example>& dst, std::size_t from, std::size_t to) {
    for (std::size_t i = from; i < to; ++i) {
      const auto& s = sessions[order[i]];
      const std::size_t first = cfg.all_prefixes ? 1 : s.size() - 1;
      for (std::size_t t = first; t < s.size(); ++t) dst.push_back({{s.begin(), s.begin() + static_cast<long>(t)}, s[t]});
    }
  };
  emit(ds.train, 0, n_train);
  emit(ds.valid, n_train, n_train + n_valid);
  emit(ds.test, n_train + n_valid, n);
  return ds;
}

std::vector<std::size_t> interaction_counts(const std::vector<Example>& split, std::size_t num_items) {
  std::vector<std::size_t> c(num_items, 0);
  auto bump = [&](ItemId v) {
    if (v >= num_items) throw std::invalid_argument("interaction_counts: item outside catalog");
    ++c[v];
  };
  for (const Example& e : split) {
    for (ItemId v : e.prefix) bump(v);
    bump(e.target);
  }
  return c;
}

// ---------------------------------------------------------------------------
// Persistence

namespace {

nlohmann::json split_to_json(const std::vector<Example>& split) {
  nlohmann::json a = nlohmann::json::array();
  for (const Example& e : split) {
    std::vector<ItemId> row = e.prefix;
    row.push_back(e.target);
    a.push_back(row);
  }
  return a;
}

std::vector<Example> split_from_json(const nlohmann::json& a, std::size_t num_items, const std::string& name) {
  std::vector<Example> out;
  for (const auto& row : a) {
    auto s = row.get<std::vector<ItemId>>();
    if (s.size() < 2) throw std::invalid_argument("dataset: " + name + " pair needs a prefix and a target");
    for (ItemId v : s)
      if (v >= num_items) throw std::invalid_argument("dataset: " + name + " item outside catalog");
    Example e;
    e.target = s.back();
    s.pop_back();
    e.prefix = std::move(s);
    out.push_back(std::move(e));
  }
  return out;
}

}  // namespace

void save_dataset(const Dataset& ds, const std::string& path) {
  nlohmann::ordered_json j;
  j["format"] = kDatasetFormat;
  j["catalog"] = ds.catalog;
  j["stats"] = {{"users", ds.stats.users},
                {"items", ds.stats.items},
                {"behaviors", ds.stats.behaviors},
                {"avg_items_per_user", ds.stats.avg_items_per_user},
                {"avg_interactions_per_item", ds.stats.avg_interactions_per_item}};
  j["train"] = split_to_json(ds.train);
  j["valid"] = split_to_json(ds.valid);
  j["test"] = split_to_json(ds.test);
  std::ofstream out(path);
  if (!out) throw IoError("cannot write '" + path + "'");
  out << j.dump() << '\n';
  if (!out) throw IoError("write failed for '" + path + "'");
}

Dataset load_dataset(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(path + ": not a dataset file (" + e.what() + ")");
  }
  try {
    if (!j.contains("format") || j["format"] != kDatasetFormat)
      throw std::invalid_argument(path + ": unknown dataset format");
    Dataset ds;
    ds.catalog = j.at("catalog").get<std::vector<std::string>>();
    const auto& st = j.at("stats");
    ds.stats.users = st.at("users");
    ds.stats.items = st.at("items");
    ds.stats.behaviors = st.at("behaviors");
    ds.stats.avg_items_per_user = st.at("avg_items_per_user");
    ds.stats.avg_interactions_per_item = st.at("avg_interactions_per_item");
    ds.train = split_from_json(j.at("train"), ds.catalog.size(), "train");
    ds.valid = split_from_json(j.at("valid"), ds.catalog.size(), "valid");
    ds.test = split_from_json(j.at("test"), ds.catalog.size(), "test");
    return ds;
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(path + ": malformed dataset (" + e.what() + ")");
  }
}

// ---------------------------------------------------------------------------
// Synthetic corpus

RawCorpus synth_hierarchical(const SynthConfig& cfg) {
  if (cfg.n_items < 10) throw std::invalid_argument("synth: need at least 10 items");
  if (cfg.n_sessions == 0) throw std::invalid_argument("synth: need at least 1 session");
  if (cfg.min_len < 1 || cfg.max_len < cfg.min_len) throw std::invalid_argument("synth: bad session length range");

  const std::size_t n_top = std::clamp<std::size_t>(cfg.n_items / 25, 2, 4);
  const std::size_t subs = 3;
  const std::size_t n_leaf = n_top * subs;

  // Item r has popularity rank r; leaves are filled round-robin so every leaf
  // holds a head item and a tail.
  std::vector<double> weight(cfg.n_items);
  std::vector<std::vector<std::size_t>> leaf_items(n_leaf);
  std::vector<double> leaf_weight(n_leaf, 0.0);
  for (std::size_t r = 0; r < cfg.n_items; ++r) {
    weight[r] = std::pow(static_cast<double>(r + 1), -cfg.zipf_s);
    leaf_items[r % n_leaf].push_back(r);
    leaf_weight[r % n_leaf] += weight[r];
  }
  std::vector<std::discrete_distribution<std::size_t>> within;
  for (const auto& items : leaf_items) {
    std::vector<double> w;
    for (std::size_t r : items) w.push_back(weight[r]);
    within.emplace_back(w.begin(), w.end());
  }
  std::discrete_distribution<std::size_t> any_leaf(leaf_weight.begin(), leaf_weight.end());
  std::vector<std::discrete_distribution<std::size_t>> sibling;
  for (std::size_t t = 0; t < n_top; ++t) {
    std::vector<double> w(n_leaf, 0.0);
    for (std::size_t l = t * subs; l < (t + 1) * subs; ++l) w[l] = leaf_weight[l];
    sibling.emplace_back(w.begin(), w.end());
  }

  std::mt19937_64 rng(cfg.seed);
  std::bernoulli_distribution jump(cfg.jump_prob), stay_in_family(0.5);
  std::geometric_distribution<std::size_t> extra(0.15);

  RawCorpus corpus;
  for (std::size_t r = 0; r < cfg.n_items; ++r) corpus.tokens.push_back("i" + std::to_string(r));
  for (std::size_t s = 0; s < cfg.n_sessions; ++s) {
    const std::size_t len = std::min(cfg.max_len, cfg.min_len + extra(rng));
    std::size_t leaf = any_leaf(rng);
    std::vector<std::uint32_t> items;
    for (std::size_t t = 0; t < len; ++t) {
      if (t > 0 && jump(rng)) leaf = stay_in_family(rng) ? sibling[leaf / subs](rng) : any_leaf(rng);
      items.push_back(static_cast<std::uint32_t>(leaf_items[leaf][within[leaf](rng)]));
    }
    corpus.session_ids.push_back("s" + std::to_string(s));
    corpus.sessions.push_back(std::move(items));
  }
  // Token numbering follows first appearance, matching ingest().
  std::stringstream buf;
  write_session_log(buf, corpus);
  return ingest(buf, "<synth>");
}

}  // namespace hcgr
