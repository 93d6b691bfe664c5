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
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>

#include "doctest.h"
#include "hcgr/data.hpp"
#include "hcgr/error.hpp"

using namespace hcgr;

namespace {

RawCorpus parse(const std::string& text) {
  std::istringstream in(text);
  return ingest(in, "fixture");
}

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("hcgr_test_" + name)).string();
}

RawCorpus from_lists(const std::vector<std::vector<std::string>>& sessions) {
  std::string text;
  for (std::size_t i = 0; i < sessions.size(); ++i) {
    text += "s" + std::to_string(i) + "\t";
    for (std::size_t t = 0; t < sessions[i].size(); ++t) text += (t ? " " : "") + sessions[i][t];
    text += "\n";
  }
  return parse(text);
}

}  // namespace

TEST_CASE("ingest basics") {
  const RawCorpus c = parse("u1\ta b c\nu2\tb c\n");
  CHECK(c.size() == 2);
  CHECK(c.tokens == std::vector<std::string>{"a", "b", "c"});
  CHECK(c.sessions[1] == std::vector<std::uint32_t>{1, 2});

  CHECK(parse("").size() == 0);
  CHECK(parse("u1\ta b\n\n   \nu2\tc\n").size() == 2);
  CHECK(parse("# header\nu1\ta\r\n").size() == 1);
}

TEST_CASE("ingest errors name the line") {
  try {
    parse("u1\ta b\nno tab here\n");
    FAIL("expected an error");
  } catch (const std::invalid_argument& e) {
    CHECK(std::string(e.what()).find("fixture:2") != std::string::npos);
  }
  CHECK_THROWS_AS(parse("u1\t   \n"), std::invalid_argument);
  CHECK_THROWS_AS(ingest(std::string("/nonexistent/hcgr/file.tsv")), IoError);
}

TEST_CASE("session log round trip") {
  const RawCorpus c = parse("x\tp q p\ny\tq r\n");
  std::stringstream buf;
  write_session_log(buf, c);
  CHECK(parse(buf.str()) == c);
}

TEST_CASE("item frequency filter") {
  // a: 5 clicks, b: 2 clicks
  PrepareConfig cfg;
  cfg.min_session_len = 1;
  const RawCorpus f = filter_corpus(from_lists({{"a", "b", "a"}, {"a", "b", "a"}, {"a"}}), cfg);
  const std::uint32_t b = 1;
  for (const auto& s : f.sessions) CHECK(std::find(s.begin(), s.end(), b) == s.end());
  CHECK(f.size() == 3);
}

TEST_CASE("sessions shortened below the minimum are dropped") {
  PrepareConfig cfg;
  const RawCorpus f =
      filter_corpus(from_lists({{"a", "a", "z"}, {"a", "b", "b"}, {"b", "a", "b"}, {"a", "b", "c"}, {"a", "b", "a"}}), cfg);
  // z and c appear once; sessions 0 and 3 fall to length 2.
  CHECK(f.session_ids == std::vector<std::string>{"s1", "s2", "s4"});

  // Dropping sessions can push an item under the threshold; filtering repeats.
  const RawCorpus cascade =
      filter_corpus(from_lists({{"a", "a", "z"}, {"a", "b", "b"}, {"b", "a", "b"}, {"a", "b", "c"}}), cfg);
  CHECK(cascade.size() == 0);
}

TEST_CASE("filter is idempotent and truncates to the most recent clicks") {
  SynthConfig sc;
  sc.n_items = 60;
  sc.n_sessions = 300;
  sc.seed = 3;
  const RawCorpus raw = synth_hierarchical(sc);
  PrepareConfig cfg;
  cfg.min_item_freq = 8;
  cfg.max_session_len = 6;
  const RawCorpus once = filter_corpus(raw, cfg);
  CHECK(filter_corpus(once, cfg) == once);
  for (const auto& s : once.sessions) CHECK(s.size() <= 6);

  const RawCorpus longs = from_lists({{"a", "b", "c", "d", "e"}, {"a", "b", "c", "d", "e"}, {"a", "b", "c", "d", "e"}});
  cfg = PrepareConfig{};
  cfg.max_session_len = 3;
  const RawCorpus t = filter_corpus(longs, cfg);
  CHECK(t.sessions[0] == std::vector<std::uint32_t>{2, 3, 4});

  cfg = PrepareConfig{};
  cfg.min_item_freq = 1;
  cfg.min_session_len = 1;
  CHECK(filter_corpus(longs, cfg) == longs);
}

TEST_CASE("split sizes and supervised pairs") {
  std::vector<std::vector<std::string>> lists;
  for (int i = 0; i < 100; ++i) lists.push_back({"a", "b", "c", i % 2 ? "a" : "b"});
  PrepareConfig cfg;
  cfg.seed = 11;
  const Dataset ds = preprocess(from_lists(lists), cfg);
  CHECK(ds.train.size() == 80);
  CHECK(ds.valid.size() == 10);
  CHECK(ds.test.size() == 10);
  CHECK(ds.num_items() == 3);
  for (const Example& e : ds.train) CHECK(e.prefix.size() == 3);

  lists.resize(97);
  const Dataset odd = preprocess(from_lists(lists), cfg);
  CHECK(odd.train.size() == 79);
  CHECK(odd.valid.size() == 9);
  CHECK(odd.test.size() == 9);

  cfg.all_prefixes = true;
  const Dataset all = preprocess(from_lists(lists), cfg);
  CHECK(all.train.size() == 79 * 3);
  CHECK(all.train[0].prefix.size() == 1);
}

TEST_CASE("preprocess determinism, dense ids and errors") {
  SynthConfig sc;
  sc.n_items = 50;
  sc.n_sessions = 400;
  const RawCorpus raw = synth_hierarchical(sc);
  PrepareConfig cfg;
  cfg.seed = 5;
  const Dataset a = preprocess(raw, cfg), b = preprocess(raw, cfg);
  CHECK(a == b);
  cfg.seed = 6;
  CHECK_FALSE(preprocess(raw, cfg) == a);

  std::set<ItemId> used;
  for (const auto* split : {&a.train, &a.valid, &a.test})
    for (const Example& e : *split) {
      used.insert(e.target);
      used.insert(e.prefix.begin(), e.prefix.end());
    }
  CHECK(used.size() == a.num_items());
  CHECK(*used.rbegin() == a.num_items() - 1);
  CHECK(a.stats.users == a.train.size() + a.valid.size() + a.test.size());
  CHECK(a.stats.items == a.num_items());

  CHECK_THROWS_AS(preprocess(RawCorpus{}, cfg), std::invalid_argument);
  CHECK_THROWS_AS(preprocess(from_lists({{"a", "b"}}), cfg), std::invalid_argument);
}

TEST_CASE("corpus statistics") {
  PrepareConfig cfg;
  cfg.min_item_freq = 1;
  const Dataset ds = preprocess(from_lists({{"a", "b", "c"}, {"b", "c", "d", "a"}, {"d", "d", "a"}}), cfg);
  CHECK(ds.stats.users == 3);
  CHECK(ds.stats.items == 4);
  CHECK(ds.stats.behaviors == 10);
  CHECK(ds.stats.avg_items_per_user == doctest::Approx(10.0 / 3));
  CHECK(ds.stats.avg_interactions_per_item == doctest::Approx(2.5));
  CHECK(format_stats(ds.stats).find("items      4") != std::string::npos);
}

TEST_CASE("interaction counts") {
  std::vector<Example> split{{{0, 1}, 2}, {{2}, 2}};
  CHECK(interaction_counts(split, 4) == std::vector<std::size_t>{1, 1, 3, 0});
  CHECK_THROWS_AS(interaction_counts(split, 2), std::invalid_argument);
}

TEST_CASE("dataset file round trip") {
  SynthConfig sc;
  sc.n_items = 30;
  sc.n_sessions = 200;
  const Dataset ds = preprocess(synth_hierarchical(sc), PrepareConfig{});
  const std::string path = temp_path("dataset.json");
  save_dataset(ds, path);
  CHECK(load_dataset(path) == ds);

  std::ofstream(path) << "{\"format\":\"other\"}";
  CHECK_THROWS_AS(load_dataset(path), std::invalid_argument);
  std::ofstream(path) << "not json";
  CHECK_THROWS_AS(load_dataset(path), std::invalid_argument);
  std::remove(path.c_str());
  CHECK_THROWS_AS(load_dataset(path), IoError);
}

TEST_CASE("synthetic corpus shape") {
  SynthConfig sc;
  sc.n_items = 100;
  sc.n_sessions = 1000;
  const RawCorpus a = synth_hierarchical(sc);
  CHECK(a == synth_hierarchical(sc));
  CHECK(a.size() == 1000);
  std::vector<std::size_t> freq(a.tokens.size(), 0);
  std::size_t total = 0;
  for (const auto& s : a.sessions) {
    CHECK(s.size() >= 3);
    CHECK(s.size() <= 50);
    for (auto v : s) ++freq[v];
    total += s.size();
  }
  std::sort(freq.rbegin(), freq.rend());
  const std::size_t top = std::accumulate(freq.begin(), freq.begin() + 10, std::size_t{0});
  CHECK(static_cast<double>(top) / static_cast<double>(total) > 0.5);

  sc.seed = 8;
  CHECK_FALSE(synth_hierarchical(sc) == a);
  sc.n_items = 9;
  CHECK_THROWS_AS(synth_hierarchical(sc), std::invalid_argument);
}
