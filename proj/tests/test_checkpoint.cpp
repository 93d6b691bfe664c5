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

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <stdexcept>

#include "doctest.h"
#include "hcgr/checkpoint.hpp"
#include "hcgr/error.hpp"
#include "hcgr/eval.hpp"

using namespace hcgr;

namespace {

Model trained_like_model(Aggregator agg) {
  HyperParams hp;
  hp.dim = 6;
  hp.graph_layers = 2;
  hp.attention_blocks = 2;
  hp.aggregator = agg;
  hp.activation = manifold::Activation::kTanh;
  Model m(hp, 15);
  std::mt19937_64 rng(3);
  m.initialize(rng);
  // Awkward values: subnormal, negative zero, long mantissas.
  m.params()[m.params().gate].fill(-0.0);
  m.params()[m.params().attn_b].fill(4.9406564584124654e-324);
  m.params()[m.params().embeddings](3, 1) = 0.1 + 0.2;
  return m;
}

}  // namespace

TEST_CASE("round trip is bit-exact") {
  for (Aggregator agg : {Aggregator::kMultiHop, Aggregator::kGatLastLayer, Aggregator::kGcnMean}) {
    const Model m = trained_like_model(agg);
    const Checkpoint ck = checkpoint_from_string(checkpoint_to_string(m, 1234567890123ULL));
    CHECK(ck.rng_seed == 1234567890123ULL);
    CHECK(ck.model.hyper() == m.hyper());
    CHECK(ck.model.catalog_size() == 15);
    CHECK(ck.model.params() == m.params());
    CHECK(std::signbit(ck.model.params()[ck.model.params().gate].item()));
    CHECK(checkpoint_to_string(ck.model, ck.rng_seed) == checkpoint_to_string(m, 1234567890123ULL));
  }
}

TEST_CASE("evaluation after save and load is identical") {
  const Model m = trained_like_model(Aggregator::kMultiHop);
  const std::string path = (std::filesystem::temp_directory_path() / "hcgr_test_ck.json").string();
  save_checkpoint(m, 9, path);
  const Checkpoint ck = load_checkpoint(path);
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<ItemId> item(0, 14);
  std::vector<Example> split(40);
  for (Example& e : split) e = {{item(rng), item(rng), item(rng)}, item(rng)};
  const RankingMetrics a = evaluate(model_scorer(m), split, {5, 10});
  const RankingMetrics b = evaluate(model_scorer(ck.model), split, {5, 10});
  CHECK(a.hr == b.hr);
  CHECK(a.mrr == b.mrr);
  CHECK(a.ndcg == b.ndcg);
  for (const Example& e : split) CHECK(m.predict(e.prefix) == ck.model.predict(e.prefix));
  std::remove(path.c_str());
}

TEST_CASE("rejects unknown formats and broken documents") {
  const Model m = trained_like_model(Aggregator::kMultiHop);
  std::string text = checkpoint_to_string(m, 1);
  const auto pos = text.find("hcgr-v1");
  std::string other = text;
  other.replace(pos, 7, "hcgr-v2");
  CHECK_THROWS_AS(checkpoint_from_string(other), std::invalid_argument);
  CHECK_THROWS_AS(checkpoint_from_string("{}"), std::invalid_argument);
  CHECK_THROWS_AS(checkpoint_from_string("[1,2"), std::invalid_argument);
  std::string shape = text;
  shape.replace(shape.find("\"dim\":6"), 7, "\"dim\":5");
  CHECK_THROWS_AS(checkpoint_from_string(shape), std::invalid_argument);
  CHECK_THROWS_AS(load_checkpoint("/nonexistent/hcgr/ck.json"), IoError);
}
