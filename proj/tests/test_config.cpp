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

#include <stdexcept>

#include "doctest.h"
#include "hcgr/config.hpp"

using namespace hcgr;

TEST_CASE("defaults") {
  const Config c;
  CHECK(c.hyper().dim == 128);
  CHECK(c.train().learning_rate == 0.001);
  CHECK(c.train().batch_size == 128);
  CHECK(c.train().l2 == 0.003);
  CHECK(c.train().patience == 10);
  CHECK(c.prepare().min_item_freq == 3);
  CHECK(c.ks() == std::vector<std::size_t>{10, 20});
  CHECK_FALSE(c.was_set("dim"));
}

TEST_CASE("file then explicit overrides") {
  Config c;
  c.load_text("# desk scale\ndim = 16\nlr=0.01\n\naggregator=gcn_mean\n");
  CHECK(c.hyper().dim == 16);
  CHECK(c.hyper().aggregator == Aggregator::kGcnMean);
  c.set("dim", "8");
  CHECK(c.hyper().dim == 8);
  CHECK(c.was_set("lr"));
  CHECK(c.render().find("dim=8\n") != std::string::npos);
  CHECK(c.render().find("lr=0.01\n") != std::string::npos);
}

TEST_CASE("rejections") {
  Config c;
  CHECK_THROWS_AS(c.set("dimension", "4"), std::invalid_argument);
  CHECK_THROWS_AS(c.set("dim", "four"), std::invalid_argument);
  CHECK_THROWS_AS(c.set("dim", "0"), std::invalid_argument);
  CHECK_THROWS_AS(c.set("lr", "fast"), std::invalid_argument);
  CHECK_THROWS_AS(c.set("aggregator", "mean"), std::invalid_argument);
  CHECK_THROWS_AS(c.set("ks", "10,,20"), std::invalid_argument);
  CHECK_THROWS_AS(c.set("all_prefixes", "yes"), std::invalid_argument);
  try {
    c.load_text("dim=4\nbogus=1\n", "run.cfg");
    FAIL("expected an error");
  } catch (const std::invalid_argument& e) {
    CHECK(std::string(e.what()).find("run.cfg:2") != std::string::npos);
  }
  CHECK_THROWS_AS(c.load_text("just words\n"), std::invalid_argument);
}
