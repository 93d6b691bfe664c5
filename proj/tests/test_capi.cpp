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

// Exercises the shared library strictly through the C header.

#include <cmath>
#include <cstring>
#include <filesystem>
#include <numeric>
#include <string>
#include <thread>
#include <vector>

#include "doctest.h"
#include "hcgr/hcgr.h"

namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("hcgr_capi_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string take(char* s) {
  std::string out = s ? s : "";
  hcgr_string_free(s);
  return out;
}

struct Toy {
  hcgr_config* cfg = nullptr;
  hcgr_dataset* ds = nullptr;
  hcgr_model* model = nullptr;

  explicit Toy(const fs::path& dir) {
    const std::string log = (dir / "log.txt").string();
    REQUIRE(hcgr_synth_write(40, 300, 5, log.c_str()) == HCGR_OK);
    REQUIRE(hcgr_config_new(&cfg) == HCGR_OK);
    for (auto [k, v] : {std::pair{"dim", "8"}, {"epochs", "2"}, {"lr", "0.01"}, {"batch_size", "16"}, {"seed", "5"}})
      REQUIRE(hcgr_config_set(cfg, k, v) == HCGR_OK);
    REQUIRE(hcgr_dataset_prepare(log.c_str(), cfg, &ds) == HCGR_OK);
    REQUIRE(hcgr_model_create(cfg, ds, &model) == HCGR_OK);
  }
  ~Toy() {
    hcgr_model_free(model);
    hcgr_dataset_free(ds);
    hcgr_config_free(cfg);
  }
};

std::string eval_csv(const hcgr_model* m, const hcgr_dataset* d, const char* split) {
  const size_t ks[] = {10, 20};
  char* csv = nullptr;
  REQUIRE(hcgr_evaluate(m, d, split, ks, 2, 1, &csv) == HCGR_OK);
  return take(csv);
}

}  // namespace

TEST_CASE("config keys are validated") {
  hcgr_config* cfg = nullptr;
  REQUIRE(hcgr_config_new(&cfg) == HCGR_OK);
  CHECK(hcgr_config_is_known("dim") == 1);
  CHECK(hcgr_config_is_known("dimension") == 0);
  CHECK(hcgr_config_set(cfg, "dimension", "4") == HCGR_INPUT_ERROR);
  CHECK(std::string(hcgr_last_error()).find("dimension") != std::string::npos);
  CHECK(hcgr_config_set(cfg, "dim", "16") == HCGR_OK);
  CHECK(std::string(hcgr_last_error()).empty());
  char* v = nullptr;
  REQUIRE(hcgr_config_get(cfg, "dim", &v) == HCGR_OK);
  CHECK(take(v) == "16");
  char* r = nullptr;
  REQUIRE(hcgr_config_render(cfg, &r) == HCGR_OK);
  CHECK(take(r).find("dim=16\n") != std::string::npos);
  CHECK(hcgr_config_load(cfg, "/nonexistent/hcgr.cfg") == HCGR_INPUT_ERROR);
  CHECK(hcgr_config_set(nullptr, "dim", "1") == HCGR_INPUT_ERROR);
  hcgr_config_free(cfg);
}

TEST_CASE("last error is per thread") {
  hcgr_config* cfg = nullptr;
  REQUIRE(hcgr_config_new(&cfg) == HCGR_OK);
  CHECK(hcgr_config_set(cfg, "nope", "1") == HCGR_INPUT_ERROR);
  std::string other = "unset";
  std::thread([&] { other = hcgr_last_error(); }).join();
  CHECK(other.empty());
  CHECK(std::string(hcgr_last_error()).find("nope") != std::string::npos);
  hcgr_config_free(cfg);
}

TEST_CASE("train, save, load and evaluate") {
  const fs::path dir = scratch("train");
  Toy t(dir);
  CHECK(hcgr_dataset_num_items(t.ds) == hcgr_model_catalog_size(t.model));
  CHECK(hcgr_dataset_split_size(t.ds, "test") == 30);
  CHECK(hcgr_dataset_split_size(t.ds, "bogus") == 0);

  std::vector<std::string> lines;
  hcgr_train_summary sum{};
  auto cb = [](const char* line, void* user) { static_cast<std::vector<std::string>*>(user)->emplace_back(line); };
  REQUIRE(hcgr_train(t.model, t.ds, t.cfg, cb, &lines, &sum) == HCGR_OK);
  CHECK(lines.size() == 2);
  CHECK(lines[0].rfind("epoch=1 loss=", 0) == 0);
  CHECK(sum.epochs_run == 2);
  CHECK(sum.best_epoch >= 1);

  const std::string before = eval_csv(t.model, t.ds, "valid");
  CHECK(before.rfind("split,K,hit_rate,ndcg,mrr,n\nvalid,10,", 0) == 0);
  const std::string ck = (dir / "ck.json").string();
  REQUIRE(hcgr_model_save(t.model, ck.c_str()) == HCGR_OK);
  hcgr_model* back = nullptr;
  REQUIRE(hcgr_model_load(ck.c_str(), &back) == HCGR_OK);
  CHECK(eval_csv(back, t.ds, "valid") == before);

  const uint32_t session[] = {0, 3, 1, 3};
  std::vector<double> a(hcgr_model_catalog_size(t.model)), b(a.size());
  REQUIRE(hcgr_model_predict(t.model, session, 4, a.data()) == HCGR_OK);
  REQUIRE(hcgr_model_predict(back, session, 4, b.data()) == HCGR_OK);
  CHECK(std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0);
  CHECK(std::accumulate(a.begin(), a.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-12));
  const uint32_t outside[] = {9999};
  CHECK(hcgr_model_predict(t.model, outside, 1, a.data()) == HCGR_INPUT_ERROR);
  hcgr_model_free(back);
}

TEST_CASE("analysis exports") {
  const fs::path dir = scratch("analyze");
  Toy t(dir);
  REQUIRE(hcgr_analyze(t.model, t.ds, (dir / "out").string().c_str(), 10) == HCGR_OK);
  for (const char* f : {"hierarchy.csv", "embeddings.csv", "attention.csv"}) CHECK(fs::exists(dir / "out" / f));
}

TEST_CASE("mismatches and bad inputs map to input errors") {
  const fs::path dir = scratch("mismatch");
  Toy t(dir);
  const std::string small = (dir / "small.txt").string();
  REQUIRE(hcgr_synth_write(12, 100, 1, small.c_str()) == HCGR_OK);
  hcgr_dataset* other = nullptr;
  REQUIRE(hcgr_dataset_prepare(small.c_str(), t.cfg, &other) == HCGR_OK);
  const size_t ks[] = {10};
  char* csv = nullptr;
  CHECK(hcgr_evaluate(t.model, other, "test", ks, 1, 1, &csv) == HCGR_INPUT_ERROR);
  CHECK(std::string(hcgr_last_error()).find("catalog") != std::string::npos);
  CHECK(hcgr_train(t.model, other, t.cfg, nullptr, nullptr, nullptr) == HCGR_INPUT_ERROR);
  CHECK(hcgr_evaluate(t.model, t.ds, "holdout", ks, 1, 1, &csv) == HCGR_INPUT_ERROR);
  hcgr_dataset_free(other);

  hcgr_model* m = nullptr;
  CHECK(hcgr_model_load(small.c_str(), &m) == HCGR_INPUT_ERROR);
  hcgr_dataset* d = nullptr;
  CHECK(hcgr_dataset_load("/nonexistent/ds.json", &d) == HCGR_INPUT_ERROR);
  CHECK(hcgr_synth_write(1, 10, 0, (dir / "x.txt").string().c_str()) == HCGR_INPUT_ERROR);
  CHECK(hcgr_synth_write(10, 0, 0, (dir / "x.txt").string().c_str()) == HCGR_INPUT_ERROR);
}

TEST_CASE("numeric failures map to their own code") {
  const fs::path dir = scratch("numeric");
  Toy t(dir);
  REQUIRE(hcgr_config_set(t.cfg, "lr", "1e200") == HCGR_OK);
  CHECK(hcgr_train(t.model, t.ds, t.cfg, nullptr, nullptr, nullptr) == HCGR_NUMERIC_ERROR);
  CHECK(std::string(hcgr_last_error()).find("epoch 1 batch") != std::string::npos);
}

TEST_CASE("self check") {
  char* report = nullptr;
  CHECK(hcgr_check(0, 0, &report) == HCGR_OK);
  CHECK(take(report).find("all checks passed") != std::string::npos);
  CHECK(hcgr_check(0, 1, &report) == HCGR_CHECK_FAILED);
  CHECK(take(report).find("FAILED: exp/log roundtrip") != std::string::npos);
  CHECK(hcgr_check(2, 0, &report) == HCGR_INPUT_ERROR);
}
