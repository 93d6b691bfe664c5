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

#include "hcgr/hcgr.h"

#include <cstdlib>
#include <cstring>
#include <exception>
#include <filesystem>
#include <fstream>
#include <new>
#include <random>
#include <sstream>
#include <string>

#include "hcgr/checkpoint.hpp"
#include "hcgr/config.hpp"
#include "hcgr/data.hpp"
#include "hcgr/error.hpp"
#include "hcgr/eval.hpp"
#include "hcgr/self_check.hpp"
#include "hcgr/training.hpp"

struct hcgr_config {
  hcgr::Config cfg;
};

struct hcgr_dataset {
  hcgr::Dataset ds;
};

struct hcgr_model {
  hcgr::Model model;
  std::uint64_t seed = 0;
};

namespace {

thread_local std::string g_last_error;

hcgr_status fail(hcgr_status s, const std::string& msg) {
  g_last_error = msg;
  return s;
}

// Runs f, mapping exceptions onto status codes.
template <class F>
hcgr_status guarded(F&& f) {
  try {
    g_last_error.clear();
    return f();
  } catch (const hcgr::NumericError& e) {
    return fail(HCGR_NUMERIC_ERROR, e.what());
  } catch (const std::bad_alloc&) {
    return fail(HCGR_INPUT_ERROR, "out of memory");
  } catch (const std::exception& e) {
    return fail(HCGR_INPUT_ERROR, e.what());
  } catch (...) {
    return fail(HCGR_INPUT_ERROR, "unknown error");
  }
}

char* dup_string(const std::string& s) {
  char* p = static_cast<char*>(std::malloc(s.size() + 1));
  if (!p) throw std::bad_alloc();
  std::memcpy(p, s.c_str(), s.size() + 1);
  return p;
}

#define HCGR_REQUIRE(cond, msg) \
  if (!(cond)) return fail(HCGR_INPUT_ERROR, msg)

void check_catalog(const hcgr_model* m, const hcgr_dataset* d) {
  if (m->model.catalog_size() != d->ds.num_items())
    throw std::invalid_argument("checkpoint catalog size " + std::to_string(m->model.catalog_size()) +
                                " does not match dataset catalog size " + std::to_string(d->ds.num_items()));
}

std::ofstream open_out(const std::filesystem::path& p) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw hcgr::IoError("cannot write " + p.string());
  return out;
}

}  // namespace

extern "C" {

const char* hcgr_last_error(void) { return g_last_error.c_str(); }

void hcgr_string_free(char* s) { std::free(s); }

hcgr_status hcgr_config_new(hcgr_config** out) {
  HCGR_REQUIRE(out, "hcgr_config_new: null output");
  return guarded([&] {
    *out = new hcgr_config;
    return HCGR_OK;
  });
}

void hcgr_config_free(hcgr_config* cfg) { delete cfg; }

int hcgr_config_is_known(const char* key) { return key && hcgr::Config::is_known(key) ? 1 : 0; }

hcgr_status hcgr_config_set(hcgr_config* cfg, const char* key, const char* value) {
  HCGR_REQUIRE(cfg && key && value, "hcgr_config_set: null argument");
  return guarded([&] {
    cfg->cfg.set(key, value);
    return HCGR_OK;
  });
}

hcgr_status hcgr_config_load(hcgr_config* cfg, const char* path) {
  HCGR_REQUIRE(cfg && path, "hcgr_config_load: null argument");
  return guarded([&] {
    cfg->cfg.load_file(path);
    return HCGR_OK;
  });
}

hcgr_status hcgr_config_get(const hcgr_config* cfg, const char* key, char** value) {
  HCGR_REQUIRE(cfg && key && value, "hcgr_config_get: null argument");
  return guarded([&] {
    *value = dup_string(cfg->cfg.get(key));
    return HCGR_OK;
  });
}

hcgr_status hcgr_config_render(const hcgr_config* cfg, char** text) {
  HCGR_REQUIRE(cfg && text, "hcgr_config_render: null argument");
  return guarded([&] {
    *text = dup_string(cfg->cfg.render());
    return HCGR_OK;
  });
}

hcgr_status hcgr_synth_write(size_t n_items, size_t n_sessions, uint64_t seed, const char* path) {
  HCGR_REQUIRE(path, "hcgr_synth_write: null path");
  HCGR_REQUIRE(n_items >= 2, "synth: need at least 2 items");
  HCGR_REQUIRE(n_sessions >= 1, "synth: need at least 1 session");
  return guarded([&] {
    hcgr::SynthConfig sc;
    sc.n_items = n_items;
    sc.n_sessions = n_sessions;
    sc.seed = seed;
    const hcgr::RawCorpus corpus = hcgr::synth_hierarchical(sc);
    std::ofstream out = open_out(path);
    hcgr::write_session_log(out, corpus);
    if (!out.flush()) throw hcgr::IoError(std::string("cannot write ") + path);
    return HCGR_OK;
  });
}

hcgr_status hcgr_dataset_prepare(const char* log_path, const hcgr_config* cfg, hcgr_dataset** out) {
  HCGR_REQUIRE(log_path && cfg && out, "hcgr_dataset_prepare: null argument");
  return guarded([&] {
    const hcgr::RawCorpus raw = hcgr::ingest(std::string(log_path));
    auto* d = new hcgr_dataset;
    try {
      d->ds = hcgr::preprocess(raw, cfg->cfg.prepare());
    } catch (...) {
      delete d;
      throw;
    }
    *out = d;
    return HCGR_OK;
  });
}

hcgr_status hcgr_dataset_load(const char* path, hcgr_dataset** out) {
  HCGR_REQUIRE(path && out, "hcgr_dataset_load: null argument");
  return guarded([&] {
    hcgr::Dataset ds = hcgr::load_dataset(path);
    *out = new hcgr_dataset{std::move(ds)};
    return HCGR_OK;
  });
}

hcgr_status hcgr_dataset_save(const hcgr_dataset* ds, const char* path) {
  HCGR_REQUIRE(ds && path, "hcgr_dataset_save: null argument");
  return guarded([&] {
    hcgr::save_dataset(ds->ds, path);
    return HCGR_OK;
  });
}

void hcgr_dataset_free(hcgr_dataset* ds) { delete ds; }

size_t hcgr_dataset_num_items(const hcgr_dataset* ds) { return ds ? ds->ds.num_items() : 0; }

size_t hcgr_dataset_split_size(const hcgr_dataset* ds, const char* split) {
  if (!ds || !split) return 0;
  const std::string s = split;
  if (s == "train") return ds->ds.train.size();
  if (s == "valid") return ds->ds.valid.size();
  if (s == "test") return ds->ds.test.size();
  return 0;
}

hcgr_status hcgr_dataset_stats(const hcgr_dataset* ds, char** text) {
  HCGR_REQUIRE(ds && text, "hcgr_dataset_stats: null argument");
  return guarded([&] {
    std::ostringstream s;
    s << hcgr::format_stats(ds->ds.stats);
    s << "train      " << ds->ds.train.size() << "\n";
    s << "valid      " << ds->ds.valid.size() << "\n";
    s << "test       " << ds->ds.test.size() << "\n";
    *text = dup_string(s.str());
    return HCGR_OK;
  });
}

hcgr_status hcgr_model_create(const hcgr_config* cfg, const hcgr_dataset* ds, hcgr_model** out) {
  HCGR_REQUIRE(cfg && ds && out, "hcgr_model_create: null argument");
  return guarded([&] {
    auto* m = new hcgr_model;
    try {
      m->seed = cfg->cfg.seed();
      m->model = hcgr::Model(cfg->cfg.hyper(), ds->ds.num_items());
      std::mt19937_64 rng(m->seed);
      m->model.initialize(rng);
    } catch (...) {
      delete m;
      throw;
    }
    *out = m;
    return HCGR_OK;
  });
}

hcgr_status hcgr_model_load(const char* path, hcgr_model** out) {
  HCGR_REQUIRE(path && out, "hcgr_model_load: null argument");
  return guarded([&] {
    hcgr::Checkpoint ck = hcgr::load_checkpoint(path);
    *out = new hcgr_model{std::move(ck.model), ck.rng_seed};
    return HCGR_OK;
  });
}

hcgr_status hcgr_model_save(const hcgr_model* model, const char* path) {
  HCGR_REQUIRE(model && path, "hcgr_model_save: null argument");
  return guarded([&] {
    hcgr::save_checkpoint(model->model, model->seed, path);
    return HCGR_OK;
  });
}

void hcgr_model_free(hcgr_model* model) { delete model; }

size_t hcgr_model_catalog_size(const hcgr_model* model) { return model ? model->model.catalog_size() : 0; }

hcgr_status hcgr_model_predict(const hcgr_model* model, const uint32_t* session, size_t len, double* probs) {
  HCGR_REQUIRE(model && probs && (session || len == 0), "hcgr_model_predict: null argument");
  return guarded([&] {
    const std::vector<double> p = model->model.predict(std::span<const hcgr::ItemId>(session, len));
    std::copy(p.begin(), p.end(), probs);
    return HCGR_OK;
  });
}

hcgr_status hcgr_train(hcgr_model* model, const hcgr_dataset* ds, const hcgr_config* cfg, hcgr_epoch_fn on_epoch,
                       void* user, hcgr_train_summary* summary) {
  HCGR_REQUIRE(model && ds && cfg, "hcgr_train: null argument");
  return guarded([&] {
    check_catalog(model, ds);
    const hcgr::TrainConfig tc = cfg->cfg.train();
    hcgr::EpochCallback cb;
    if (on_epoch) cb = [&](const hcgr::EpochRecord& r) { on_epoch(hcgr::format_epoch_line(r).c_str(), user); };
    const hcgr::FitResult r =
        hcgr::fit(model->model, ds->ds.train, tc, hcgr::split_validator(ds->ds.valid, tc.threads), cb);
    model->seed = tc.seed;
    if (summary) {
      summary->best_epoch = r.best_epoch;
      summary->epochs_run = r.epochs_run;
      summary->stopped_early = r.stopped_early ? 1 : 0;
      summary->best_valid_mrr20 = r.best_valid_mrr20;
    }
    return HCGR_OK;
  });
}

hcgr_status hcgr_evaluate(const hcgr_model* model, const hcgr_dataset* ds, const char* split, const size_t* ks,
                          size_t n_ks, size_t threads, char** csv) {
  HCGR_REQUIRE(model && ds && split && csv && (ks || n_ks == 0), "hcgr_evaluate: null argument");
  return guarded([&] {
    check_catalog(model, ds);
    const std::vector<std::size_t> kv(ks, ks + n_ks);
    const hcgr::RankingMetrics m =
        hcgr::evaluate(hcgr::model_scorer(model->model), ds->ds.split(split), kv, threads == 0 ? 1 : threads);
    std::ostringstream out;
    hcgr::write_metrics_csv(out, split, m);
    *csv = dup_string(out.str());
    return HCGR_OK;
  });
}

hcgr_status hcgr_analyze(const hcgr_model* model, const hcgr_dataset* ds, const char* out_dir, size_t max_sessions) {
  HCGR_REQUIRE(model && ds && out_dir, "hcgr_analyze: null argument");
  return guarded([&] {
    check_catalog(model, ds);
    const std::filesystem::path dir(out_dir);
    std::filesystem::create_directories(dir);
    const hcgr::Model& m = model->model;
    const std::vector<std::size_t> counts = hcgr::interaction_counts(ds->ds.train, ds->ds.num_items());

    std::ofstream h = open_out(dir / "hierarchy.csv");
    hcgr::write_hierarchy_csv(h, hcgr::hierarchy_report(hcgr::distances_to_origin(m), counts));
    std::ofstream e = open_out(dir / "embeddings.csv");
    hcgr::write_embeddings_csv(e, m, counts);

    std::vector<hcgr::SessionTrace> traces;
    const auto& test = ds->ds.test;
    for (std::size_t i = 0; i < test.size() && i < max_sessions; ++i) {
      hcgr::SessionTrace t;
      t.session = i;
      m.predict_traced(test[i].prefix, t.trace);
      traces.push_back(std::move(t));
    }
    std::ofstream a = open_out(dir / "attention.csv");
    hcgr::write_attention_csv(a, traces);
    if (!h.flush() || !e.flush() || !a.flush()) throw hcgr::IoError("cannot write into " + dir.string());
    return HCGR_OK;
  });
}

hcgr_status hcgr_check(int level, int fault, char** report) {
  HCGR_REQUIRE(report, "hcgr_check: null argument");
  HCGR_REQUIRE(level == 0 || level == 1, "hcgr_check: level must be 0 (quick) or 1 (full)");
  HCGR_REQUIRE(fault == 0 || fault == 1, "hcgr_check: unknown fault");
  return guarded([&] {
    const hcgr::CheckReport r =
        hcgr::run_self_check(level == 0 ? hcgr::CheckLevel::kQuick : hcgr::CheckLevel::kFull,
                             fault == 0 ? hcgr::CheckFault::kNone : hcgr::CheckFault::kPerturbExpMap);
    *report = dup_string(r.render());
    if (!r.passed()) return fail(HCGR_CHECK_FAILED, "self check failed");
    return HCGR_OK;
  });
}

}  // extern "C"
