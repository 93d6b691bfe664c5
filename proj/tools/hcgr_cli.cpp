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

// Command-line front end. Talks to the library only through hcgr.h.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "hcgr/hcgr.h"

namespace fs = std::filesystem;

namespace {

// Carries an exit code out of a subcommand.
struct Exit {
  int code;
};

void die_on(hcgr_status s, const std::string& what) {
  if (s == HCGR_OK) return;
  std::cerr << "hcgr: " << what << ": " << hcgr_last_error() << "\n";
  throw Exit{static_cast<int>(s)};
}

[[noreturn]] void usage_error(const std::string& msg) {
  std::cerr << "hcgr: " << msg << "\n";
  throw Exit{HCGR_INPUT_ERROR};
}

std::string take(char* s) {
  std::string out = s ? s : "";
  hcgr_string_free(s);
  return out;
}

using ConfigPtr = std::unique_ptr<hcgr_config, decltype(&hcgr_config_free)>;
using DatasetPtr = std::unique_ptr<hcgr_dataset, decltype(&hcgr_dataset_free)>;
using ModelPtr = std::unique_ptr<hcgr_model, decltype(&hcgr_model_free)>;

// Flags that map one-to-one onto config keys. Values stay strings so the
// library does the validation.
struct KeyFlags {
  std::vector<std::pair<std::string, CLI::Option*>> opts;
  std::vector<std::string> values;
  std::vector<std::string> sets;  // --set key=value
  std::string config_file;

  void reserve(std::size_t n) { values.reserve(n); }
  void add(CLI::App* app, const std::string& flag, const std::string& key, const std::string& help) {
    values.emplace_back();
    opts.emplace_back(key, app->add_option(flag, values.back(), help));
  }
  void add_common(CLI::App* app) {
    app->add_option("--config", config_file, "key=value config file");
    app->add_option("--set", sets, "override a config key (key=value), repeatable");
  }
};

// defaults < HCGR_SEED < config file < --set < dedicated flags
ConfigPtr build_config(const KeyFlags& f) {
  hcgr_config* raw = nullptr;
  die_on(hcgr_config_new(&raw), "config");
  ConfigPtr cfg(raw, hcgr_config_free);
  if (const char* env = std::getenv("HCGR_SEED"); env && *env) die_on(hcgr_config_set(cfg.get(), "seed", env), "HCGR_SEED");
  if (!f.config_file.empty()) die_on(hcgr_config_load(cfg.get(), f.config_file.c_str()), "config");
  for (const std::string& kv : f.sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) usage_error("--set expects key=value, got '" + kv + "'");
    die_on(hcgr_config_set(cfg.get(), kv.substr(0, eq).c_str(), kv.substr(eq + 1).c_str()), "--set " + kv);
  }
  for (std::size_t i = 0; i < f.opts.size(); ++i)
    if (f.opts[i].second->count() > 0)
      die_on(hcgr_config_set(cfg.get(), f.opts[i].first.c_str(), f.values[i].c_str()), f.opts[i].second->get_name());
  return cfg;
}

std::string get(const hcgr_config* cfg, const char* key) {
  char* s = nullptr;
  die_on(hcgr_config_get(cfg, key, &s), key);
  return take(s);
}

std::string required(const hcgr_config* cfg, const char* key, const char* flag) {
  std::string v = get(cfg, key);
  if (v.empty()) usage_error(std::string("missing ") + flag);
  return v;
}

std::vector<size_t> parse_ks(const std::string& s) {
  std::vector<size_t> ks;
  std::stringstream in(s);
  for (std::string tok; std::getline(in, tok, ',');) ks.push_back(std::stoul(tok));
  return ks;
}

void ensure_dir(const fs::path& dir) {
  if (dir.empty()) return;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) usage_error("cannot create " + dir.string() + ": " + ec.message());
}

void write_file(const fs::path& p, const std::string& text) {
  ensure_dir(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  if (!(out << text) || !out.flush()) usage_error("cannot write " + p.string());
}

void echo_config(const hcgr_config* cfg, const fs::path& dir) {
  char* s = nullptr;
  die_on(hcgr_config_render(cfg, &s), "config");
  write_file(dir / "run-config.txt", take(s));
}

DatasetPtr load_dataset(const std::string& path) {
  hcgr_dataset* d = nullptr;
  die_on(hcgr_dataset_load(path.c_str(), &d), "dataset");
  return DatasetPtr(d, hcgr_dataset_free);
}

ModelPtr load_model(const std::string& path) {
  hcgr_model* m = nullptr;
  die_on(hcgr_model_load(path.c_str(), &m), "checkpoint");
  return ModelPtr(m, hcgr_model_free);
}

// Right-aligned columns for CSV text.
void print_table(const std::string& csv) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(csv);
  for (std::string line; std::getline(in, line);) {
    std::vector<std::string> cells;
    std::stringstream ls(line);
    for (std::string c; std::getline(ls, c, ',');) cells.push_back(c);
    rows.push_back(std::move(cells));
  }
  std::vector<size_t> w;
  for (const auto& r : rows)
    for (size_t i = 0; i < r.size(); ++i) {
      if (w.size() <= i) w.push_back(0);
      w[i] = std::max(w[i], r[i].size());
    }
  for (const auto& r : rows) {
    for (size_t i = 0; i < r.size(); ++i) std::cout << (i ? "  " : "") << std::string(w[i] - r[i].size(), ' ') << r[i];
    std::cout << "\n";
  }
}

std::string evaluate(const hcgr_model* m, const hcgr_dataset* d, const char* split, const hcgr_config* cfg) {
  const std::vector<size_t> ks = parse_ks(get(cfg, "ks"));
  const size_t threads = std::stoul(get(cfg, "threads"));
  char* csv = nullptr;
  die_on(hcgr_evaluate(m, d, split, ks.data(), ks.size(), threads, &csv), "evaluate");
  return take(csv);
}

// ---------------------------------------------------------------------------

struct PrepareCmd {
  KeyFlags f;
  std::string input, output;

  void attach(CLI::App& app) {
    auto* c = app.add_subcommand("prepare", "filter and split a session log into a dataset file");
    c->add_option("--input", input, "session log")->required();
    c->add_option("--output", output, "dataset file to write")->required();
    f.reserve(5);
    f.add(c, "--seed", "seed", "split seed");
    f.add(c, "--min-item-freq", "min_item_freq", "drop items seen fewer times (default 3)");
    f.add(c, "--min-session-len", "min_session_len", "drop shorter sessions (default 3)");
    f.add(c, "--max-session-len", "max_session_len", "keep the most recent clicks (default 50)");
    f.add(c, "--all-prefixes", "all_prefixes", "true: one pair per click instead of per session");
    f.add_common(c);
    c->callback([this] { run(); });
  }

  void run() {
    ConfigPtr cfg = build_config(f);
    hcgr_dataset* raw = nullptr;
    die_on(hcgr_dataset_prepare(input.c_str(), cfg.get(), &raw), "prepare");
    DatasetPtr ds(raw, hcgr_dataset_free);
    ensure_dir(fs::path(output).parent_path());
    die_on(hcgr_dataset_save(ds.get(), output.c_str()), "prepare");
    echo_config(cfg.get(), fs::path(output).parent_path());
    char* s = nullptr;
    die_on(hcgr_dataset_stats(ds.get(), &s), "stats");
    std::cout << take(s);
  }
};

struct SynthCmd {
  size_t items = 100, sessions = 2000;
  std::string output;
  CLI::Option* seed_opt = nullptr;
  std::uint64_t seed = 0;

  void attach(CLI::App& app) {
    auto* c = app.add_subcommand("synth", "write a synthetic hierarchical session log");
    c->add_option("--items", items, "catalog size")->capture_default_str();
    c->add_option("--sessions", sessions, "number of sessions")->capture_default_str();
    seed_opt = c->add_option("--seed", seed, "generator seed (falls back to HCGR_SEED, then 0)");
    c->add_option("--output", output, "session log to write")->required();
    c->callback([this] { run(); });
  }

  void run() {
    std::uint64_t s = seed;
    if (seed_opt->count() == 0)
      if (const char* env = std::getenv("HCGR_SEED"); env && *env) {
        char* end = nullptr;
        s = std::strtoull(env, &end, 10);
        if (*end != '\0') usage_error(std::string("HCGR_SEED is not an integer: ") + env);
      }
    ensure_dir(fs::path(output).parent_path());
    die_on(hcgr_synth_write(items, sessions, s, output.c_str()), "synth");
    std::cout << "wrote " << sessions << " sessions over " << items << " items to " << output << "\n";
  }
};

struct TrainCmd {
  KeyFlags f;
  std::string out_dir;

  void attach(CLI::App& app) {
    auto* c = app.add_subcommand("train", "train a model and write its best checkpoint");
    f.reserve(16);
    f.add(c, "--data", "data", "dataset file from `prepare`");
    f.add(c, "--checkpoint-out", "checkpoint", "checkpoint to write");
    f.add(c, "--out-dir", "out_dir", "epoch log and run-config.txt (default: checkpoint directory)");
    f.add(c, "--epochs", "epochs", "maximum epochs");
    f.add(c, "--patience", "patience", "early-stopping patience");
    f.add(c, "--dim", "dim", "embedding dimension");
    f.add(c, "--graph-layers", "graph_layers", "graph attention layers");
    f.add(c, "--attention-blocks", "attention_blocks", "self-attention blocks");
    f.add(c, "--aggregator", "aggregator", "multi_hop | gat_last_layer | gcn_mean");
    f.add(c, "--lr", "lr", "learning rate");
    f.add(c, "--batch-size", "batch_size", "batch size");
    f.add(c, "--beta", "beta", "contrastive loss weight");
    f.add(c, "--l2", "l2", "L2 penalty");
    f.add(c, "--seed", "seed", "initialisation and shuffling seed");
    f.add(c, "--threads", "threads", "worker threads (default 1)");
    f.add(c, "--ks", "ks", "cutoffs for the final validation table");
    f.add_common(c);
    c->callback([this] { run(); });
  }

  void run() {
    ConfigPtr cfg = build_config(f);
    const std::string data = required(cfg.get(), "data", "--data");
    const std::string ck = required(cfg.get(), "checkpoint", "--checkpoint-out");
    std::string dir = get(cfg.get(), "out_dir");
    if (dir.empty()) dir = fs::path(ck).parent_path().string();
    DatasetPtr ds = load_dataset(data);

    hcgr_model* raw = nullptr;
    die_on(hcgr_model_create(cfg.get(), ds.get(), &raw), "model");
    ModelPtr model(raw, hcgr_model_free);

    ensure_dir(dir);
    echo_config(cfg.get(), dir);
    const fs::path log_path = fs::path(dir) / "epochs.log";
    std::ofstream log(log_path, std::ios::binary);
    if (!log) usage_error("cannot write " + log_path.string());

    struct Sink {
      std::ofstream* log;
    } sink{&log};
    auto on_epoch = [](const char* line, void* user) {
      *static_cast<Sink*>(user)->log << line << "\n";
      static_cast<Sink*>(user)->log->flush();
      std::cout << line << std::endl;
    };
    hcgr_train_summary sum{};
    die_on(hcgr_train(model.get(), ds.get(), cfg.get(), on_epoch, &sink, &sum), "train");

    ensure_dir(fs::path(ck).parent_path());
    die_on(hcgr_model_save(model.get(), ck.c_str()), "checkpoint");
    std::cout << "best epoch " << sum.best_epoch << " of " << sum.epochs_run << (sum.stopped_early ? " (early stop)" : "")
              << "; checkpoint " << ck << "\n";
    print_table(evaluate(model.get(), ds.get(), "valid", cfg.get()));
  }
};

struct EvalCmd {
  KeyFlags f;
  std::string out, split = "test";

  void attach(CLI::App& app) {
    auto* c = app.add_subcommand("eval", "rank the full catalog for every pair of a split");
    f.reserve(4);
    f.add(c, "--data", "data", "dataset file");
    f.add(c, "--checkpoint", "checkpoint", "checkpoint file");
    f.add(c, "--ks", "ks", "cutoffs, e.g. 10,20");
    f.add(c, "--threads", "threads", "worker threads (default 1)");
    c->add_option("--split", split, "train | valid | test")->capture_default_str();
    c->add_option("--out", out, "metrics CSV to write");
    f.add_common(c);
    c->callback([this] { run(); });
  }

  void run() {
    ConfigPtr cfg = build_config(f);
    DatasetPtr ds = load_dataset(required(cfg.get(), "data", "--data"));
    ModelPtr model = load_model(required(cfg.get(), "checkpoint", "--checkpoint"));
    const std::string csv = evaluate(model.get(), ds.get(), split.c_str(), cfg.get());
    if (!out.empty()) {
      write_file(out, csv);
      echo_config(cfg.get(), fs::path(out).parent_path());
    }
    print_table(csv);
  }
};

struct AnalyzeCmd {
  KeyFlags f;
  size_t sessions = 10;

  void attach(CLI::App& app) {
    auto* c = app.add_subcommand("analyze", "export hierarchy, embedding and attention CSVs");
    f.reserve(3);
    f.add(c, "--data", "data", "dataset file");
    f.add(c, "--checkpoint", "checkpoint", "checkpoint file");
    f.add(c, "--out-dir", "out_dir", "directory for the CSVs");
    c->add_option("--sessions", sessions, "test sessions to trace")->capture_default_str();
    f.add_common(c);
    c->callback([this] { run(); });
  }

  void run() {
    ConfigPtr cfg = build_config(f);
    DatasetPtr ds = load_dataset(required(cfg.get(), "data", "--data"));
    ModelPtr model = load_model(required(cfg.get(), "checkpoint", "--checkpoint"));
    const std::string dir = required(cfg.get(), "out_dir", "--out-dir");
    die_on(hcgr_analyze(model.get(), ds.get(), dir.c_str(), sessions), "analyze");
    echo_config(cfg.get(), dir);
    std::ifstream h(fs::path(dir) / "hierarchy.csv");
    std::stringstream text;
    text << h.rdbuf();
    print_table(text.str());
    std::cout << "wrote hierarchy.csv, embeddings.csv, attention.csv to " << dir << "\n";
  }
};

struct CheckCmd {
  std::string level = "quick";
  bool fault = false;

  void attach(CLI::App& app) {
    auto* c = app.add_subcommand("check", "run the numerical self-check suite");
    c->add_option("--level", level, "quick | full")->check(CLI::IsMember({"quick", "full"}))->capture_default_str();
    // Test hook: perturbs the exponential map so the suite must fail.
    c->add_flag("--inject-fault", fault)->group("");
    c->callback([this] { run(); });
  }

  void run() {
    char* report = nullptr;
    const hcgr_status s = hcgr_check(level == "full" ? 1 : 0, fault ? 1 : 0, &report);
    if (!report) die_on(s, "check");
    std::cout << take(report);
    if (s != HCGR_OK) throw Exit{static_cast<int>(s)};
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hcgr: hyperbolic contrastive session recommender"};
  app.require_subcommand(1);
  PrepareCmd prepare;
  SynthCmd synth;
  TrainCmd train;
  EvalCmd eval;
  AnalyzeCmd analyze;
  CheckCmd check;
  prepare.attach(app);
  synth.attach(app);
  train.attach(app);
  eval.attach(app);
  analyze.attach(app);
  check.attach(app);
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : HCGR_INPUT_ERROR;
  } catch (const Exit& e) {
    return e.code;
  } catch (const std::exception& e) {
    std::cerr << "hcgr: " << e.what() << "\n";
    return HCGR_INPUT_ERROR;
  }
  return 0;
}
