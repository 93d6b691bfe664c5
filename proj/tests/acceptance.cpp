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

// Acceptance suite. Prints one PASS/FAIL line per criterion and exits
// nonzero unless the set of failing checks equals the --expect-fail list.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "cli_runner.hpp"
#include "hcgr/checkpoint.hpp"
#include "hcgr/data.hpp"
#include "hcgr/eval.hpp"
#include "hcgr/manifold.hpp"
#include "hcgr/metrics.hpp"
#include "hcgr/training.hpp"
#include "model_oracle.hpp"

using namespace hcgr;
namespace mf = hcgr::manifold;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::set<std::string> g_failed;  // check ids, e.g. "6c"

bool check(const std::string& id, bool ok) {
  if (!ok) g_failed.insert(id);
  return ok;
}

void report(const std::string& criterion, bool ok, const std::string& detail) {
  std::printf("criterion %-2s %s  %s\n", criterion.c_str(), ok ? "PASS" : "FAIL", detail.c_str());
  std::fflush(stdout);
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// ---------------------------------------------------------------------------
// 1, 2: manifold

double euclid(std::span<const double> a) {
  double s = 0.0;
  for (double x : a) s += x * x;
  return std::sqrt(s);
}

double euclid_diff(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

double minkowski(std::span<const double> a, std::span<const double> b) {
  double s = -a[0] * b[0];
  for (std::size_t i = 1; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

struct Draw {
  std::mt19937_64 rng;
  std::normal_distribution<double> n{0.0, 1.0};

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

  // Lifts a random spatial vector straight onto the sheet.
  mf::LorentzPoint point(std::size_t d, double k) {
    std::vector<double> c(d + 1);
    double s = 0.0;
    for (std::size_t i = 1; i <= d; ++i) c[i] = n(rng);
    const double r = uniform(0.0, 3.0) / euclid(std::span<const double>(c).subspan(1));
    for (std::size_t i = 1; i <= d; ++i) s += (c[i] *= r) * c[i];
    c[0] = std::sqrt(k + s);
    return mf::LorentzPoint(std::move(c), k);
  }

  mf::TangentVector tangent(const mf::LorentzPoint& x, double lo = 0.05, double hi = 3.0) {
    std::vector<double> v(x.dim());
    for (double& c : v) c = n(rng);
    const double a = minkowski(x.coords(), v) / x.k();
    for (std::size_t i = 0; i < v.size(); ++i) v[i] += a * x[i];
    const double scale = uniform(lo, hi) / std::sqrt(minkowski(v, v));
    for (double& c : v) c *= scale;
    return mf::TangentVector(std::move(v), x);
  }
};

void criterion_1() {
  const auto t0 = Clock::now();
  double constraint = 0.0, log_exp = 0.0, exp_log = 0.0, asym = 0.0, triangle = 0.0, transport = 0.0;
  Draw g{std::mt19937_64(20260101)};
  for (std::size_t d : {2, 8, 64}) {
    for (double k : {0.5, 1.0, 2.0}) {
      for (int i = 0; i < 1000; ++i) {
        const mf::LorentzPoint x = g.point(d, k), y = g.point(d, k), z = g.point(d, k);
        const mf::TangentVector v = g.tangent(x), u = g.tangent(x);
        auto track = [&](const mf::LorentzPoint& p, double kk) {
          constraint = std::max(constraint, std::abs(minkowski(p.coords(), p.coords()) + kk));
        };

        const mf::LorentzPoint ev = mf::exp_map(x, v);
        track(ev, k);
        log_exp = std::max(log_exp, euclid_diff(mf::log_map(x, ev).coords(), v.coords()) / euclid(v.coords()));
        if (mf::distance(x, y) > 1e-6) {
          const mf::LorentzPoint back = mf::exp_map(x, mf::log_map(x, y));
          track(back, k);
          exp_log = std::max(exp_log, euclid_diff(back.coords(), y.coords()) / euclid(y.coords()));
        }

        const double dxy = mf::distance(x, y), dyx = mf::distance(y, x);
        asym = std::max(asym, std::abs(dxy - dyx));
        triangle = std::max(triangle, mf::distance(x, z) - (dxy + mf::distance(y, z)));

        const mf::TangentVector pv = mf::parallel_transport(x, y, v), pu = mf::parallel_transport(x, y, u);
        transport = std::max(transport, std::abs(minkowski(pv.coords(), pu.coords()) - minkowski(v.coords(), u.coords())));
        transport = std::max(transport, std::abs(minkowski(pv.coords(), pv.coords()) - minkowski(v.coords(), v.coords())));

        // The remaining point-valued operations.
        Tensor w(d + 1, d + 1);
        for (std::size_t r = 0; r <= d; ++r)
          for (std::size_t c = 0; c <= d; ++c) w(r, c) = g.n(g.rng) / std::sqrt(double(d));
        track(mf::hyp_matmul(w, x), k);
        std::vector<double> spatial(d);
        for (double& s : spatial) s = g.uniform(-0.5, 0.5);
        track(mf::hyp_bias_add(x, mf::tangent_at_origin(spatial, k)), k);
        const double k_next = k == 2.0 ? 0.5 : 2.0 * k;
        track(mf::hyp_activation(x, mf::Activation::kLeakyRelu, k_next), k_next);
        track(mf::hyp_activation(x, mf::Activation::kTanh, k), k);
        track(mf::project_to_hyperboloid(x.coords(), k), k);
        track(mf::origin(d + 1, k), k);
      }
    }
  }
  const double secs = seconds_since(t0);
  bool ok = check("1.constraint", constraint < 1e-8);
  ok &= check("1.roundtrip", std::max(log_exp, exp_log) < 1e-7);
  ok &= check("1.symmetry", asym == 0.0);
  ok &= check("1.triangle", triangle <= 1e-9);
  ok &= check("1.transport", transport < 1e-7);
  ok &= check("1.time", secs < 10.0);
  report("1", ok,
         fmt("manifold suite 9x1000: constraint %.2e, log(exp) %.2e, exp(log) %.2e, asymmetry %.1e, "
             "triangle excess %.2e, transport %.2e, %.2fs",
             constraint, log_exp, exp_log, asym, std::max(triangle, 0.0), transport, secs));
}

void criterion_2() {
  double worst = 0.0;
  for (double t : {0.1, 1.0, 3.0}) {
    const mf::LorentzPoint p({std::cosh(t), std::sinh(t), 0.0}, 1.0);
    worst = std::max(worst, std::abs(mf::distance(mf::origin(3, 1.0), p) - t));
  }
  report("2", check("2", worst < 1e-10), fmt("geodesic distance error at t = 0.1, 1, 3: %.2e", worst));
}

// ---------------------------------------------------------------------------
// 3: gradients by central differences over every parameter

void criterion_3() {
  const auto t0 = Clock::now();
  HyperParams hp;
  hp.dim = 4;
  hp.graph_layers = 1;
  hp.attention_blocks = 1;
  Model m(hp, 6);
  std::mt19937_64 rng(3);
  m.initialize(rng);
  const std::vector<Example> batch{{{0, 1, 2, 1}, 3}, {{4, 5}, 0}, {{2, 3, 4}, 5}};
  std::vector<std::vector<ItemId>> negs;
  for (const Example& e : batch) negs.push_back(sample_negatives(rng, e, 6, 2));

  std::string detail;
  bool ok = true;
  const double h = 1e-5;
  for (double beta : {0.0, 0.1}) {
    TrainConfig cfg;
    cfg.beta = beta;
    const BatchGradient bg = batch_gradient(m, batch, negs, cfg);
    Model probe = m;
    double worst = 0.0;
    std::size_t n = 0;
    for (std::size_t id = 0; id < probe.params().count(); ++id) {
      Tensor& t = probe.params()[id];
      for (std::size_t j = 0; j < t.size(); ++j, ++n) {
        const double orig = t[j];
        t[j] = orig + h;
        const double fp = total_loss(probe, batch, negs, cfg);
        t[j] = orig - h;
        const double fm = total_loss(probe, batch, negs, cfg);
        t[j] = orig;
        const double num = (fp - fm) / (2.0 * h);
        const double ana = bg.grads[id].empty() ? 0.0 : bg.grads[id][j];
        worst = std::max(worst, std::abs(ana - num) / std::max({std::abs(ana), std::abs(num), 1e-6}));
      }
    }
    ok &= check(fmt("3.beta%g", beta), worst < 1e-3);
    detail += fmt("beta=%g max rel err %.2e over %zu scalars; ", beta, worst, n);
  }
  const double secs = seconds_since(t0);
  ok &= check("3.time", secs < 60.0);
  report("3", ok, detail + fmt("%.2fs", secs));
}

// ---------------------------------------------------------------------------
// 4: forward pass against the straight-line oracle

void criterion_4() {
  HyperParams hp;
  hp.dim = 8;
  hp.graph_layers = 2;
  hp.attention_blocks = 1;
  hp.init_std = 0.3;
  const std::size_t V = 20;
  Model m(hp, V);
  std::mt19937_64 rng(4);
  m.initialize(rng);
  std::uniform_int_distribution<ItemId> item(0, V - 1);
  std::uniform_int_distribution<std::size_t> len(1, 12);
  double worst = 0.0;
  for (int s = 0; s < 50; ++s) {
    std::vector<ItemId> session(len(rng));
    for (ItemId& v : session) v = item(rng);
    const std::vector<double> got = m.predict(session);
    const auto want = hcgr::testing::oracle_forward(m, session);
    for (std::size_t v = 0; v < V; ++v) worst = std::max(worst, std::abs(got[v] - want.probs[v]));
  }
  report("4", check("4", worst < 1e-9), fmt("50 sessions, max |p_model - p_oracle| = %.2e", worst));
}

// ---------------------------------------------------------------------------
// 5: metrics over every ordering of 8 items

void criterion_5() {
  const auto t0 = Clock::now();
  std::vector<ItemId> perm(8);
  std::iota(perm.begin(), perm.end(), 0);
  std::size_t orderings = 0, mismatches = 0;
  do {
    ++orderings;
    // The ordering as scores: earlier positions score higher.
    std::vector<double> scores(8);
    for (std::size_t pos = 0; pos < 8; ++pos) scores[perm[pos]] = 8.0 - double(pos);
    const std::vector<ItemId> ranked = ranked_items(scores);
    for (ItemId target = 0; target < 8; ++target) {
      std::size_t pos = 0;
      while (perm[pos] != target) ++pos;
      const std::size_t rank = rank_of(scores, target);
      for (std::size_t k : {1, 5, 8}) {
        const bool hit = pos < k;
        const double hr = hit ? 1.0 : 0.0;
        const double mrr = hit ? 1.0 / double(pos + 1) : 0.0;
        const double ndcg = hit ? 1.0 / std::log2(double(pos + 2)) : 0.0;
        mismatches += hit_rate_at_k(ranked, target, k) != hr;
        mismatches += mrr_at_k(ranked, target, k) != mrr;
        mismatches += ndcg_at_k(ranked, target, k) != ndcg;
        mismatches += hit_rate_from_rank(rank, k) != hr;
        mismatches += mrr_from_rank(rank, k) != mrr;
        mismatches += ndcg_from_rank(rank, k) != ndcg;
      }
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  const double secs = seconds_since(t0);
  const bool ok = check("5", mismatches == 0 && orderings == 40320) & check("5.time", secs < 5.0);
  report("5", ok, fmt("%zu orderings x 8 targets x K in {1,5,8}: %zu mismatches, %.2fs", orderings, mismatches, secs));
}

// ---------------------------------------------------------------------------
// 6, 7, 9: desk-scale learning on the synthetic corpus (9 reuses the model)

struct DeskRun {
  Model model;
  FitResult fit;
  double secs = 0.0;
};

Dataset desk_dataset() {
  SynthConfig sc;
  sc.n_items = 100;
  sc.n_sessions = 2000;
  sc.seed = 7;
  PrepareConfig pc;
  pc.seed = 7;
  return preprocess(synth_hierarchical(sc), pc);
}

TrainConfig desk_config() {
  TrainConfig cfg;
  cfg.learning_rate = 0.01;
  cfg.batch_size = 16;
  cfg.epochs = 100;
  cfg.patience = 10;
  cfg.beta = 0.1;
  cfg.seed = 7;
  return cfg;
}

DeskRun desk_train(const Dataset& ds, Aggregator agg) {
  const auto t0 = Clock::now();
  HyperParams hp;
  hp.dim = 16;
  hp.aggregator = agg;
  DeskRun r{Model(hp, ds.num_items()), {}, 0.0};
  std::mt19937_64 rng(7);
  r.model.initialize(rng);
  r.fit = fit(r.model, ds.train, desk_config(), split_validator(ds.valid));
  r.secs = seconds_since(t0);
  return r;
}

struct DeskResult {
  Dataset ds;
  DeskRun hop;
  RankingMetrics test;
};

DeskResult criteria_6_7() {
  DeskResult out{desk_dataset(), {}, {}};
  const Dataset& ds = out.ds;
  out.hop = desk_train(ds, Aggregator::kMultiHop);
  const DeskRun& hop = out.hop;
  const std::vector<std::size_t> counts = interaction_counts(ds.train, ds.num_items());
  out.test = evaluate(model_scorer(hop.model), ds.test, {10, 20});
  const RankingMetrics& test = out.test;
  const RankingMetrics pop = evaluate(popularity_scorer(counts), ds.test, {10, 20});

  // (a) first five epochs
  const auto& hist = hop.fit.history;
  bool mono = hist.size() >= 5;
  std::string losses;
  for (std::size_t e = 0; e < std::min<std::size_t>(5, hist.size()); ++e) {
    losses += fmt("%s%.4f", e ? " > " : "", hist[e].loss);
    if (e > 0 && !(hist[e].loss < hist[e - 1].loss)) mono = false;
  }
  const bool a = check("6a", mono);
  // (b) against popularity
  const double gap = test.hr.at(10) - pop.hr.at(10);
  const bool b = check("6b", gap >= 0.05);
  // (c) innermost region holds the most-interacted items
  const std::vector<HierarchyRow> rows = hierarchy_report(distances_to_origin(hop.model), counts);
  const bool c = check("6c", rows.front().mean_interactions >= rows.back().mean_interactions);
  const bool t = check("6.time", hop.secs < 600.0);
  report("6", a && b && c && t,
         fmt("(a) %s: %s; (b) %s: test HR@10 %.4f vs popularity %.4f (+%.4f); (c) %s: region mean interactions "
             "%.1f / %.1f / %.1f / %.1f; best epoch %zu of %zu, %.1fs",
             a ? "pass" : "FAIL", losses.c_str(), b ? "pass" : "FAIL", test.hr.at(10), pop.hr.at(10), gap,
             c ? "pass" : "FAIL", rows[0].mean_interactions, rows[1].mean_interactions, rows[2].mean_interactions,
             rows[3].mean_interactions, hop.fit.best_epoch, hop.fit.epochs_run, hop.secs));

  const DeskRun gcn = desk_train(ds, Aggregator::kGcnMean);
  const RankingMetrics gtest = evaluate(model_scorer(gcn.model), ds.test, {10});
  report("7", check("7", test.mrr.at(10) >= gtest.mrr.at(10)),
         fmt("test MRR@10 multi_hop %.4f vs gcn_mean %.4f", test.mrr.at(10), gtest.mrr.at(10)));
  return out;
}

void criterion_9(const DeskResult& desk) {
  const DeskRun& hop = desk.hop;
  const RankingMetrics& test = desk.test;
  const fs::path ck = fs::temp_directory_path() / "hcgr_acceptance_ck.json";
  save_checkpoint(hop.model, 7, ck.string());
  const Checkpoint back = load_checkpoint(ck.string());
  fs::remove(ck);
  const RankingMetrics again = evaluate(model_scorer(back.model), desk.ds.test, {10, 20});
  std::ostringstream c1, c2;
  write_metrics_csv(c1, "test", test);
  write_metrics_csv(c2, "test", again);
  const bool same = again.hr == test.hr && again.mrr == test.mrr && again.ndcg == test.ndcg && c1.str() == c2.str() &&
                    back.model.params() == hop.model.params();
  report("9", check("9", same), fmt("save/load/evaluate on the desk model: metrics %s", same ? "bit-identical" : "differ"));
}

// ---------------------------------------------------------------------------
// 8: end-to-end determinism through the command line

std::string pipeline(const fs::path& dir) {
  using hcgr::testing::run_cli;
  const std::string q = "'" + dir.string() + "/";
  const std::string steps[] = {
      "synth --items 100 --sessions 2000 --seed 7 --output " + q + "log.txt'",
      "prepare --input " + q + "log.txt' --output " + q + "ds.json' --seed 7",
      "train --data " + q + "ds.json' --checkpoint-out " + q + "ck.json' --dim 16 --lr 0.01 --batch-size 16 "
      "--epochs 5 --seed 7",
      "eval --data " + q + "ds.json' --checkpoint " + q + "ck.json' --ks 10,20 --out " + q + "metrics.csv'",
  };
  for (const std::string& s : steps) {
    const auto r = run_cli(s);
    if (r.code != 0) return "step failed (" + std::to_string(r.code) + "): " + s + "\n" + r.out;
  }
  return hcgr::testing::slurp(dir / "metrics.csv");
}

void criterion_8() {
  const auto t0 = Clock::now();
  const std::string a = pipeline(hcgr::testing::scratch_dir("accept_a"));
  const std::string b = pipeline(hcgr::testing::scratch_dir("accept_b"));
  const bool ok = a.rfind("split,K,", 0) == 0 && a == b;
  report("8", check("8", ok),
         fmt("synth -> prepare -> train -> eval twice: metrics CSVs %s (%zu bytes), %.1fs",
             ok ? "byte-identical" : "differ", a.size(), seconds_since(t0)));
  if (!ok) std::printf("%s\n%s\n", a.c_str(), b.c_str());
}

}  // namespace

int main(int argc, char** argv) {
  std::set<std::string> expected;
  for (int i = 1; i + 1 < argc; i += 2)
    if (std::string(argv[i]) == "--expect-fail") expected.insert(argv[i + 1]);

  criterion_1();
  criterion_2();
  criterion_3();
  criterion_4();
  criterion_5();
  const DeskResult desk = criteria_6_7();
  criterion_8();
  criterion_9(desk);

  std::string failed;
  for (const std::string& f : g_failed) failed += " " + f;
  std::printf("failing checks:%s\n", failed.empty() ? " none" : failed.c_str());
  if (g_failed != expected) {
    std::string want;
    for (const std::string& f : expected) want += " " + f;
    std::printf("expected failures:%s -> MISMATCH\n", want.empty() ? " none" : want.c_str());
    return 1;
  }
  if (!expected.empty()) std::printf("all failures are the documented expected ones\n");
  return 0;
}
