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

#include "hcgr/self_check.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>

#include "hcgr/manifold.hpp"
#include "hcgr/training.hpp"

namespace hcgr {

namespace mf = manifold;

namespace {

constexpr int kInstances = 200;

double norm(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

double diff(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

struct Sampler {
  std::mt19937_64 rng;

  std::vector<double> gaussian(std::size_t n) {
    std::normal_distribution<double> nd(0.0, 1.0);
    std::vector<double> v(n);
    for (double& x : v) x = nd(rng);
    return v;
  }
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

  mf::LorentzPoint point(std::size_t d, double k) {
    std::vector<double> s = gaussian(d);
    const double r = uniform(0.05, 2.0) / norm(s);
    for (double& x : s) x *= r;
    const mf::TangentVector v = mf::tangent_at_origin(s, k);
    return mf::exp_map(v.base(), v);
  }
  mf::TangentVector tangent(const mf::LorentzPoint& x) {
    std::vector<double> v = gaussian(x.dim());
    const double s = mf::lorentz_inner(x.coords(), v) / x.k();
    for (std::size_t i = 0; i < v.size(); ++i) v[i] += s * x[i];
    const double r = uniform(0.05, 2.0) / mf::lorentz_norm(v);
    for (double& c : v) c *= r;
    return mf::TangentVector(std::move(v), x);
  }
};

using ExpFn = std::function<mf::LorentzPoint(const mf::LorentzPoint&, const mf::TangentVector&)>;

CheckItem make(const std::string& name, double worst, double tol, std::string detail = {}) {
  return {name, worst <= tol, worst, tol, std::move(detail)};
}

void manifold_checks(CheckReport& rep, const ExpFn& exp, std::uint64_t seed) {
  double constraint = 0.0, roundtrip = 0.0, symmetry = 0.0, triangle = 0.0, transport = 0.0;
  std::string rt_where, c_where;
  Sampler s{std::mt19937_64(seed)};
  for (std::size_t d : {2, 8}) {
    for (double k : {0.5, 1.0, 2.0}) {
      for (int i = 0; i < kInstances; ++i) {
        const mf::LorentzPoint x = s.point(d, k), y = s.point(d, k), z = s.point(d, k);
        const mf::TangentVector v = s.tangent(x);
        const mf::LorentzPoint ev = exp(x, v);
        const double ce = std::max(ev.constraint_error(), x.constraint_error());
        if (ce > constraint) {
          constraint = ce;
          c_where = "d=" + std::to_string(d) + " k=" + std::to_string(k);
        }
        const mf::TangentVector lv = mf::log_map(x, ev);
        const double r1 = diff(lv.coords(), v.coords()) / norm(v.coords());
        const mf::LorentzPoint back = exp(x, mf::log_map(x, y));
        const double r2 = diff(back.coords(), y.coords()) / norm(y.coords());
        if (std::max(r1, r2) > roundtrip) {
          roundtrip = std::max(r1, r2);
          rt_where = "d=" + std::to_string(d) + " k=" + std::to_string(k);
        }
        const double dxy = mf::distance(x, y), dyx = mf::distance(y, x);
        symmetry = std::max(symmetry, std::abs(dxy - dyx));
        triangle = std::max(triangle, mf::distance(x, z) - dxy - mf::distance(y, z));
        const mf::TangentVector u = s.tangent(x);
        const mf::TangentVector pv = mf::parallel_transport(x, y, v), pu = mf::parallel_transport(x, y, u);
        transport = std::max(transport, std::abs(mf::lorentz_inner(pv.coords(), pu.coords()) -
                                                 mf::lorentz_inner(v.coords(), u.coords())));
      }
    }
  }
  rep.items.push_back(make("hyperboloid constraint", constraint, 1e-8, c_where));
  rep.items.push_back(make("exp/log roundtrip", roundtrip, 1e-7, rt_where));
  rep.items.push_back(make("distance symmetry", symmetry, 0.0));
  rep.items.push_back(make("triangle inequality", std::max(triangle, 0.0), 1e-9));
  rep.items.push_back(make("parallel transport isometry", transport, 1e-7));

  double geo = 0.0;
  for (double t : {0.1, 1.0, 3.0}) {
    const mf::LorentzPoint p({std::cosh(t), std::sinh(t), 0.0}, 1.0);
    geo = std::max(geo, std::abs(mf::distance(mf::origin(3, 1.0), p) - t));
  }
  rep.items.push_back(make("unit-speed geodesic", geo, 1e-10));
}

void gradient_checks(CheckReport& rep, std::uint64_t seed) {
  HyperParams hp;
  hp.dim = 4;
  hp.graph_layers = 1;
  hp.attention_blocks = 1;
  hp.init_std = 0.4;
  Model m(hp, 6);
  std::mt19937_64 rng(seed);
  m.initialize(rng);
  const std::vector<Example> batch{{{0, 1, 2}, 3}, {{4, 4, 1}, 5}, {{2}, 0}};
  std::vector<std::vector<ItemId>> negs;
  for (const Example& e : batch) negs.push_back(sample_negatives(rng, e, 6, 2));
  for (double beta : {0.0, 0.1}) {
    TrainConfig cfg;
    cfg.beta = beta;
    const GradCheckReport r = gradient_check(m, batch, negs, cfg, 1e-5, 1e-3);
    char buf[160];
    std::snprintf(buf, sizeof buf, "worst %s[%zu] analytic=%.6e numeric=%.6e over %zu scalars",
                  r.worst_param.c_str(), r.worst_index, r.analytic, r.numeric, r.checked);
    char name[64];
    std::snprintf(name, sizeof name, "gradient check beta=%g", beta);
    rep.items.push_back(make(name, r.max_rel_error, 1e-3, buf));
  }
}

}  // namespace

bool CheckReport::passed() const {
  return std::all_of(items.begin(), items.end(), [](const CheckItem& c) { return c.passed; });
}

std::string CheckReport::render() const {
  std::string out;
  const CheckItem* worst = nullptr;
  for (const CheckItem& c : items) {
    char buf[320];
    std::snprintf(buf, sizeof buf, "%s  %-30s max_err=%.3e tol=%.1e%s%s\n", c.passed ? "PASS" : "FAIL",
                  c.name.c_str(), c.worst, c.tol, c.detail.empty() ? "" : "  ", c.detail.c_str());
    out += buf;
    if (!c.passed && (!worst || c.worst / std::max(c.tol, 1e-300) > worst->worst / std::max(worst->tol, 1e-300)))
      worst = &c;
  }
  out += worst ? "FAILED: " + worst->name + "\n" : "all checks passed\n";
  return out;
}

CheckReport run_self_check(CheckLevel level, CheckFault fault, std::uint64_t seed) {
  ExpFn exp = [](const mf::LorentzPoint& x, const mf::TangentVector& v) { return mf::exp_map(x, v); };
  if (fault == CheckFault::kPerturbExpMap) {
    exp = [](const mf::LorentzPoint& x, const mf::TangentVector& v) {
      std::vector<double> c(v.coords().begin(), v.coords().end());
      for (double& e : c) e *= 1.001;
      return mf::exp_map(x, mf::TangentVector(std::move(c), x));
    };
  }
  CheckReport rep;
  manifold_checks(rep, exp, seed);
  if (level == CheckLevel::kFull) gradient_checks(rep, seed);
  return rep;
}

}  // namespace hcgr
