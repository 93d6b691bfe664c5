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

#include "hcgr/config.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "hcgr/error.hpp"

namespace hcgr {

namespace {

enum class Kind { kUInt, kPosUInt, kReal, kBool, kString, kAggregator, kActivation, kKs };

struct KeySpec {
  const char* name;
  Kind kind;
  const char* def;
};

// Full-scale defaults; desk-scale runs override dim, lr and batch_size.
const KeySpec kKeys[] = {
    {"dim", Kind::kPosUInt, "128"},
    {"graph_layers", Kind::kPosUInt, "2"},
    {"attention_blocks", Kind::kPosUInt, "1"},
    {"max_session_len", Kind::kPosUInt, "50"},
    {"aggregator", Kind::kAggregator, "multi_hop"},
    {"activation", Kind::kActivation, "leaky_relu"},
    {"init_std", Kind::kReal, "0.1"},
    {"lr", Kind::kReal, "0.001"},
    {"lr_decay", Kind::kReal, "0.5"},
    {"lr_decay_every", Kind::kPosUInt, "3"},
    {"l2", Kind::kReal, "0.003"},
    {"batch_size", Kind::kPosUInt, "128"},
    {"epochs", Kind::kUInt, "30"},
    {"patience", Kind::kPosUInt, "10"},
    {"gamma", Kind::kReal, "1.0"},
    {"beta", Kind::kReal, "0.1"},
    {"margin", Kind::kReal, "0.5"},
    {"negatives", Kind::kUInt, "1"},
    {"seed", Kind::kUInt, "0"},
    {"threads", Kind::kPosUInt, "1"},
    {"min_item_freq", Kind::kUInt, "3"},
    {"min_session_len", Kind::kUInt, "3"},
    {"all_prefixes", Kind::kBool, "false"},
    {"ks", Kind::kKs, "10,20"},
    {"data", Kind::kString, ""},
    {"checkpoint", Kind::kString, ""},
    {"out_dir", Kind::kString, ""},
};

const KeySpec* find_key(const std::string& key) {
  for (const KeySpec& k : kKeys)
    if (key == k.name) return &k;
  return nullptr;
}

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

std::uint64_t parse_uint(const std::string& key, const std::string& v) {
  if (v.empty() || v.find_first_not_of("0123456789") != std::string::npos)
    throw std::invalid_argument(key + ": expected a non-negative integer, got '" + v + "'");
  errno = 0;
  const unsigned long long x = std::strtoull(v.c_str(), nullptr, 10);
  if (errno == ERANGE) throw std::invalid_argument(key + ": value out of range");
  return x;
}

double parse_real(const std::string& key, const std::string& v) {
  char* end = nullptr;
  errno = 0;
  const double x = std::strtod(v.c_str(), &end);
  if (v.empty() || end != v.c_str() + v.size() || errno == ERANGE || !std::isfinite(x))
    throw std::invalid_argument(key + ": expected a real number, got '" + v + "'");
  return x;
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw std::invalid_argument(key + ": expected true or false, got '" + v + "'");
}

std::vector<std::size_t> parse_ks(const std::string& key, const std::string& v) {
  std::vector<std::size_t> ks;
  std::stringstream in(v);
  std::string part;
  while (std::getline(in, part, ',')) {
    const std::size_t k = parse_uint(key, trim(part));
    if (k == 0) throw std::invalid_argument(key + ": cutoffs must be >= 1");
    ks.push_back(k);
  }
  if (ks.empty()) throw std::invalid_argument(key + ": expected a comma-separated list");
  return ks;
}

void check_value(const KeySpec& k, const std::string& v) {
  switch (k.kind) {
    case Kind::kUInt: parse_uint(k.name, v); break;
    case Kind::kPosUInt:
      if (parse_uint(k.name, v) == 0) throw std::invalid_argument(std::string(k.name) + ": must be >= 1");
      break;
    case Kind::kReal: parse_real(k.name, v); break;
    case Kind::kBool: parse_bool(k.name, v); break;
    case Kind::kString: break;
    case Kind::kAggregator: parse_aggregator(v); break;
    case Kind::kActivation: parse_activation(v); break;
    case Kind::kKs: parse_ks(k.name, v); break;
  }
}

}  // namespace

Config::Config() {
  for (const KeySpec& k : kKeys) values_[k.name] = k.def;
}

const std::vector<std::string>& Config::known_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> v;
    for (const KeySpec& k : kKeys) v.emplace_back(k.name);
    return v;
  }();
  return keys;
}

bool Config::is_known(const std::string& key) { return find_key(key) != nullptr; }

void Config::set(const std::string& key, const std::string& value) {
  const KeySpec* k = find_key(key);
  if (!k) throw std::invalid_argument("unknown config key '" + key + "'");
  const std::string v = trim(value);
  check_value(*k, v);
  values_[key] = v;
  explicit_[key] = true;
}

const std::string& Config::get(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) throw std::invalid_argument("unknown config key '" + key + "'");
  return it->second;
}

void Config::load_text(const std::string& text, const std::string& source) {
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    const std::string where = source + ":" + std::to_string(lineno) + ": ";
    if (eq == std::string::npos) throw std::invalid_argument(where + "expected key=value");
    try {
      set(trim(t.substr(0, eq)), t.substr(eq + 1));
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument(where + e.what());
    }
  }
}

void Config::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  load_text(buf.str(), path);
}

HyperParams Config::hyper() const {
  HyperParams hp;
  hp.dim = parse_uint("dim", get("dim"));
  hp.graph_layers = parse_uint("graph_layers", get("graph_layers"));
  hp.attention_blocks = parse_uint("attention_blocks", get("attention_blocks"));
  hp.max_session_len = parse_uint("max_session_len", get("max_session_len"));
  hp.aggregator = parse_aggregator(get("aggregator"));
  hp.activation = parse_activation(get("activation"));
  hp.init_std = parse_real("init_std", get("init_std"));
  hp.validate();
  return hp;
}

TrainConfig Config::train() const {
  TrainConfig c;
  c.learning_rate = parse_real("lr", get("lr"));
  c.lr_decay = parse_real("lr_decay", get("lr_decay"));
  c.lr_decay_every = parse_uint("lr_decay_every", get("lr_decay_every"));
  c.l2 = parse_real("l2", get("l2"));
  c.batch_size = parse_uint("batch_size", get("batch_size"));
  c.epochs = parse_uint("epochs", get("epochs"));
  c.patience = parse_uint("patience", get("patience"));
  c.gamma = parse_real("gamma", get("gamma"));
  c.beta = parse_real("beta", get("beta"));
  c.margin = parse_real("margin", get("margin"));
  c.negatives = parse_uint("negatives", get("negatives"));
  c.seed = seed();
  c.threads = parse_uint("threads", get("threads"));
  c.validate();
  return c;
}

PrepareConfig Config::prepare() const {
  PrepareConfig p;
  p.min_item_freq = parse_uint("min_item_freq", get("min_item_freq"));
  p.min_session_len = parse_uint("min_session_len", get("min_session_len"));
  p.max_session_len = parse_uint("max_session_len", get("max_session_len"));
  p.seed = seed();
  p.all_prefixes = parse_bool("all_prefixes", get("all_prefixes"));
  return p;
}

std::vector<std::size_t> Config::ks() const { return parse_ks("ks", get("ks")); }

std::uint64_t Config::seed() const { return parse_uint("seed", get("seed")); }

std::string Config::render() const {
  std::string out;
  for (const auto& [k, v] : values_) out += k + "=" + v + "\n";
  return out;
}

}  // namespace hcgr
