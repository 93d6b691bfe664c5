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

#include "hcgr/checkpoint.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "hcgr/error.hpp"
#include "json.hpp"

namespace hcgr {

using nlohmann::json;
using nlohmann::ordered_json;

std::string checkpoint_to_string(const Model& model, std::uint64_t rng_seed) {
  const HyperParams& hp = model.hyper();
  ordered_json j;
  j["format"] = kCheckpointFormat;
  j["hyperparams"] = {{"dim", hp.dim},
                      {"graph_layers", hp.graph_layers},
                      {"attention_blocks", hp.attention_blocks},
                      {"max_session_len", hp.max_session_len},
                      {"aggregator", to_string(hp.aggregator)},
                      {"activation", to_string(hp.activation)},
                      {"init_std", hp.init_std}};
  j["catalog_size"] = model.catalog_size();
  ordered_json params = ordered_json::object();
  const ModelParams& p = model.params();
  for (ad::ParamId id = 0; id < p.count(); ++id) {
    ordered_json rows = ordered_json::array();
    for (std::size_t r = 0; r < p[id].rows(); ++r) {
      const auto row = p[id].row_span(r);
      rows.push_back(std::vector<double>(row.begin(), row.end()));
    }
    params[p.name(id)] = std::move(rows);
  }
  j["params"] = std::move(params);
  j["rng_seed"] = rng_seed;
  return j.dump() + "\n";
}

Checkpoint checkpoint_from_string(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("checkpoint is not valid JSON: ") + e.what());
  }
  if (!j.is_object() || !j.contains("format") || !j["format"].is_string())
    throw std::invalid_argument("checkpoint has no format field");
  const std::string fmt = j["format"].get<std::string>();
  if (fmt != kCheckpointFormat)
    throw std::invalid_argument("unknown checkpoint format '" + fmt + "' (expected " + kCheckpointFormat + ")");
  try {
    const json& h = j.at("hyperparams");
    HyperParams hp;
    hp.dim = h.at("dim");
    hp.graph_layers = h.at("graph_layers");
    hp.attention_blocks = h.at("attention_blocks");
    hp.max_session_len = h.at("max_session_len");
    hp.aggregator = parse_aggregator(h.at("aggregator"));
    hp.activation = parse_activation(h.at("activation"));
    hp.init_std = h.at("init_std");
    Checkpoint ck{Model(hp, j.at("catalog_size").get<std::size_t>()), j.at("rng_seed").get<std::uint64_t>()};
    ModelParams& p = ck.model.params();
    const json& params = j.at("params");
    if (params.size() != p.count()) throw std::invalid_argument("checkpoint parameter count does not match");
    for (ad::ParamId id = 0; id < p.count(); ++id) {
      const std::string& name = p.name(id);
      if (!params.contains(name)) throw std::invalid_argument("checkpoint is missing parameter '" + name + "'");
      const json& rows = params[name];
      Tensor& t = p[id];
      if (!rows.is_array() || rows.size() != t.rows())
        throw std::invalid_argument("checkpoint parameter '" + name + "' has the wrong row count");
      for (std::size_t r = 0; r < t.rows(); ++r) {
        const auto row = rows[r].get<std::vector<double>>();
        if (row.size() != t.cols())
          throw std::invalid_argument("checkpoint parameter '" + name + "' has the wrong column count");
        std::copy(row.begin(), row.end(), t.row_span(r).begin());
      }
      if (!t.all_finite()) throw std::invalid_argument("checkpoint parameter '" + name + "' is not finite");
    }
    return ck;
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("malformed checkpoint: ") + e.what());
  }
}

void save_checkpoint(const Model& model, std::uint64_t rng_seed, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write '" + path + "'");
  out << checkpoint_to_string(model, rng_seed);
  if (!out) throw IoError("write failed for '" + path + "'");
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return checkpoint_from_string(buf.str());
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument(path + ": " + e.what());
  }
}

}  // namespace hcgr
