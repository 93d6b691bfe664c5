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

#ifndef HCGR_CONFIG_HPP_
#define HCGR_CONFIG_HPP_

// Flat key=value run configuration. Defaults < config file < explicit set().
// Unknown keys and unparsable values are rejected when they are set.

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "hcgr/data.hpp"
#include "hcgr/model.hpp"
#include "hcgr/training.hpp"

namespace hcgr {

class Config {
 public:
  Config();

  static const std::vector<std::string>& known_keys();
  static bool is_known(const std::string& key);

  // Throws std::invalid_argument for unknown keys or bad values.
  void set(const std::string& key, const std::string& value);
  const std::string& get(const std::string& key) const;
  bool was_set(const std::string& key) const { return explicit_.count(key) != 0; }

  // '#' comments, blank lines, `key = value`. Errors name the line.
  void load_file(const std::string& path);
  void load_text(const std::string& text, const std::string& source = "<config>");

  HyperParams hyper() const;
  TrainConfig train() const;
  PrepareConfig prepare() const;
  std::vector<std::size_t> ks() const;
  std::uint64_t seed() const;

  // Sorted `key=value` lines.
  std::string render() const;

 private:
  std::map<std::string, std::string> values_;
  std::map<std::string, bool> explicit_;
};

}  // namespace hcgr

#endif  // HCGR_CONFIG_HPP_
