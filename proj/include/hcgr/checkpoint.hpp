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

#ifndef HCGR_CHECKPOINT_HPP_
#define HCGR_CHECKPOINT_HPP_

// Model checkpoints: one JSON document
//   {format: "hcgr-v1", hyperparams, catalog_size, params: {name: [[...]]}, rng_seed}
// Doubles are written in shortest round-trip form, so save -> load is exact.

#include <cstdint>
#include <string>

#include "hcgr/model.hpp"

namespace hcgr {

inline constexpr const char* kCheckpointFormat = "hcgr-v1";

struct Checkpoint {
  Model model;
  std::uint64_t rng_seed = 0;
};

std::string checkpoint_to_string(const Model& model, std::uint64_t rng_seed);
// Throws std::invalid_argument on unknown formats or shape mismatches.
Checkpoint checkpoint_from_string(const std::string& text);

void save_checkpoint(const Model& model, std::uint64_t rng_seed, const std::string& path);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace hcgr

#endif  // HCGR_CHECKPOINT_HPP_
