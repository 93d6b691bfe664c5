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

#ifndef HCGR_SELF_CHECK_HPP_
#define HCGR_SELF_CHECK_HPP_

// Built-in diagnostics: manifold invariants on random instances and, at the
// full level, a finite-difference sweep over a toy model.

#include <cstdint>
#include <string>
#include <vector>

namespace hcgr {

enum class CheckLevel { kQuick, kFull };

// Fault injection for exercising the diagnostics themselves.
enum class CheckFault { kNone, kPerturbExpMap };

struct CheckItem {
  std::string name;
  bool passed = false;
  double worst = 0.0;  // largest observed error
  double tol = 0.0;
  std::string detail;
};

struct CheckReport {
  std::vector<CheckItem> items;
  bool passed() const;
  // One line per check plus a summary line naming the worst failure.
  std::string render() const;
};

CheckReport run_self_check(CheckLevel level, CheckFault fault = CheckFault::kNone, std::uint64_t seed = 0);

}  // namespace hcgr

#endif  // HCGR_SELF_CHECK_HPP_
