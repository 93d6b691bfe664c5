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

#ifndef HCGR_ERROR_HPP_
#define HCGR_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace hcgr {

// Precondition violations (shape, range, format) use std::invalid_argument.
// These two cover the remaining failure classes the C API distinguishes.

// A forward value or loss went NaN/Inf.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// File could not be opened, read or written.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace hcgr

#endif  // HCGR_ERROR_HPP_
