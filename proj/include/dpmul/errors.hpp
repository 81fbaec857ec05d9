//
// Copyright 2026 The dpmul Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#ifndef DPMUL_ERRORS_HPP_
#define DPMUL_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace dpmul {

// Base for every error the library throws. `invariant()` names the violated
// contract in a short machine-readable form (e.g. "epsilon>0").
class Error : public std::runtime_error {
 public:
  Error(std::string invariant, const std::string& message)
      : std::runtime_error(message), invariant_(std::move(invariant)) {}

  const std::string& invariant() const { return invariant_; }

 private:
  std::string invariant_;
};

// Invalid numeric or structural parameter.
class ParameterError : public Error {
 public:
  using Error::Error;
};

// Operation called in the wrong regime or with mismatched components.
class UsageError : public Error {
 public:
  using Error::Error;
};

// Numerical routine failed to converge or hit an unusable condition.
class NumericError : public Error {
 public:
  using Error::Error;
};

}  // namespace dpmul

#endif  // DPMUL_ERRORS_HPP_
