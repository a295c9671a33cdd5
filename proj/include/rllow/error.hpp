//
// Copyright 2026 The rllow Authors
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

#ifndef RLLOW_ERROR_HPP_
#define RLLOW_ERROR_HPP_

#include <optional>
#include <stdexcept>
#include <string>

namespace rllow {

// Zero-based (state, first action, second action) triple with first < second.
struct PairIndex {
  int state = 0;
  int first = 0;
  int second = 0;

  friend bool operator==(const PairIndex&, const PairIndex&) = default;
};

enum class ErrorKind {
  kValidation,     // malformed input or violated precondition
  kInconsistency,  // feature differences not spanned by observed pairs
  kNumerical,      // factorization / convergence failure
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& what)
      : Error(ErrorKind::kValidation, what) {}
};

class InconsistencyError : public Error {
 public:
  InconsistencyError(const std::string& what, PairIndex witness)
      : Error(ErrorKind::kInconsistency, what), witness_(witness) {}

  const PairIndex& witness() const { return witness_; }

 private:
  PairIndex witness_;
};

class NumericalError : public Error {
 public:
  explicit NumericalError(const std::string& what)
      : Error(ErrorKind::kNumerical, what) {}
};

// Process exit code for the CLI: 2 validation, 3 inconsistency, 4 numerical.
inline int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kValidation:
      return 2;
    case ErrorKind::kInconsistency:
      return 3;
    case ErrorKind::kNumerical:
      return 4;
  }
  return 1;
}

}  // namespace rllow

#endif  // RLLOW_ERROR_HPP_
