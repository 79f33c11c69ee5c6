/* Copyright 2026 The SDANet Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#ifndef SDANET_ERRORS_H_
#define SDANET_ERRORS_H_

#include <stdexcept>
#include <string>

namespace sdanet {

// Base of every error thrown by the library. `kind()` is a stable short tag
// used by the command-line tool as the diagnostic prefix.
class Error : public std::runtime_error {
 public:
  Error(const char* kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  const char* kind() const noexcept { return kind_; }

 private:
  const char* kind_;
};

// Shape disagreement between operands. The message names the offending axis.
class DimensionError : public Error {
 public:
  explicit DimensionError(const std::string& what) : Error("dimension", what) {}
};

// Invalid hyper-parameter or structural setting (groups, kernel size, k...).
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error("config", what) {}
};

// Caller violated an API precondition (e.g. backward on a non-scalar).
class ContractError : public Error {
 public:
  explicit ContractError(const std::string& what) : Error("contract", what) {}
};

// Computation record reused after it was consumed by backward().
class LifecycleError : public Error {
 public:
  explicit LifecycleError(const std::string& what) : Error("lifecycle", what) {}
};

// Softmax row with every entry masked out.
class DegenerateRowError : public Error {
 public:
  explicit DegenerateRowError(const std::string& what)
      : Error("degenerate-row", what) {}
};

// A function under evaluation produced a non-finite value.
class EvaluationError : public Error {
 public:
  explicit EvaluationError(const std::string& what) : Error("evaluation", what) {}
};

// Malformed cube or checkpoint file.
class FormatError : public Error {
 public:
  explicit FormatError(const std::string& what) : Error("format", what) {}
};

// Value outside the admissible range of a metric or file field.
class DomainError : public Error {
 public:
  explicit DomainError(const std::string& what) : Error("domain", what) {}
};

// Training produced a non-finite loss.
class DivergenceError : public Error {
 public:
  explicit DivergenceError(const std::string& what) : Error("divergence", what) {}
};

// Filesystem failure (unreadable input, unwritable output).
class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error("io", what) {}
};

}  // namespace sdanet

#endif  // SDANET_ERRORS_H_
