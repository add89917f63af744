// Copyright 2026 The rnn-factor-lab Authors
// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef RNNLAB_ERRORS_HPP_
#define RNNLAB_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace rnnlab {

/// Process exit codes used by the command-line driver.
enum class ExitCode : int {
  kSuccess = 0,
  kUsage = 1,
  kConfig = 2,
  kData = 3,
  kNumeric = 4,
};

/// Base of every error raised by the library. Each subclass maps to one
/// exit code so the driver can translate exceptions without inspecting
/// messages.
class Error : public std::runtime_error {
 public:
  Error(ExitCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ExitCode code() const noexcept { return code_; }

 private:
  ExitCode code_;
};

// Operand shapes do not conform.
class ShapeError : public Error {
 public:
  explicit ShapeError(const std::string& what) : Error(ExitCode::kConfig, what) {}
};

// A configuration violates a structural constraint (divisibility, rank, ...).
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what)
      : Error(ExitCode::kConfig, what) {}
};

// NaN/Inf where finite values are required.
class NumericError : public Error {
 public:
  explicit NumericError(const std::string& what)
      : Error(ExitCode::kNumeric, what) {}
};

// API misuse, e.g. a cache from one cell variant handed to another.
class UsageError : public Error {
 public:
  explicit UsageError(const std::string& what) : Error(ExitCode::kUsage, what) {}
};

class IndexError : public Error {
 public:
  explicit IndexError(const std::string& what) : Error(ExitCode::kData, what) {}
};

class DataError : public Error {
 public:
  explicit DataError(const std::string& what) : Error(ExitCode::kData, what) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(ExitCode::kData, what) {}
};

// Malformed, truncated or incompatible checkpoint file.
class CheckpointError : public Error {
 public:
  explicit CheckpointError(const std::string& what)
      : Error(ExitCode::kData, what) {}
};

}  // namespace rnnlab

#endif  // RNNLAB_ERRORS_HPP_
