// Copyright 2026 the impactir authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace impactir {

/// Base class for every error raised by the library. The CLI maps any
/// subclass to exit code 1.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid parameters (k < 1, bits out of range, empty inputs where data is required).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Input value outside an operation's domain (e.g. quantizing a non-positive score).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Syntactically malformed input. Carries the 1-based line number when known.
class ParseError : public Error {
 public:
  ParseError(const std::string &what, std::size_t line)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  explicit ParseError(const std::string &what) : Error(what) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_ = 0;
};

/// Well-formed input that violates a data invariant (duplicate ids, bad scores).
class DataError : public Error {
 public:
  using Error::Error;
};

/// Corrupt or incompatible binary index file.
class FormatError : public Error {
 public:
  using Error::Error;
};

/// Filesystem failures; the message always names the path.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace impactir
