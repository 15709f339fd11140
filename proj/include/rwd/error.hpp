// rwd/error.hpp

// Copyright 2026  The rwd Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef RWD_ERROR_HPP_
#define RWD_ERROR_HPP_

#include <cstdint>
#include <stdexcept>
#include <string>

namespace rwd {

/// Base class for every error raised by the library. The category string is
/// stable and machine-parseable; the CLI prints it as the first field of its
/// one-line error report.
class Error : public std::runtime_error {
 public:
  Error(const char *category, const std::string &what)
      : std::runtime_error(what), category_(category) {}
  const char *category() const noexcept { return category_; }

 private:
  const char *category_;
};

/// Malformed text input (manifest rows, sidecars, catalog files).
class ParseError : public Error {
 public:
  ParseError(const std::string &what, std::size_t line = 0)
      : Error("parse", line ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Well-formed input that breaks a contract (duplicate ids, bad sizes, ...).
class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string &what) : Error("validation", what) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string &what) : Error("io", what) {}
};

/// Corrupt binary file; carries the byte offset where decoding failed.
class FormatError : public Error {
 public:
  FormatError(const std::string &what, std::uint64_t offset)
      : Error("format", "byte offset " + std::to_string(offset) + ": " + what),
        offset_(offset) {}
  std::uint64_t offset() const noexcept { return offset_; }

 private:
  std::uint64_t offset_;
};

}  // namespace rwd

#endif  // RWD_ERROR_HPP_
