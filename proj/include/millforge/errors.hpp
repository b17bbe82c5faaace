// Copyright 2026 The Millforge Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      https://www.apache.org/licenses/LICENSE-2.0
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

namespace millforge {

// Invalid widths, chunk sizes, matrix shapes and similar parameter errors.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// API misuse: mismatched share owners, duplicate plan entries, wrong role.
class MisuseError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Wire-level or coordination failures between the two parties.
class ProtocolError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Raised inside a party when its peer failed and the channel was torn down.
class PeerAborted : public ProtocolError {
 public:
  PeerAborted() : ProtocolError("peer aborted the session") {}
};

class OverflowError : public std::overflow_error {
 public:
  using std::overflow_error::overflow_error;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, std::size_t column, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ", column " +
                           std::to_string(column) + ": " + what),
        line_(line),
        column_(column) {}

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

}  // namespace millforge
