// Copyright 2026 The aerialdet Authors
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

#include <stdexcept>
#include <string>

namespace aerialdet {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or out-of-contract input data (bad files, invalid configs,
/// precondition violations on values supplied by a caller).
class DataError : public Error {
 public:
  using Error::Error;
};

/// A text document failed to parse. Carries the 1-based line and the field.
class ParseError : public DataError {
 public:
  ParseError(std::size_t line, std::string field, const std::string& what)
      : DataError("line " + std::to_string(line) + ", field " + field + ": " + what),
        line_(line),
        field_(std::move(field)) {}

  std::size_t line() const noexcept { return line_; }
  const std::string& field() const noexcept { return field_; }

 private:
  std::size_t line_;
  std::string field_;
};

/// A detector backend failed on one request. The pipeline skips the frame.
class DetectorError : public Error {
 public:
  DetectorError(int frame_idx, const std::string& what)
      : Error("frame " + std::to_string(frame_idx) + ": " + what), frame_idx_(frame_idx) {}

  int frame_idx() const noexcept { return frame_idx_; }

 private:
  int frame_idx_;
};

}  // namespace aerialdet
