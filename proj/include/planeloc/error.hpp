// Copyright 2026 The planeloc Authors
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

namespace planeloc {

enum class ErrorCode {
  kInvalidArgument,
  kNonPositiveDepth,
  kDegenerateDisparity,
  kInsufficientNeighbors,
  kEmptyResult,
  kDegenerateGeometry,
  kSingularSystem,
  kInsufficientObservations,
  kInvalidConfig,
  kNoOverlap,
  kParse,
  kNonRigidPose,
  kIo,
};

const char* ErrorCodeName(ErrorCode code);

// Every failure raised by the library carries one of the codes above so the
// C API can map it onto a status value without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Location-aware failure from one of the text-format readers.
class ParseError : public Error {
 public:
  ParseError(std::string path, int line, int column, const std::string& message);

  const std::string& path() const noexcept { return path_; }
  int line() const noexcept { return line_; }      // 1-based
  int column() const noexcept { return column_; }  // 1-based, 0 if unknown

 private:
  std::string path_;
  int line_;
  int column_;
};

}  // namespace planeloc
