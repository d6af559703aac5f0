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

#include "planeloc/error.hpp"

#include <utility>

namespace planeloc {
namespace {

std::string FormatLocation(const std::string& path, int line, int column,
                           const std::string& message) {
  std::string out = path + ":" + std::to_string(line);
  if (column > 0) out += ":" + std::to_string(column);
  return out + ": " + message;
}

}  // namespace

const char* ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kNonPositiveDepth: return "NonPositiveDepth";
    case ErrorCode::kDegenerateDisparity: return "DegenerateDisparity";
    case ErrorCode::kInsufficientNeighbors: return "InsufficientNeighbors";
    case ErrorCode::kEmptyResult: return "EmptyResult";
    case ErrorCode::kDegenerateGeometry: return "DegenerateGeometry";
    case ErrorCode::kSingularSystem: return "SingularSystem";
    case ErrorCode::kInsufficientObservations: return "InsufficientObservations";
    case ErrorCode::kInvalidConfig: return "InvalidConfig";
    case ErrorCode::kNoOverlap: return "NoOverlap";
    case ErrorCode::kParse: return "ParseError";
    case ErrorCode::kNonRigidPose: return "NonRigidPose";
    case ErrorCode::kIo: return "IoFailure";
  }
  return "Unknown";
}

ParseError::ParseError(std::string path, int line, int column, const std::string& message)
    : Error(ErrorCode::kParse, FormatLocation(path, line, column, message)),
      path_(std::move(path)),
      line_(line),
      column_(column) {}

}  // namespace planeloc
