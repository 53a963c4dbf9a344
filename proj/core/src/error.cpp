/*
   Copyright 2026 The locdep Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#include "locdep/error.hpp"

namespace locdep {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
  case ErrorCode::InvalidArgument: return "InvalidArgument";
  case ErrorCode::InvalidSize: return "InvalidSize";
  case ErrorCode::MissingPairCover: return "MissingPairCover";
  case ErrorCode::BlockTooSmall: return "BlockTooSmall";
  case ErrorCode::EmptyIndexSet: return "EmptyIndexSet";
  case ErrorCode::GraphTooLarge: return "GraphTooLarge";
  case ErrorCode::DegenerateVariance: return "DegenerateVariance";
  case ErrorCode::EnumerationCapExceeded: return "EnumerationCapExceeded";
  case ErrorCode::DegenerateKernel: return "DegenerateKernel";
  case ErrorCode::ComplexityCapExceeded: return "ComplexityCapExceeded";
  case ErrorCode::InvalidTestFunction: return "InvalidTestFunction";
  case ErrorCode::ExcessRejections: return "ExcessRejections";
  case ErrorCode::DegeneratePoints: return "DegeneratePoints";
  case ErrorCode::GridMismatch: return "GridMismatch";
  case ErrorCode::SchemaError: return "SchemaError";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

} // namespace locdep
