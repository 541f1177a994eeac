// Copyright 2026 The friendaudit Authors
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

#ifndef FRIENDAUDIT_ERROR_HPP
#define FRIENDAUDIT_ERROR_HPP

#include <stdexcept>
#include <string>
#include <string_view>

namespace friendaudit {

/// Every domain failure raised by the library carries one of these codes.
enum class ErrorCode {
  InvalidArgument,
  UnknownToken,
  DomainMismatch,
  ParseError,
  IntegrityError,
  UnknownId,
  NotFriends,
  EmptyClass,
  TooFewGroups,
  UnknownLabel,
  EmptyMatrix,
  DegenerateMargin,
  ZeroVariance,
  LengthMismatch,
  MissingBogusResponse,
  NoTimings,
  TooFewFriends,
  OutOfOrder,
  DuplicateSubmission,
  NoPendingSuggestion,
  IncompatibleDecision,
  MissingIgnoreReason,
  MissingModel,
  SessionIncomplete,
  UnknownSession,
  InvalidParams,
};

std::string_view to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  [[nodiscard]] ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace friendaudit

#endif  // FRIENDAUDIT_ERROR_HPP
