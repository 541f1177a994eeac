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

#ifndef FRIENDAUDIT_DOMAIN_HPP
#define FRIENDAUDIT_DOMAIN_HPP

/** @file domain.hpp Shared vocabulary of the friend audit.
 *
 * Questionnaire answers, suggested actions, user decisions and the
 * relationship state those decisions mutate. Every enum has exactly one
 * canonical text label; the labels are what appear in files and on the wire.
 *
 * Questions 1 and 2 ask how often the user interacts with the friend online
 * and in person. Questions 3 to 5 ask whether the friend would abuse the
 * user's photos, status updates, or news feed.
 **/

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>

#include <json.hpp>

#include "friendaudit/error.hpp"

namespace friendaudit {

enum class FrequencyAnswer : std::uint8_t {
  Frequently,
  Occasionally,
  NotAnymore,
  Never,
  DontRemember,
};

enum class AgreementAnswer : std::uint8_t {
  Agree,
  Disagree,
  DontKnow,
};

/// An answer to any of the five questions. Q1/Q2 hold a FrequencyAnswer,
/// Q3..Q5 an AgreementAnswer.
using Answer = std::variant<FrequencyAnswer, AgreementAnswer>;

inline constexpr int kQuestionCount = 5;

inline constexpr std::array<FrequencyAnswer, 5> kFrequencyAnswers{
    FrequencyAnswer::Frequently, FrequencyAnswer::Occasionally,
    FrequencyAnswer::NotAnymore, FrequencyAnswer::Never,
    FrequencyAnswer::DontRemember};

inline constexpr std::array<AgreementAnswer, 3> kAgreementAnswers{
    AgreementAnswer::Agree, AgreementAnswer::Disagree,
    AgreementAnswer::DontKnow};

/// True for questions 1 and 2 (frequency domain), false for 3..5.
constexpr bool is_frequency_question(int question) noexcept {
  return question == 1 || question == 2;
}

/// Answers for one (user, friend) pair. All five slots are always present.
struct ResponseSet {
  FrequencyAnswer q1 = FrequencyAnswer::Never;
  FrequencyAnswer q2 = FrequencyAnswer::Never;
  AgreementAnswer q3 = AgreementAnswer::DontKnow;
  AgreementAnswer q4 = AgreementAnswer::DontKnow;
  AgreementAnswer q5 = AgreementAnswer::DontKnow;

  /// Answer for question 1..5; throws InvalidArgument otherwise.
  [[nodiscard]] Answer answer(int question) const;

  friend auto operator<=>(const ResponseSet&, const ResponseSet&) = default;
};

/// Builds a ResponseSet from five per-question answers, checking each domain.
ResponseSet make_response_set(std::span<const Answer, 5> answers);

enum class Action : std::uint8_t {
  Unfriend,
  UnfriendOrSandbox,
  Restrict,
  Unfollow,
  Nop,
};

inline constexpr std::array<Action, 5> kActions{
    Action::Unfriend, Action::UnfriendOrSandbox, Action::Restrict,
    Action::Unfollow, Action::Nop};

enum class DecisionKind : std::uint8_t {
  Unfriend,
  Sandbox,
  Restrict,
  Unfollow,
  Ignore,
};

inline constexpr std::array<DecisionKind, 5> kDecisionKinds{
    DecisionKind::Unfriend, DecisionKind::Sandbox, DecisionKind::Restrict,
    DecisionKind::Unfollow, DecisionKind::Ignore};

enum class IgnoreReason : std::uint8_t {
  SuggestionMakesNoSense,
  AgreeButLater,
  AgreeButUnwilling,
  FearOfBeingObserved,
};

inline constexpr std::array<IgnoreReason, 4> kIgnoreReasons{
    IgnoreReason::SuggestionMakesNoSense, IgnoreReason::AgreeButLater,
    IgnoreReason::AgreeButUnwilling, IgnoreReason::FearOfBeingObserved};

/// A user's response to a suggestion. An ignore always carries its reason;
/// an accepted action never does.
class Decision {
 public:
  /// Accepts a defensive action. `kind` must not be Ignore.
  static Decision accept(DecisionKind kind);
  static Decision ignore(IgnoreReason reason) noexcept;
  /// Generic constructor used by parsers; enforces the reason invariant.
  static Decision make(DecisionKind kind, std::optional<IgnoreReason> reason);

  [[nodiscard]] DecisionKind kind() const noexcept { return kind_; }
  [[nodiscard]] std::optional<IgnoreReason> ignore_reason() const noexcept {
    return reason_;
  }

  friend bool operator==(const Decision&, const Decision&) = default;

 private:
  Decision(DecisionKind kind, std::optional<IgnoreReason> reason)
      : kind_(kind), reason_(reason) {}

  DecisionKind kind_;
  std::optional<IgnoreReason> reason_;
};

/// A friendship edge plus the two directed story flows it enables.
/// Without the edge neither flow exists.
struct RelationshipState {
  bool is_friend = true;
  bool user_sees_friend = true;  ///< friend's stories reach the user's feed
  bool friend_sees_user = true;  ///< user's stories reach the friend's feed

  [[nodiscard]] bool valid() const noexcept {
    return is_friend || (!user_sees_friend && !friend_sees_user);
  }

  friend bool operator==(const RelationshipState&,
                         const RelationshipState&) = default;
};

/// Applies a decision to a relationship. Total and idempotent; decisions on
/// flows that are already cut leave the state as is.
RelationshipState apply_action(RelationshipState state,
                               const Decision& decision) noexcept;

// Canonical labels.
std::string_view to_string(FrequencyAnswer value) noexcept;
std::string_view to_string(AgreementAnswer value) noexcept;
std::string_view to_string(const Answer& value) noexcept;
std::string_view to_string(Action value) noexcept;
std::string_view to_string(DecisionKind value) noexcept;
std::string_view to_string(IgnoreReason value) noexcept;

/// Lower-cases and collapses runs of whitespace to single spaces.
std::string normalize_token(std::string_view token);

FrequencyAnswer parse_frequency(std::string_view token);
AgreementAnswer parse_agreement(std::string_view token);
/// Parses `token` in the domain of `question` (1..5). Throws UnknownToken if
/// the label exists in no domain and DomainMismatch if it belongs to the
/// other domain.
Answer parse_answer(int question, std::string_view token);
Action parse_action(std::string_view token);
DecisionKind parse_decision_kind(std::string_view token);
IgnoreReason parse_ignore_reason(std::string_view token);

/// {"q1": label, ..., "q5": label}. Parsing throws ParseError for a missing
/// or non-text slot and the parse_answer errors for a bad label.
nlohmann::ordered_json to_json(const ResponseSet& responses);
ResponseSet response_set_from_json(const nlohmann::ordered_json& j);

/// Short description of what a question asks, used by the questionnaire.
std::string_view question_text(int question);

}  // namespace friendaudit

#endif  // FRIENDAUDIT_DOMAIN_HPP
