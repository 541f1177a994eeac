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

#include "friendaudit/domain.hpp"

#include <cctype>

namespace friendaudit {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::UnknownToken: return "UnknownToken";
    case ErrorCode::DomainMismatch: return "DomainMismatch";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::IntegrityError: return "IntegrityError";
    case ErrorCode::UnknownId: return "UnknownId";
    case ErrorCode::NotFriends: return "NotFriends";
    case ErrorCode::EmptyClass: return "EmptyClass";
    case ErrorCode::TooFewGroups: return "TooFewGroups";
    case ErrorCode::UnknownLabel: return "UnknownLabel";
    case ErrorCode::EmptyMatrix: return "EmptyMatrix";
    case ErrorCode::DegenerateMargin: return "DegenerateMargin";
    case ErrorCode::ZeroVariance: return "ZeroVariance";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::MissingBogusResponse: return "MissingBogusResponse";
    case ErrorCode::NoTimings: return "NoTimings";
    case ErrorCode::TooFewFriends: return "TooFewFriends";
    case ErrorCode::OutOfOrder: return "OutOfOrder";
    case ErrorCode::DuplicateSubmission: return "DuplicateSubmission";
    case ErrorCode::NoPendingSuggestion: return "NoPendingSuggestion";
    case ErrorCode::IncompatibleDecision: return "IncompatibleDecision";
    case ErrorCode::MissingIgnoreReason: return "MissingIgnoreReason";
    case ErrorCode::MissingModel: return "MissingModel";
    case ErrorCode::SessionIncomplete: return "SessionIncomplete";
    case ErrorCode::UnknownSession: return "UnknownSession";
    case ErrorCode::InvalidParams: return "InvalidParams";
  }
  return "Unknown";
}

Answer ResponseSet::answer(int question) const {
  switch (question) {
    case 1: return q1;
    case 2: return q2;
    case 3: return q3;
    case 4: return q4;
    case 5: return q5;
    default:
      throw Error(ErrorCode::InvalidArgument,
                  "question index out of range: " + std::to_string(question));
  }
}

ResponseSet make_response_set(std::span<const Answer, 5> answers) {
  ResponseSet rs;
  for (int q = 1; q <= kQuestionCount; ++q) {
    const Answer& a = answers[static_cast<std::size_t>(q - 1)];
    if (is_frequency_question(q) != std::holds_alternative<FrequencyAnswer>(a)) {
      throw Error(ErrorCode::DomainMismatch,
                  "answer '" + std::string(to_string(a)) +
                      "' is not valid for Q" + std::to_string(q));
    }
  }
  rs.q1 = std::get<FrequencyAnswer>(answers[0]);
  rs.q2 = std::get<FrequencyAnswer>(answers[1]);
  rs.q3 = std::get<AgreementAnswer>(answers[2]);
  rs.q4 = std::get<AgreementAnswer>(answers[3]);
  rs.q5 = std::get<AgreementAnswer>(answers[4]);
  return rs;
}

Decision Decision::accept(DecisionKind kind) {
  if (kind == DecisionKind::Ignore) {
    throw Error(ErrorCode::MissingIgnoreReason, "ignore requires a reason");
  }
  return Decision(kind, std::nullopt);
}

Decision Decision::ignore(IgnoreReason reason) noexcept {
  return Decision(DecisionKind::Ignore, reason);
}

Decision Decision::make(DecisionKind kind, std::optional<IgnoreReason> reason) {
  if (kind == DecisionKind::Ignore) {
    if (!reason) {
      throw Error(ErrorCode::MissingIgnoreReason, "ignore requires a reason");
    }
    return Decision(kind, reason);
  }
  if (reason) {
    throw Error(ErrorCode::InvalidArgument,
                "only an ignore decision carries a reason");
  }
  return Decision(kind, std::nullopt);
}

RelationshipState apply_action(RelationshipState state,
                               const Decision& decision) noexcept {
  switch (decision.kind()) {
    case DecisionKind::Unfollow:
      state.user_sees_friend = false;
      break;
    case DecisionKind::Restrict:
      state.friend_sees_user = false;
      break;
    case DecisionKind::Sandbox:
      state.user_sees_friend = false;
      state.friend_sees_user = false;
      break;
    case DecisionKind::Unfriend:
      state = RelationshipState{false, false, false};
      break;
    case DecisionKind::Ignore:
      break;
  }
  return state;
}

std::string_view to_string(FrequencyAnswer value) noexcept {
  switch (value) {
    case FrequencyAnswer::Frequently: return "Frequently";
    case FrequencyAnswer::Occasionally: return "Occasionally";
    case FrequencyAnswer::NotAnymore: return "Not Anymore";
    case FrequencyAnswer::Never: return "Never";
    case FrequencyAnswer::DontRemember: return "Don't Remember";
  }
  return "";
}

std::string_view to_string(AgreementAnswer value) noexcept {
  switch (value) {
    case AgreementAnswer::Agree: return "Agree";
    case AgreementAnswer::Disagree: return "Disagree";
    case AgreementAnswer::DontKnow: return "Don't Know";
  }
  return "";
}

std::string_view to_string(const Answer& value) noexcept {
  return std::visit([](auto v) { return to_string(v); }, value);
}

std::string_view to_string(Action value) noexcept {
  switch (value) {
    case Action::Unfriend: return "Unfriend";
    case Action::UnfriendOrSandbox: return "UnfriendOrSandbox";
    case Action::Restrict: return "Restrict";
    case Action::Unfollow: return "Unfollow";
    case Action::Nop: return "Nop";
  }
  return "";
}

std::string_view to_string(DecisionKind value) noexcept {
  switch (value) {
    case DecisionKind::Unfriend: return "unfriend";
    case DecisionKind::Sandbox: return "sandbox";
    case DecisionKind::Restrict: return "restrict";
    case DecisionKind::Unfollow: return "unfollow";
    case DecisionKind::Ignore: return "ignore";
  }
  return "";
}

std::string_view to_string(IgnoreReason value) noexcept {
  switch (value) {
    case IgnoreReason::SuggestionMakesNoSense: return "SuggestionMakesNoSense";
    case IgnoreReason::AgreeButLater: return "AgreeButLater";
    case IgnoreReason::AgreeButUnwilling: return "AgreeButUnwilling";
    case IgnoreReason::FearOfBeingObserved: return "FearOfBeingObserved";
  }
  return "";
}

std::string normalize_token(std::string_view token) {
  std::string out;
  out.reserve(token.size());
  bool pending_space = false;
  for (char c : token) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) {
      out.push_back(' ');
      pending_space = false;
    }
    out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  return out;
}

namespace {

// Labels also match in their identifier spelling ("NotAnymore", "DontKnow").
std::string match_key(std::string_view token) {
  std::string key;
  for (char c : normalize_token(token)) {
    if (c != ' ' && c != '\'') key.push_back(c);
  }
  return key;
}

template <typename Enum, std::size_t N>
std::optional<Enum> find_label(const std::array<Enum, N>& values,
                               std::string_view token) {
  const std::string key = match_key(token);
  for (Enum v : values) {
    if (match_key(to_string(v)) == key) return v;
  }
  return std::nullopt;
}

[[noreturn]] void unknown(std::string_view what, std::string_view token) {
  throw Error(ErrorCode::UnknownToken,
              "unknown " + std::string(what) + " '" + std::string(token) + "'");
}

}  // namespace

FrequencyAnswer parse_frequency(std::string_view token) {
  if (auto v = find_label(kFrequencyAnswers, token)) return *v;
  if (find_label(kAgreementAnswers, token)) {
    throw Error(ErrorCode::DomainMismatch,
                "'" + std::string(token) + "' is not a frequency answer");
  }
  unknown("answer", token);
}

AgreementAnswer parse_agreement(std::string_view token) {
  if (auto v = find_label(kAgreementAnswers, token)) return *v;
  if (find_label(kFrequencyAnswers, token)) {
    throw Error(ErrorCode::DomainMismatch,
                "'" + std::string(token) + "' is not an agreement answer");
  }
  unknown("answer", token);
}

Answer parse_answer(int question, std::string_view token) {
  if (question < 1 || question > kQuestionCount) {
    throw Error(ErrorCode::InvalidArgument,
                "question index out of range: " + std::to_string(question));
  }
  if (is_frequency_question(question)) return parse_frequency(token);
  return parse_agreement(token);
}

Action parse_action(std::string_view token) {
  if (auto v = find_label(kActions, token)) return *v;
  const std::string key = match_key(token);
  if (key == "unfriend/sandbox") return Action::UnfriendOrSandbox;
  unknown("action", token);
}

DecisionKind parse_decision_kind(std::string_view token) {
  if (auto v = find_label(kDecisionKinds, token)) return *v;
  unknown("decision", token);
}

IgnoreReason parse_ignore_reason(std::string_view token) {
  if (auto v = find_label(kIgnoreReasons, token)) return *v;
  unknown("ignore reason", token);
}

nlohmann::ordered_json to_json(const ResponseSet& responses) {
  nlohmann::ordered_json j;
  for (int q = 1; q <= kQuestionCount; ++q) {
    j["q" + std::to_string(q)] = to_string(responses.answer(q));
  }
  return j;
}

ResponseSet response_set_from_json(const nlohmann::ordered_json& j) {
  if (!j.is_object()) throw Error(ErrorCode::ParseError, "responses must be an object");
  std::array<Answer, 5> answers;
  for (int q = 1; q <= kQuestionCount; ++q) {
    const std::string key = "q" + std::to_string(q);
    const auto it = j.find(key);
    if (it == j.end() || !it->is_string()) {
      throw Error(ErrorCode::ParseError, "responses lack a text value for " + key);
    }
    answers[static_cast<std::size_t>(q - 1)] =
        parse_answer(q, it->get<std::string>());
  }
  return make_response_set(answers);
}

std::string_view question_text(int question) {
  switch (question) {
    case 1: return "Online contact with this friend";
    case 2: return "Face-to-face contact with this friend";
    case 3: return "Would this friend misuse a photo you share?";
    case 4: return "Would this friend misuse a status you share?";
    case 5: return "Does this friend spread harmful or untrue content?";
    default:
      throw Error(ErrorCode::InvalidArgument,
                  "question index out of range: " + std::to_string(question));
  }
}

}  // namespace friendaudit
