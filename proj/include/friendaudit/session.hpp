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

#ifndef FRIENDAUDIT_SESSION_HPP
#define FRIENDAUDIT_SESSION_HPP

/** @file session.hpp One participant's audit, from friend sampling to the
 * final summary.
 *
 * In questionnaire mode the friends are visited strictly in queue order: the
 * next friend's answers are accepted only once the current friend reached a
 * terminal state (no suggestion, accepted, or ignored). Bogus friends are
 * mixed into the queue and answered like any other friend but never produce
 * a suggestion.
 *
 * In wild mode the answers and the decision are predicted from features in a
 * single pass. Every surfaced suggestion is pending at once and may be
 * decided in any order.
 *
 * Every mutation appends one or more JSON lines to the session log. The log
 * carries everything needed to rebuild the session (see replay_session), and
 * no raw snapshot content.
 **/

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "friendaudit/domain.hpp"
#include "friendaudit/features.hpp"
#include "friendaudit/learning.hpp"
#include "friendaudit/quality.hpp"
#include "friendaudit/rules.hpp"

namespace friendaudit {

enum class SessionMode : std::uint8_t { Questionnaire, Wild };
enum class SessionStatus : std::uint8_t { InProgress, Complete };

/// Pending: not yet answered. AwaitingDecision: a suggestion is shown. The
/// other three are terminal.
enum class EntryState : std::uint8_t {
  Pending,
  AwaitingDecision,
  NoSuggestion,
  Accepted,
  Ignored,
};

std::string_view to_string(SessionMode mode) noexcept;
std::string_view to_string(SessionStatus status) noexcept;
std::string_view to_string(EntryState state) noexcept;
SessionMode parse_session_mode(std::string_view token);

/// Decisions a user may take on a suggested action. Nop admits none.
std::vector<DecisionKind> compatible_decisions(Action action);
bool is_compatible(Action action, DecisionKind decision) noexcept;

struct Suggestion {
  Id friend_id;
  Action action = Action::Nop;
  int matched_rule = 0;
  std::vector<std::string> reasons;
  std::vector<DecisionKind> options;

  friend bool operator==(const Suggestion&, const Suggestion&) = default;
};

struct QueueEntry {
  Id friend_id;
  bool bogus = false;

  friend bool operator==(const QueueEntry&, const QueueEntry&) = default;
};

struct FriendProgress {
  QueueEntry entry;
  EntryState state = EntryState::Pending;
  std::optional<ResponseSet> responses;
  bool predicted = false;
  std::optional<Verdict> verdict;
  std::optional<DecisionKind> predicted_decision;  ///< wild mode only
  bool suggestion_shown = false;
  std::optional<Decision> decision;
  std::vector<ResponseTiming> timings;
  RelationshipState relationship;
};

struct SessionOptions {
  std::optional<Id> session_id;  ///< defaults to "<participant>-<mode>-<seed>"
  int sample_size = 20;
  std::uint64_t seed = 0;
  int min_friend_count = 0;  ///< 0 disables the minimum
  bool attention_passed = true;
  QualityConfig quality;
};

/// Trained models for Q1..Q5 and Decision.
using ModelSet = std::map<TargetName, Model>;

struct ActionTally {
  std::size_t recommended = 0;
  std::size_t accepted = 0;

  friend bool operator==(const ActionTally&, const ActionTally&) = default;
};

struct SessionSummary {
  Id session_id;
  SessionMode mode = SessionMode::Questionnaire;
  std::size_t friends_audited = 0;  ///< real friends only
  std::size_t bogus_friends = 0;
  std::size_t suppressed = 0;  ///< wild mode: non-Nop verdicts predicted ignored
  /// Indexed by Action; the Nop slot stays zero.
  std::array<ActionTally, kActions.size()> per_action{};
  /// Accepted decisions by kind; the Ignore slot counts ignores.
  std::array<std::size_t, kDecisionKinds.size()> decisions{};
  std::array<std::size_t, kIgnoreReasons.size()> ignore_reasons{};
  /// Questionnaire mode only.
  std::optional<QualityVerdict> quality;

  friend bool operator==(const SessionSummary&, const SessionSummary&) = default;
};

class AuditSession {
 public:
  /// Samples `sample_size` friends without replacement and, in
  /// questionnaire mode, inserts the configured bogus friends at seeded
  /// positions. Throws UnknownId, TooFewFriends, InvalidParams.
  static AuditSession create(const SocialSnapshot& snapshot, const Id& participant,
                             SessionMode mode, const SessionOptions& options,
                             const RuleTable& rules);

  [[nodiscard]] const Id& id() const noexcept { return id_; }
  [[nodiscard]] const Id& participant_id() const noexcept { return participant_; }
  [[nodiscard]] SessionMode mode() const noexcept { return mode_; }
  [[nodiscard]] SessionStatus status() const noexcept { return status_; }
  [[nodiscard]] const SessionOptions& options() const noexcept { return options_; }
  [[nodiscard]] const RuleTable& rules() const noexcept { return rules_; }
  [[nodiscard]] const std::vector<FriendProgress>& entries() const noexcept {
    return entries_;
  }
  [[nodiscard]] const FriendProgress& entry(std::string_view friend_id) const;
  /// First non-terminal entry in questionnaire mode; nullopt once complete.
  [[nodiscard]] std::optional<std::size_t> current_index() const;
  [[nodiscard]] bool wild_ran() const noexcept { return wild_ran_; }

  /// Questionnaire mode. `seconds` holds the five per-question answer times
  /// or is empty. Returns the suggestion if one is raised.
  /// Throws OutOfOrder, DuplicateSubmission, UnknownId, InvalidArgument.
  std::optional<Suggestion> submit_responses(std::string_view friend_id,
                                             const ResponseSet& responses,
                                             std::span<const double> seconds = {});

  /// Throws NoPendingSuggestion, IncompatibleDecision, UnknownId,
  /// InvalidArgument.
  RelationshipState submit_decision(std::string_view friend_id,
                                    const Decision& decision,
                                    std::optional<double> seconds = std::nullopt);

  /// Wild mode: predicts every queued friend from its features and returns
  /// the surfaced suggestions in queue order. Feature vectors are dropped as
  /// soon as both predictions are made. Throws MissingModel,
  /// DuplicateSubmission (second call), InvalidArgument (wrong mode).
  std::vector<Suggestion> run_wild(const ModelSet& models, const SocialSnapshot& snapshot);

  /// Wild mode, one friend: records predicted answers and decision. Used by
  /// run_wild and by log replay.
  std::optional<Suggestion> apply_prediction(std::string_view friend_id,
                                             const ResponseSet& predicted,
                                             DecisionKind predicted_decision);

  [[nodiscard]] std::vector<Suggestion> pending_suggestions() const;

  /// Timings and bogus-friend answers collected so far.
  [[nodiscard]] ParticipantRecord participant_record() const;

  /// Throws SessionIncomplete.
  [[nodiscard]] SessionSummary summary() const;

  /// One JSON document per line, newline-terminated.
  [[nodiscard]] const std::vector<std::string>& log() const noexcept { return log_; }
  [[nodiscard]] std::string log_text() const;

 private:
  AuditSession(Id id, Id participant, SessionMode mode, SessionOptions options,
               RuleTable rules, std::vector<QueueEntry> queue);

  friend AuditSession replay_session(std::string_view log, const RuleTable& rules);

  FriendProgress& find(std::string_view friend_id);
  Suggestion make_suggestion(const FriendProgress& p) const;
  void append(const nlohmann::ordered_json& event);
  void log_created();
  void finish_entry();

  Id id_;
  Id participant_;
  SessionMode mode_;
  SessionOptions options_;
  RuleTable rules_;
  std::vector<FriendProgress> entries_;
  SessionStatus status_ = SessionStatus::InProgress;
  bool wild_ran_ = false;
  std::vector<std::string> log_;
};

/// Rebuilds a session from its log by re-running every recorded submission
/// through the pipeline. The regenerated log must match the input byte for
/// byte. Throws ParseError, IntegrityError (rule table checksum or log
/// mismatch), or any error the pipeline raises.
AuditSession replay_session(std::string_view log, const RuleTable& rules);

nlohmann::ordered_json to_json(const Suggestion& suggestion);
nlohmann::ordered_json to_json(const RelationshipState& state);
nlohmann::ordered_json to_json(const SessionSummary& summary);
std::string format_summary(const SessionSummary& summary);

}  // namespace friendaudit

#endif  // FRIENDAUDIT_SESSION_HPP
