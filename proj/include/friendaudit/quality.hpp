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

#ifndef FRIENDAUDIT_QUALITY_HPP
#define FRIENDAUDIT_QUALITY_HPP

/** @file quality.hpp Participant screening.
 *
 * Three independent checks: an upstream attention-check flag, answers given
 * for injected bogus friends, and the mean time spent per screen. A
 * participant is retained only if every check passes. Checks that cannot be
 * evaluated (no timings, a bogus friend left unanswered) count as failures
 * and say why in the verdict annotations.
 **/

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "friendaudit/domain.hpp"
#include "friendaudit/features.hpp"

namespace friendaudit {

enum class QualityCheck : std::uint8_t { AttentionCheck, BogusFriend, Timing };

inline constexpr std::array<QualityCheck, 3> kQualityChecks{
    QualityCheck::AttentionCheck, QualityCheck::BogusFriend, QualityCheck::Timing};

std::string_view to_string(QualityCheck check) noexcept;

/// Question index used for the time spent on a decision screen. Questionnaire
/// answers use 1..5.
inline constexpr int kDecisionTimingIndex = 6;

struct QualityConfig {
  double min_avg_response_seconds = 3.0;
  std::set<Id> bogus_friend_ids{"bogus-1", "bogus-2", "bogus-3"};
  bool attention_check_required = true;

  /// Throws InvalidParams.
  void validate() const;

  friend bool operator==(const QualityConfig&, const QualityConfig&) = default;
};

struct ResponseTiming {
  Id friend_id;
  int question = 1;  ///< 1..5, or kDecisionTimingIndex
  double seconds = 0;

  friend bool operator==(const ResponseTiming&, const ResponseTiming&) = default;
};

struct ParticipantRecord {
  Id id;
  bool attention_passed = true;
  std::vector<ResponseTiming> timings;
  std::vector<std::pair<Id, ResponseSet>> bogus_responses;

  friend bool operator==(const ParticipantRecord&, const ParticipantRecord&) = default;
};

struct BogusCheck {
  bool passed = true;
  std::vector<Id> offending;  ///< in configured id order
};

struct TimingCheck {
  bool passed = true;
  double average_seconds = 0;
  std::size_t count = 0;
};

struct QualityVerdict {
  Id participant_id;
  bool retained = true;
  std::vector<QualityCheck> failed_checks;  ///< in kQualityChecks order
  std::vector<Id> offending_bogus;
  std::optional<double> average_seconds;
  std::vector<std::string> annotations;

  friend bool operator==(const QualityVerdict&, const QualityVerdict&) = default;
};

/// Fails iff a configured bogus friend has Q1 or Q2 outside {Never, Don't
/// Remember}. Throws MissingBogusResponse.
BogusCheck check_bogus(const ParticipantRecord& record, const QualityConfig& config);

/// Fails iff the mean of all timings is strictly below the threshold. Throws
/// NoTimings.
TimingCheck check_timing(const ParticipantRecord& record, const QualityConfig& config);

/// Runs all three checks without short-circuiting.
QualityVerdict assess_participant(const ParticipantRecord& record,
                                  const QualityConfig& config);

struct ScreeningResult {
  std::vector<ParticipantRecord> retained;
  std::vector<std::pair<ParticipantRecord, QualityVerdict>> discarded;
  std::vector<QualityVerdict> verdicts;  ///< one per input record, input order
};

ScreeningResult screen_participants(std::span<const ParticipantRecord> records,
                                    const QualityConfig& config);

// One JSON object per line.
std::vector<ParticipantRecord> load_participants(std::istream& in);
void write_participants(std::ostream& out, std::span<const ParticipantRecord> records);

nlohmann::ordered_json to_json(const QualityConfig& config);
QualityConfig quality_config_from_json(const nlohmann::ordered_json& j);
nlohmann::ordered_json to_json(const QualityVerdict& verdict);
nlohmann::ordered_json to_json(const ParticipantRecord& record);
ParticipantRecord participant_from_json(const nlohmann::ordered_json& j);

/// Per-participant verdict lines followed by aggregate counts.
std::string format_screening_report(const ScreeningResult& result,
                                    const QualityConfig& config);

}  // namespace friendaudit

#endif  // FRIENDAUDIT_QUALITY_HPP
