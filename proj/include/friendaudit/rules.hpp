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

#ifndef FRIENDAUDIT_RULES_HPP
#define FRIENDAUDIT_RULES_HPP

/** @file rules.hpp First-match rule table over questionnaire responses.
 *
 * A rule holds one pattern per question and an action. Rules are tested in
 * order and the first rule whose five patterns all match decides the action,
 * the same way a firewall chain is evaluated.
 *
 * A negated pattern `!A` matches every answer other than A. In particular
 * "Don't Remember" satisfies `!Never` and "Don't Know" satisfies `!Agree`.
 * That is easy to misread but the rule rows rely on it.
 *
 * Rule table file format, one rule per line:
 *
 *     <index> | <Q1> | <Q2> | <Q3> | <Q4> | <Q5> | <action>
 *
 * where each slot is `*`, `<label>` or `!<label>`. Blank lines and lines
 * starting with `#` are ignored.
 **/

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "friendaudit/domain.hpp"

namespace friendaudit {

class SlotPattern {
 public:
  enum class Kind : std::uint8_t { Any, Is, Not };

  static SlotPattern any() noexcept { return SlotPattern(Kind::Any, {}); }
  static SlotPattern is(Answer a) noexcept { return SlotPattern(Kind::Is, a); }
  static SlotPattern negate(Answer a) noexcept {
    return SlotPattern(Kind::Not, a);
  }

  [[nodiscard]] Kind kind() const noexcept { return kind_; }
  /// Present unless kind() == Any.
  [[nodiscard]] const std::optional<Answer>& answer() const noexcept {
    return answer_;
  }

  /// `*`, `<label>` or `!<label>`.
  [[nodiscard]] std::string to_token() const;

  friend bool operator==(const SlotPattern&, const SlotPattern&) = default;

 private:
  SlotPattern(Kind kind, std::optional<Answer> answer)
      : kind_(kind), answer_(answer) {}

  Kind kind_;
  std::optional<Answer> answer_;
};

bool match_slot(const SlotPattern& pattern, const Answer& answer) noexcept;

/// Parses one slot token for question 1..5.
SlotPattern parse_slot(int question, std::string_view token);

struct Rule {
  int index = 0;
  std::array<SlotPattern, 5> slots{SlotPattern::any(), SlotPattern::any(),
                                   SlotPattern::any(), SlotPattern::any(),
                                   SlotPattern::any()};
  Action action = Action::Nop;

  [[nodiscard]] bool matches(const ResponseSet& responses) const noexcept;

  friend bool operator==(const Rule&, const Rule&) = default;
};

/// Ordered rules plus the sandbox switch. The table keeps the rules exactly as
/// given; validate_rule_table() reports structural problems.
///
/// A rule whose action is UnfriendOrSandbox yields plain Unfriend while the
/// sandbox option is disabled.
class RuleTable {
 public:
  RuleTable(std::vector<Rule> rules, bool sandbox_enabled);

  /// The sixteen-rule canonical table.
  static RuleTable canonical(bool sandbox_enabled);

  [[nodiscard]] const std::vector<Rule>& rules() const noexcept {
    return rules_;
  }
  [[nodiscard]] bool sandbox_enabled() const noexcept {
    return sandbox_enabled_;
  }
  [[nodiscard]] RuleTable with_sandbox(bool enabled) const {
    return RuleTable(rules_, enabled);
  }
  [[nodiscard]] Action effective_action(const Rule& rule) const noexcept;

 private:
  std::vector<Rule> rules_;
  bool sandbox_enabled_;
};

struct Verdict {
  Action action = Action::Nop;
  int matched_rule = 0;
  /// One line per non-wildcard slot of the matched rule, Q1 first.
  std::vector<std::string> reasons;

  friend bool operator==(const Verdict&, const Verdict&) = default;
};

/// Runs the first-match scan. Throws InvalidArgument if no rule matches,
/// which cannot happen for a table that passes validation.
Verdict infer_action(const RuleTable& table, const ResponseSet& responses);

/// Reason text for a matched slot.
std::string reason_for(int question, const SlotPattern& pattern);

/// All 5*5*3*3*3 = 675 possible response sets, Q1 varying slowest.
std::vector<ResponseSet> all_response_sets();

struct ValidationReport {
  std::size_t tuple_count = 0;
  bool total = false;
  std::size_t unmatched_count = 0;
  std::optional<ResponseSet> unmatched_example;
  /// 1-based rule positions never reached under first match.
  std::vector<std::size_t> unreachable_rules;
  /// First-match hit count per rule position (same order as the table).
  std::vector<std::size_t> hits;
  /// Domain, index and catch-all problems.
  std::vector<std::string> problems;

  /// No totality violation, no unreachable rule, no problem entries.
  [[nodiscard]] bool ok() const noexcept {
    return total && unreachable_rules.empty() && problems.empty();
  }
};

ValidationReport validate_rule_table(const RuleTable& table);

/// The canonical table file, byte for byte.
std::string_view canonical_rule_text() noexcept;

RuleTable parse_rule_table(std::string_view text, bool sandbox_enabled);
RuleTable load_rule_table(const std::filesystem::path& path,
                          bool sandbox_enabled);
std::string format_rule_table(const RuleTable& table);

/// CRC-32 of format_rule_table(); identifies a table inside session logs.
std::uint32_t rule_table_checksum(const RuleTable& table);

}  // namespace friendaudit

#endif  // FRIENDAUDIT_RULES_HPP
