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

#include "friendaudit/rules.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <boost/crc.hpp>

#include "rules_canonical.hpp"

namespace friendaudit {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

bool answer_in_domain(int question, const Answer& a) {
  return is_frequency_question(question) ==
         std::holds_alternative<FrequencyAnswer>(a);
}

const char* const kHeader =
    "# friendaudit rule table v1\n"
    "# index | Q1 | Q2 | Q3 | Q4 | Q5 | action\n";

}  // namespace

std::string SlotPattern::to_token() const {
  switch (kind_) {
    case Kind::Any: return "*";
    case Kind::Is: return std::string(to_string(*answer_));
    case Kind::Not: return "!" + std::string(to_string(*answer_));
  }
  return "*";
}

bool match_slot(const SlotPattern& pattern, const Answer& answer) noexcept {
  switch (pattern.kind()) {
    case SlotPattern::Kind::Any: return true;
    case SlotPattern::Kind::Is: return *pattern.answer() == answer;
    case SlotPattern::Kind::Not: return *pattern.answer() != answer;
  }
  return false;
}

SlotPattern parse_slot(int question, std::string_view token) {
  token = trim(token);
  if (token == "*") return SlotPattern::any();
  if (!token.empty() && token.front() == '!') {
    return SlotPattern::negate(parse_answer(question, token.substr(1)));
  }
  return SlotPattern::is(parse_answer(question, token));
}

bool Rule::matches(const ResponseSet& responses) const noexcept {
  return match_slot(slots[0], responses.q1) &&
         match_slot(slots[1], responses.q2) &&
         match_slot(slots[2], responses.q3) &&
         match_slot(slots[3], responses.q4) &&
         match_slot(slots[4], responses.q5);
}

RuleTable::RuleTable(std::vector<Rule> rules, bool sandbox_enabled)
    : rules_(std::move(rules)), sandbox_enabled_(sandbox_enabled) {}

RuleTable RuleTable::canonical(bool sandbox_enabled) {
  return parse_rule_table(canonical_rule_text(), sandbox_enabled);
}

Action RuleTable::effective_action(const Rule& rule) const noexcept {
  if (rule.action == Action::UnfriendOrSandbox && !sandbox_enabled_) {
    return Action::Unfriend;
  }
  return rule.action;
}

std::string reason_for(int question, const SlotPattern& pattern) {
  using K = SlotPattern::Kind;
  if (pattern.kind() == K::Any) return {};
  const Answer& a = *pattern.answer();
  const bool never = a == Answer{FrequencyAnswer::Never};
  const bool agree = a == Answer{AgreementAnswer::Agree};
  const bool is = pattern.kind() == K::Is;
  switch (question) {
    case 1:
      if (never) {
        return is ? "You never interact with this friend on Facebook"
                  : "You have interacted with this friend on Facebook";
      }
      break;
    case 2:
      if (never) {
        return is ? "You never interact with this friend in real life"
                  : "You have interacted with this friend in real life";
      }
      break;
    case 3:
      if (agree) {
        return is ? "This friend would misuse a sensitive photo you upload"
                  : "You do not expect this friend to misuse your photos";
      }
      break;
    case 4:
      if (agree) {
        return is ? "This friend would abuse a status update you post"
                  : "You do not expect this friend to abuse your status "
                    "updates";
      }
      break;
    case 5:
      if (agree) {
        return is ? "This friend would post offensive, misleading, false or "
                    "malicious content"
                  : "You do not expect this friend to post abusive content";
      }
      break;
    default:
      break;
  }
  // Patterns outside the canonical table.
  return "Q" + std::to_string(question) + (is ? " is \"" : " is not \"") +
         std::string(to_string(a)) + "\"";
}

Verdict infer_action(const RuleTable& table, const ResponseSet& responses) {
  const auto& rules = table.rules();
  const auto hit = std::find_if(rules.begin(), rules.end(), [&](const Rule& r) {
    return r.matches(responses);
  });
  if (hit == rules.end()) {
    throw Error(ErrorCode::InvalidArgument, "rule table is not total");
  }
  Verdict v;
  v.action = table.effective_action(*hit);
  v.matched_rule = hit->index;
  for (int q = 1; q <= kQuestionCount; ++q) {
    const SlotPattern& p = hit->slots[static_cast<std::size_t>(q - 1)];
    if (p.kind() != SlotPattern::Kind::Any) v.reasons.push_back(reason_for(q, p));
  }
  return v;
}

std::vector<ResponseSet> all_response_sets() {
  std::vector<ResponseSet> out;
  out.reserve(675);
  for (auto q1 : kFrequencyAnswers)
    for (auto q2 : kFrequencyAnswers)
      for (auto q3 : kAgreementAnswers)
        for (auto q4 : kAgreementAnswers)
          for (auto q5 : kAgreementAnswers)
            out.push_back(ResponseSet{q1, q2, q3, q4, q5});
  return out;
}

ValidationReport validate_rule_table(const RuleTable& table) {
  const auto& rules = table.rules();
  ValidationReport report;
  report.hits.assign(rules.size(), 0);

  const auto tuples = all_response_sets();
  report.tuple_count = tuples.size();
  for (const auto& rs : tuples) {
    const auto hit = std::find_if(rules.begin(), rules.end(),
                                  [&](const Rule& r) { return r.matches(rs); });
    if (hit == rules.end()) {
      if (report.unmatched_count++ == 0) report.unmatched_example = rs;
      continue;
    }
    ++report.hits[static_cast<std::size_t>(hit - rules.begin())];
  }
  report.total = report.unmatched_count == 0;
  for (std::size_t i = 0; i < rules.size(); ++i) {
    if (report.hits[i] == 0) report.unreachable_rules.push_back(i + 1);
  }

  std::set<int> seen;
  for (std::size_t i = 0; i < rules.size(); ++i) {
    const Rule& r = rules[i];
    const std::string where = "rule at position " + std::to_string(i + 1);
    if (!seen.insert(r.index).second) {
      report.problems.push_back(where + ": duplicate index " +
                                std::to_string(r.index));
    }
    if (r.index != static_cast<int>(i + 1)) {
      report.problems.push_back(where + ": index " + std::to_string(r.index) +
                                " is not contiguous");
    }
    for (int q = 1; q <= kQuestionCount; ++q) {
      const auto& p = r.slots[static_cast<std::size_t>(q - 1)];
      if (p.answer() && !answer_in_domain(q, *p.answer())) {
        report.problems.push_back(where + ": Q" + std::to_string(q) +
                                  " pattern '" + p.to_token() +
                                  "' is outside the question's domain");
      }
    }
    if (r.action == Action::UnfriendOrSandbox && i != 0) {
      report.problems.push_back(where +
                                ": only the first rule may offer sandboxing");
    }
  }
  if (rules.empty()) {
    report.problems.push_back("table is empty");
  } else {
    const Rule& last = rules.back();
    const bool catch_all =
        std::all_of(last.slots.begin(), last.slots.end(), [](const auto& p) {
          return p.kind() == SlotPattern::Kind::Any;
        });
    if (!catch_all || last.action != Action::Nop) {
      report.problems.push_back("last rule is not the all-wildcard Nop rule");
    }
  }
  return report;
}

std::string_view canonical_rule_text() noexcept { return detail::kCanonicalRules; }

RuleTable parse_rule_table(std::string_view text, bool sandbox_enabled) {
  std::vector<Rule> rules;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    line = trim(line);
    if (line.empty() || line.front() == '#') continue;

    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
      const auto bar = line.find('|', start);
      fields.push_back(trim(line.substr(start, bar - start)));
      if (bar == std::string_view::npos) break;
      start = bar + 1;
    }
    const auto fail = [&](const std::string& what) -> Error {
      return Error(ErrorCode::ParseError,
                   "rule table line " + std::to_string(line_no) + ": " + what);
    };
    if (fields.size() != 7) throw fail("expected 7 '|'-separated fields");

    Rule rule;
    try {
      std::size_t used = 0;
      rule.index = std::stoi(std::string(fields[0]), &used);
      if (used != fields[0].size()) throw fail("bad index");
    } catch (const std::logic_error&) {
      throw fail("bad index");
    }
    try {
      for (int q = 1; q <= kQuestionCount; ++q) {
        rule.slots[static_cast<std::size_t>(q - 1)] =
            parse_slot(q, fields[static_cast<std::size_t>(q)]);
      }
      rule.action = parse_action(fields[6]);
    } catch (const Error& e) {
      throw Error(e.code(), "rule table line " + std::to_string(line_no) +
                                ": " + e.what());
    }
    rules.push_back(rule);
  }
  return RuleTable(std::move(rules), sandbox_enabled);
}

RuleTable load_rule_table(const std::filesystem::path& path,
                          bool sandbox_enabled) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::InvalidArgument,
                "cannot open rule table " + path.string());
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_rule_table(buf.str(), sandbox_enabled);
}

std::string format_rule_table(const RuleTable& table) {
  std::string out = kHeader;
  for (const Rule& r : table.rules()) {
    out += std::to_string(r.index);
    for (const auto& slot : r.slots) {
      out += " | ";
      out += slot.to_token();
    }
    out += " | ";
    out += to_string(r.action);
    out += '\n';
  }
  return out;
}

std::uint32_t rule_table_checksum(const RuleTable& table) {
  const std::string text = format_rule_table(table);
  boost::crc_32_type crc;
  crc.process_bytes(text.data(), text.size());
  return crc.checksum();
}

}  // namespace friendaudit
