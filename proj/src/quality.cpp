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

#include "friendaudit/quality.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

namespace friendaudit {

using json = nlohmann::ordered_json;

std::string_view to_string(QualityCheck check) noexcept {
  switch (check) {
    case QualityCheck::AttentionCheck: return "AttentionCheck";
    case QualityCheck::BogusFriend: return "BogusFriend";
    case QualityCheck::Timing: return "Timing";
  }
  return "";
}

void QualityConfig::validate() const {
  if (!(min_avg_response_seconds > 0) || !std::isfinite(min_avg_response_seconds)) {
    throw Error(ErrorCode::InvalidParams,
                "min_avg_response_seconds must be a positive number");
  }
  for (const auto& id : bogus_friend_ids) {
    if (id.empty()) throw Error(ErrorCode::InvalidParams, "empty bogus friend id");
  }
}

namespace {

bool plausible_for_bogus(FrequencyAnswer a) {
  return a == FrequencyAnswer::Never || a == FrequencyAnswer::DontRemember;
}

}  // namespace

BogusCheck check_bogus(const ParticipantRecord& record, const QualityConfig& config) {
  BogusCheck out;
  for (const auto& id : config.bogus_friend_ids) {
    const auto it = std::find_if(record.bogus_responses.begin(),
                                 record.bogus_responses.end(),
                                 [&](const auto& r) { return r.first == id; });
    if (it == record.bogus_responses.end()) {
      throw Error(ErrorCode::MissingBogusResponse, "participant '" + record.id +
                                                       "' has no answers for '" +
                                                       id + "'");
    }
    if (!plausible_for_bogus(it->second.q1) || !plausible_for_bogus(it->second.q2)) {
      out.offending.push_back(id);
    }
  }
  out.passed = out.offending.empty();
  return out;
}

TimingCheck check_timing(const ParticipantRecord& record, const QualityConfig& config) {
  if (record.timings.empty()) {
    throw Error(ErrorCode::NoTimings,
                "participant '" + record.id + "' has no response timings");
  }
  double sum = 0;
  for (const auto& t : record.timings) sum += t.seconds;
  TimingCheck out;
  out.count = record.timings.size();
  out.average_seconds = sum / static_cast<double>(out.count);
  out.passed = !(out.average_seconds < config.min_avg_response_seconds);
  return out;
}

QualityVerdict assess_participant(const ParticipantRecord& record,
                                  const QualityConfig& config) {
  QualityVerdict v;
  v.participant_id = record.id;
  if (config.attention_check_required && !record.attention_passed) {
    v.failed_checks.push_back(QualityCheck::AttentionCheck);
  }
  try {
    const BogusCheck bogus = check_bogus(record, config);
    if (!bogus.passed) {
      v.failed_checks.push_back(QualityCheck::BogusFriend);
      v.offending_bogus = bogus.offending;
    }
  } catch (const Error& e) {
    v.failed_checks.push_back(QualityCheck::BogusFriend);
    v.annotations.push_back(std::string(to_string(e.code())) + ": " + e.what());
  }
  try {
    const TimingCheck timing = check_timing(record, config);
    v.average_seconds = timing.average_seconds;
    if (!timing.passed) v.failed_checks.push_back(QualityCheck::Timing);
  } catch (const Error& e) {
    v.failed_checks.push_back(QualityCheck::Timing);
    v.annotations.push_back(std::string(to_string(e.code())) + ": " + e.what());
  }
  v.retained = v.failed_checks.empty();
  return v;
}

ScreeningResult screen_participants(std::span<const ParticipantRecord> records,
                                    const QualityConfig& config) {
  config.validate();
  ScreeningResult out;
  out.verdicts.reserve(records.size());
  for (const auto& r : records) {
    QualityVerdict v = assess_participant(r, config);
    if (v.retained) {
      out.retained.push_back(r);
    } else {
      out.discarded.emplace_back(r, v);
    }
    out.verdicts.push_back(std::move(v));
  }
  return out;
}

json to_json(const QualityConfig& config) {
  json j;
  j["min_avg_response_seconds"] = config.min_avg_response_seconds;
  j["bogus_friend_ids"] = config.bogus_friend_ids;
  j["attention_check_required"] = config.attention_check_required;
  return j;
}

QualityConfig quality_config_from_json(const json& j) {
  if (!j.is_object()) throw Error(ErrorCode::ParseError, "quality config must be an object");
  QualityConfig c;
  try {
    if (j.contains("min_avg_response_seconds")) {
      c.min_avg_response_seconds = j.at("min_avg_response_seconds").get<double>();
    }
    if (j.contains("bogus_friend_ids")) {
      c.bogus_friend_ids = j.at("bogus_friend_ids").get<std::set<Id>>();
    }
    if (j.contains("attention_check_required")) {
      c.attention_check_required = j.at("attention_check_required").get<bool>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("quality config: ") + e.what());
  }
  c.validate();
  return c;
}

json to_json(const QualityVerdict& v) {
  json j;
  j["participant_id"] = v.participant_id;
  j["retained"] = v.retained;
  auto failed = json::array();
  for (auto c : v.failed_checks) failed.push_back(to_string(c));
  j["failed_checks"] = std::move(failed);
  j["offending_bogus"] = v.offending_bogus;
  j["average_seconds"] = v.average_seconds ? json(*v.average_seconds) : json(nullptr);
  j["annotations"] = v.annotations;
  return j;
}

json to_json(const ParticipantRecord& r) {
  json j;
  j["id"] = r.id;
  j["attention_passed"] = r.attention_passed;
  auto timings = json::array();
  for (const auto& t : r.timings) {
    timings.push_back({{"friend_id", t.friend_id},
                       {"question", t.question},
                       {"seconds", t.seconds}});
  }
  j["timings"] = std::move(timings);
  auto bogus = json::array();
  for (const auto& [id, rs] : r.bogus_responses) {
    bogus.push_back({{"friend_id", id}, {"responses", to_json(rs)}});
  }
  j["bogus_responses"] = std::move(bogus);
  return j;
}

ParticipantRecord participant_from_json(const json& j) {
  ParticipantRecord r;
  try {
    r.id = j.at("id").get<std::string>();
    r.attention_passed = j.at("attention_passed").get<bool>();
    for (const auto& t : j.at("timings")) {
      ResponseTiming timing{t.at("friend_id").get<std::string>(),
                            t.at("question").get<int>(), t.at("seconds").get<double>()};
      if (!(timing.seconds > 0)) {
        throw Error(ErrorCode::ParseError, "timings must be positive");
      }
      if (timing.question < 1 || timing.question > kDecisionTimingIndex) {
        throw Error(ErrorCode::ParseError, "timing question index out of range");
      }
      r.timings.push_back(std::move(timing));
    }
    if (j.contains("bogus_responses")) {
      for (const auto& b : j.at("bogus_responses")) {
        r.bogus_responses.emplace_back(b.at("friend_id").get<std::string>(),
                                       response_set_from_json(b.at("responses")));
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("participant record: ") + e.what());
  }
  return r;
}

std::vector<ParticipantRecord> load_participants(std::istream& in) {
  std::vector<ParticipantRecord> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(participant_from_json(json::parse(line)));
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::ParseError,
                  "participants line " + std::to_string(line_no) + ": " + e.what());
    } catch (const Error& e) {
      throw Error(ErrorCode::ParseError,
                  "participants line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

void write_participants(std::ostream& out, std::span<const ParticipantRecord> records) {
  for (const auto& r : records) out << to_json(r).dump() << '\n';
}

std::string format_screening_report(const ScreeningResult& result,
                                    const QualityConfig& config) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(2);
  for (const auto& v : result.verdicts) {
    os << v.participant_id << '\t' << (v.retained ? "retained" : "discarded");
    if (v.average_seconds) os << "\tavg=" << *v.average_seconds << 's';
    if (!v.failed_checks.empty()) {
      os << "\tfailed=";
      for (std::size_t i = 0; i < v.failed_checks.size(); ++i) {
        os << (i ? "," : "") << to_string(v.failed_checks[i]);
      }
    }
    for (const auto& id : v.offending_bogus) os << "\tbogus:" << id;
    for (const auto& a : v.annotations) os << "\t(" << a << ')';
    os << '\n';
  }
  std::array<std::size_t, kQualityChecks.size()> per_check{};
  for (const auto& v : result.verdicts) {
    for (auto c : v.failed_checks) ++per_check[static_cast<std::size_t>(c)];
  }
  os << "participants: " << result.verdicts.size()
     << "  retained: " << result.retained.size()
     << "  discarded: " << result.discarded.size() << '\n';
  for (auto c : kQualityChecks) {
    os << "failed " << to_string(c) << ": " << per_check[static_cast<std::size_t>(c)]
       << '\n';
  }
  os << "timing threshold: mean < " << config.min_avg_response_seconds
     << "s fails; the mean covers questionnaire answers and decision screens\n";
  return os.str();
}

}  // namespace friendaudit
