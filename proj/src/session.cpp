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

#include "friendaudit/session.hpp"

#include <algorithm>
#include <cstdio>
#include <iomanip>
#include <random>
#include <sstream>

namespace friendaudit {

using json = nlohmann::ordered_json;

std::string_view to_string(SessionMode mode) noexcept {
  return mode == SessionMode::Questionnaire ? "questionnaire" : "wild";
}

std::string_view to_string(SessionStatus status) noexcept {
  return status == SessionStatus::InProgress ? "in-progress" : "complete";
}

std::string_view to_string(EntryState state) noexcept {
  switch (state) {
    case EntryState::Pending: return "pending";
    case EntryState::AwaitingDecision: return "awaiting-decision";
    case EntryState::NoSuggestion: return "no-suggestion";
    case EntryState::Accepted: return "accepted";
    case EntryState::Ignored: return "ignored";
  }
  return "";
}

SessionMode parse_session_mode(std::string_view token) {
  const std::string key = normalize_token(token);
  if (key == "questionnaire" || key == "qrm") return SessionMode::Questionnaire;
  if (key == "wild" || key == "apm") return SessionMode::Wild;
  throw Error(ErrorCode::UnknownToken, "unknown session mode '" + std::string(token) + "'");
}

std::vector<DecisionKind> compatible_decisions(Action action) {
  switch (action) {
    case Action::Unfriend: return {DecisionKind::Unfriend, DecisionKind::Ignore};
    case Action::UnfriendOrSandbox:
      return {DecisionKind::Unfriend, DecisionKind::Sandbox, DecisionKind::Ignore};
    case Action::Restrict: return {DecisionKind::Restrict, DecisionKind::Ignore};
    case Action::Unfollow: return {DecisionKind::Unfollow, DecisionKind::Ignore};
    case Action::Nop: return {};
  }
  return {};
}

bool is_compatible(Action action, DecisionKind decision) noexcept {
  const auto options = compatible_decisions(action);
  return std::find(options.begin(), options.end(), decision) != options.end();
}

namespace {

bool is_terminal(EntryState s) {
  return s == EntryState::NoSuggestion || s == EntryState::Accepted ||
         s == EntryState::Ignored;
}

std::string hex32(std::uint32_t v) {
  char buf[9];
  std::snprintf(buf, sizeof buf, "%08x", v);
  return buf;
}

std::mt19937_64 session_rng(std::uint64_t seed) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32), 0x73657373u};
  return std::mt19937_64(seq);
}

json verdict_json(const std::optional<Verdict>& v) {
  if (!v) return nullptr;
  return {{"action", to_string(v->action)}, {"matched_rule", v->matched_rule}};
}

}  // namespace

AuditSession::AuditSession(Id id, Id participant, SessionMode mode,
                           SessionOptions options, RuleTable rules,
                           std::vector<QueueEntry> queue)
    : id_(std::move(id)),
      participant_(std::move(participant)),
      mode_(mode),
      options_(std::move(options)),
      rules_(std::move(rules)) {
  entries_.reserve(queue.size());
  for (auto& q : queue) {
    FriendProgress p;
    p.entry = std::move(q);
    entries_.push_back(std::move(p));
  }
  options_.session_id = id_;
}

AuditSession AuditSession::create(const SocialSnapshot& snapshot, const Id& participant,
                                  SessionMode mode, const SessionOptions& options,
                                  const RuleTable& rules) {
  options.quality.validate();
  const UserProfile& user = snapshot.user(participant);
  const auto friend_count = user.friend_ids.size();
  if (options.sample_size < 1) {
    throw Error(ErrorCode::InvalidArgument, "sample_size must be at least 1");
  }
  if (options.min_friend_count > 0 &&
      friend_count < static_cast<std::size_t>(options.min_friend_count)) {
    throw Error(ErrorCode::TooFewFriends,
                "'" + participant + "' has " + std::to_string(friend_count) +
                    " friends, fewer than the required " +
                    std::to_string(options.min_friend_count));
  }
  if (static_cast<std::size_t>(options.sample_size) > friend_count) {
    throw Error(ErrorCode::TooFewFriends,
                "cannot sample " + std::to_string(options.sample_size) +
                    " of " + std::to_string(friend_count) + " friends");
  }
  for (const auto& b : options.quality.bogus_friend_ids) {
    if (b == participant || user.friend_ids.contains(b)) {
      throw Error(ErrorCode::InvalidParams,
                  "bogus friend id '" + b + "' collides with a real id");
    }
  }

  auto rng = session_rng(options.seed);
  std::vector<Id> friends(user.friend_ids.begin(), user.friend_ids.end());
  std::shuffle(friends.begin(), friends.end(), rng);
  friends.resize(static_cast<std::size_t>(options.sample_size));

  std::vector<QueueEntry> queue;
  for (auto& f : friends) queue.push_back({std::move(f), false});
  if (mode == SessionMode::Questionnaire) {
    for (const auto& b : options.quality.bogus_friend_ids) {
      std::uniform_int_distribution<std::size_t> pos(0, queue.size());
      queue.insert(queue.begin() + static_cast<std::ptrdiff_t>(pos(rng)), {b, true});
    }
  }

  Id id = options.session_id.value_or(participant + "-" + std::string(to_string(mode)) +
                                      "-" + std::to_string(options.seed));
  AuditSession s(std::move(id), participant, mode, options, rules, std::move(queue));
  s.log_created();
  return s;
}

void AuditSession::log_created() {
  json e;
  e["event"] = "created";
  e["session_id"] = id_;
  e["participant_id"] = participant_;
  e["mode"] = to_string(mode_);
  e["seed"] = options_.seed;
  e["sample_size"] = options_.sample_size;
  e["min_friend_count"] = options_.min_friend_count;
  e["sandbox_enabled"] = rules_.sandbox_enabled();
  e["rule_table_crc32"] = hex32(rule_table_checksum(rules_));
  e["attention_passed"] = options_.attention_passed;
  e["quality"] = to_json(options_.quality);
  auto queue = json::array();
  for (const auto& p : entries_) {
    queue.push_back({{"friend_id", p.entry.friend_id}, {"bogus", p.entry.bogus}});
  }
  e["queue"] = std::move(queue);
  append(e);
  if (entries_.empty()) finish_entry();
}

void AuditSession::append(const json& event) { log_.push_back(event.dump() + "\n"); }

std::string AuditSession::log_text() const {
  std::string out;
  for (const auto& line : log_) out += line;
  return out;
}

FriendProgress& AuditSession::find(std::string_view friend_id) {
  for (auto& p : entries_) {
    if (p.entry.friend_id == friend_id) return p;
  }
  throw Error(ErrorCode::UnknownId, "friend '" + std::string(friend_id) +
                                        "' is not in session '" + id_ + "'");
}

const FriendProgress& AuditSession::entry(std::string_view friend_id) const {
  return const_cast<AuditSession*>(this)->find(friend_id);
}

std::optional<std::size_t> AuditSession::current_index() const {
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (!is_terminal(entries_[i].state)) return i;
  }
  return std::nullopt;
}

Suggestion AuditSession::make_suggestion(const FriendProgress& p) const {
  return Suggestion{p.entry.friend_id, p.verdict->action, p.verdict->matched_rule,
                    p.verdict->reasons, compatible_decisions(p.verdict->action)};
}

void AuditSession::finish_entry() {
  if (status_ == SessionStatus::Complete) return;
  const bool done = std::all_of(entries_.begin(), entries_.end(),
                                [](const auto& p) { return is_terminal(p.state); });
  if (!done) return;
  status_ = SessionStatus::Complete;
  append(json{{"event", "completed"}});
}

std::optional<Suggestion> AuditSession::submit_responses(std::string_view friend_id,
                                                         const ResponseSet& responses,
                                                         std::span<const double> seconds) {
  if (mode_ != SessionMode::Questionnaire) {
    throw Error(ErrorCode::InvalidArgument, "session '" + id_ + "' is not a questionnaire");
  }
  FriendProgress& p = find(friend_id);
  if (p.responses) {
    throw Error(ErrorCode::DuplicateSubmission,
                "answers for '" + p.entry.friend_id + "' were already submitted");
  }
  const auto current = current_index();
  if (!current || &entries_[*current] != &p) {
    throw Error(ErrorCode::OutOfOrder,
                "'" + p.entry.friend_id + "' is not the next friend in the queue");
  }
  if (!seconds.empty() && seconds.size() != static_cast<std::size_t>(kQuestionCount)) {
    throw Error(ErrorCode::InvalidArgument, "expected five answer timings");
  }
  for (double s : seconds) {
    if (!(s > 0)) throw Error(ErrorCode::InvalidArgument, "timings must be positive");
  }

  p.responses = responses;
  for (std::size_t i = 0; i < seconds.size(); ++i) {
    p.timings.push_back({p.entry.friend_id, static_cast<int>(i) + 1, seconds[i]});
  }
  if (!p.entry.bogus) p.verdict = infer_action(rules_, responses);

  json e;
  e["event"] = "responses";
  e["friend_id"] = p.entry.friend_id;
  e["source"] = "questionnaire";
  e["responses"] = to_json(responses);
  e["seconds"] = std::vector<double>(seconds.begin(), seconds.end());
  e["verdict"] = verdict_json(p.verdict);
  append(e);

  if (p.verdict && p.verdict->action != Action::Nop) {
    p.suggestion_shown = true;
    p.state = EntryState::AwaitingDecision;
    Suggestion s = make_suggestion(p);
    json se{{"event", "suggestion"}};
    const json body = to_json(s);
    for (const auto& [k, v] : body.items()) se[k] = v;
    append(se);
    return s;
  }
  p.state = EntryState::NoSuggestion;
  finish_entry();
  return std::nullopt;
}

RelationshipState AuditSession::submit_decision(std::string_view friend_id,
                                                const Decision& decision,
                                                std::optional<double> seconds) {
  FriendProgress& p = find(friend_id);
  if (p.state != EntryState::AwaitingDecision) {
    throw Error(ErrorCode::NoPendingSuggestion,
                "no suggestion is pending for '" + p.entry.friend_id + "'");
  }
  if (!is_compatible(p.verdict->action, decision.kind())) {
    throw Error(ErrorCode::IncompatibleDecision,
                std::string(to_string(decision.kind())) + " does not answer a " +
                    std::string(to_string(p.verdict->action)) + " suggestion");
  }
  if (seconds && !(*seconds > 0)) {
    throw Error(ErrorCode::InvalidArgument, "timings must be positive");
  }

  const RelationshipState before = p.relationship;
  p.decision = decision;
  p.relationship = apply_action(before, decision);
  if (seconds) p.timings.push_back({p.entry.friend_id, kDecisionTimingIndex, *seconds});
  p.state = decision.kind() == DecisionKind::Ignore ? EntryState::Ignored
                                                    : EntryState::Accepted;

  json e;
  e["event"] = "decision";
  e["friend_id"] = p.entry.friend_id;
  e["decision"] = to_string(decision.kind());
  e["ignore_reason"] =
      decision.ignore_reason() ? json(to_string(*decision.ignore_reason())) : json(nullptr);
  e["seconds"] = seconds ? json(*seconds) : json(nullptr);
  append(e);
  if (decision.kind() != DecisionKind::Ignore) {
    json sc;
    sc["event"] = "state-change";
    sc["friend_id"] = p.entry.friend_id;
    sc["from"] = to_json(before);
    sc["to"] = to_json(p.relationship);
    append(sc);
  }
  finish_entry();
  return p.relationship;
}

std::optional<Suggestion> AuditSession::apply_prediction(std::string_view friend_id,
                                                         const ResponseSet& predicted,
                                                         DecisionKind predicted_decision) {
  if (mode_ != SessionMode::Wild) {
    throw Error(ErrorCode::InvalidArgument, "session '" + id_ + "' is not in wild mode");
  }
  FriendProgress& p = find(friend_id);
  if (p.responses) {
    throw Error(ErrorCode::DuplicateSubmission,
                "'" + p.entry.friend_id + "' was already predicted");
  }
  wild_ran_ = true;
  p.responses = predicted;
  p.predicted = true;
  p.predicted_decision = predicted_decision;
  p.verdict = infer_action(rules_, predicted);

  json e;
  e["event"] = "responses";
  e["friend_id"] = p.entry.friend_id;
  e["source"] = "prediction";
  e["responses"] = to_json(predicted);
  e["predicted_decision"] = to_string(predicted_decision);
  e["verdict"] = verdict_json(p.verdict);
  append(e);

  if (p.verdict->action != Action::Nop && predicted_decision != DecisionKind::Ignore) {
    p.suggestion_shown = true;
    p.state = EntryState::AwaitingDecision;
    Suggestion s = make_suggestion(p);
    json se{{"event", "suggestion"}};
    const json body = to_json(s);
    for (const auto& [k, v] : body.items()) se[k] = v;
    append(se);
    return s;
  }
  p.state = EntryState::NoSuggestion;
  finish_entry();
  return std::nullopt;
}

std::vector<Suggestion> AuditSession::run_wild(const ModelSet& models,
                                               const SocialSnapshot& snapshot) {
  if (mode_ != SessionMode::Wild) {
    throw Error(ErrorCode::InvalidArgument, "session '" + id_ + "' is not in wild mode");
  }
  if (wild_ran_) {
    throw Error(ErrorCode::DuplicateSubmission, "predictions already ran for '" + id_ + "'");
  }
  for (TargetName t : kTargetNames) {
    const auto it = models.find(t);
    if (it == models.end()) {
      throw Error(ErrorCode::MissingModel,
                  "no model for target " + std::string(to_string(t)));
    }
    if (target_of(it->second).name != t) {
      throw Error(ErrorCode::MissingModel, "model registered for " +
                                               std::string(to_string(t)) +
                                               " predicts another target");
    }
  }
  std::vector<Suggestion> out;
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    const Id friend_id = entries_[i].entry.friend_id;
    ResponseSet predicted;
    DecisionKind decision;
    {
      // Scoped so the feature vector is gone before anything is logged.
      const FeatureVector fv = compute_features(snapshot, participant_, friend_id);
      std::array<Answer, 5> answers;
      for (int q = 1; q <= kQuestionCount; ++q) {
        const auto& model = models.at(kTargetNames[static_cast<std::size_t>(q - 1)]);
        answers[static_cast<std::size_t>(q - 1)] = parse_answer(q, predict(model, fv).label);
      }
      predicted = make_response_set(answers);
      decision = parse_decision_kind(predict(models.at(TargetName::Decision), fv).label);
    }
    if (auto s = apply_prediction(friend_id, predicted, decision)) {
      out.push_back(std::move(*s));
    }
  }
  if (entries_.empty()) wild_ran_ = true;
  return out;
}

std::vector<Suggestion> AuditSession::pending_suggestions() const {
  std::vector<Suggestion> out;
  for (const auto& p : entries_) {
    if (p.state == EntryState::AwaitingDecision) out.push_back(make_suggestion(p));
  }
  return out;
}

ParticipantRecord AuditSession::participant_record() const {
  ParticipantRecord r;
  r.id = participant_;
  r.attention_passed = options_.attention_passed;
  for (const auto& p : entries_) {
    r.timings.insert(r.timings.end(), p.timings.begin(), p.timings.end());
    if (p.entry.bogus && p.responses) {
      r.bogus_responses.emplace_back(p.entry.friend_id, *p.responses);
    }
  }
  return r;
}

SessionSummary AuditSession::summary() const {
  if (status_ != SessionStatus::Complete) {
    throw Error(ErrorCode::SessionIncomplete, "session '" + id_ + "' is not complete");
  }
  SessionSummary s;
  s.session_id = id_;
  s.mode = mode_;
  for (const auto& p : entries_) {
    if (p.entry.bogus) {
      ++s.bogus_friends;
      continue;
    }
    ++s.friends_audited;
    if (mode_ == SessionMode::Wild && p.verdict && p.verdict->action != Action::Nop &&
        !p.suggestion_shown) {
      ++s.suppressed;
    }
    if (!p.suggestion_shown) continue;
    auto& tally = s.per_action[static_cast<std::size_t>(p.verdict->action)];
    ++tally.recommended;
    if (!p.decision) continue;
    ++s.decisions[static_cast<std::size_t>(p.decision->kind())];
    if (p.decision->kind() == DecisionKind::Ignore) {
      ++s.ignore_reasons[static_cast<std::size_t>(*p.decision->ignore_reason())];
    } else {
      ++tally.accepted;
    }
  }
  if (mode_ == SessionMode::Questionnaire) {
    s.quality = assess_participant(participant_record(), options_.quality);
  }
  return s;
}

AuditSession replay_session(std::string_view log, const RuleTable& rules) {
  std::vector<json> events;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start < log.size()) {
    auto end = log.find('\n', start);
    if (end == std::string_view::npos) end = log.size();
    ++line_no;
    const std::string_view line = log.substr(start, end - start);
    start = end + 1;
    if (line.empty()) continue;
    try {
      events.push_back(json::parse(line));
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::ParseError,
                  "session log line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  if (events.empty() || events.front().value("event", "") != "created") {
    throw Error(ErrorCode::ParseError, "session log must start with a created event");
  }

  try {
    const json& c = events.front();
    if (c.at("rule_table_crc32").get<std::string>() != hex32(rule_table_checksum(rules)) ||
        c.at("sandbox_enabled").get<bool>() != rules.sandbox_enabled()) {
      throw Error(ErrorCode::IntegrityError,
                  "session log was recorded with a different rule table");
    }
    SessionOptions options;
    options.session_id = c.at("session_id").get<std::string>();
    options.seed = c.at("seed").get<std::uint64_t>();
    options.sample_size = c.at("sample_size").get<int>();
    options.min_friend_count = c.at("min_friend_count").get<int>();
    options.attention_passed = c.at("attention_passed").get<bool>();
    options.quality = quality_config_from_json(c.at("quality"));
    std::vector<QueueEntry> queue;
    for (const auto& q : c.at("queue")) {
      queue.push_back({q.at("friend_id").get<std::string>(), q.at("bogus").get<bool>()});
    }
    AuditSession s(*options.session_id, c.at("participant_id").get<std::string>(),
                   parse_session_mode(c.at("mode").get<std::string>()), options, rules,
                   std::move(queue));
    s.log_created();

    for (std::size_t i = 1; i < events.size(); ++i) {
      const json& e = events[i];
      const std::string kind = e.at("event").get<std::string>();
      const std::string friend_id = e.value("friend_id", "");
      if (kind == "responses") {
        const ResponseSet rs = response_set_from_json(e.at("responses"));
        if (e.at("source").get<std::string>() == "prediction") {
          s.apply_prediction(friend_id, rs,
                             parse_decision_kind(e.at("predicted_decision").get<std::string>()));
        } else {
          const auto seconds = e.at("seconds").get<std::vector<double>>();
          s.submit_responses(friend_id, rs, seconds);
        }
      } else if (kind == "decision") {
        std::optional<IgnoreReason> reason;
        if (!e.at("ignore_reason").is_null()) {
          reason = parse_ignore_reason(e.at("ignore_reason").get<std::string>());
        }
        std::optional<double> seconds;
        if (!e.at("seconds").is_null()) seconds = e.at("seconds").get<double>();
        s.submit_decision(friend_id,
                          Decision::make(parse_decision_kind(e.at("decision").get<std::string>()),
                                         reason),
                          seconds);
      } else if (kind != "suggestion" && kind != "state-change" && kind != "completed") {
        throw Error(ErrorCode::ParseError, "unknown session event '" + kind + "'");
      }
    }

    std::string expected;
    for (const auto& e : events) expected += e.dump() + "\n";
    if (s.log_text() != expected) {
      throw Error(ErrorCode::IntegrityError,
                  "replayed session log differs from the recorded one");
    }
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("session log: ") + e.what());
  }
}

json to_json(const Suggestion& s) {
  json j;
  j["friend_id"] = s.friend_id;
  j["action"] = to_string(s.action);
  j["matched_rule"] = s.matched_rule;
  j["reasons"] = s.reasons;
  auto options = json::array();
  for (auto d : s.options) options.push_back(to_string(d));
  j["options"] = std::move(options);
  return j;
}

json to_json(const RelationshipState& state) {
  json j;
  j["is_friend"] = state.is_friend;
  j["user_sees_friend"] = state.user_sees_friend;
  j["friend_sees_user"] = state.friend_sees_user;
  return j;
}

json to_json(const SessionSummary& s) {
  json j;
  j["session_id"] = s.session_id;
  j["mode"] = to_string(s.mode);
  j["friends_audited"] = s.friends_audited;
  j["bogus_friends"] = s.bogus_friends;
  j["suppressed"] = s.suppressed;
  auto actions = json::array();
  for (Action a : kActions) {
    if (a == Action::Nop) continue;
    const auto& t = s.per_action[static_cast<std::size_t>(a)];
    actions.push_back({{"action", to_string(a)},
                       {"recommended", t.recommended},
                       {"accepted", t.accepted}});
  }
  j["actions"] = std::move(actions);
  json decisions;
  for (DecisionKind d : kDecisionKinds) {
    decisions[std::string(to_string(d))] = s.decisions[static_cast<std::size_t>(d)];
  }
  j["decisions"] = std::move(decisions);
  json reasons;
  for (IgnoreReason r : kIgnoreReasons) {
    reasons[std::string(to_string(r))] = s.ignore_reasons[static_cast<std::size_t>(r)];
  }
  j["ignore_reasons"] = std::move(reasons);
  j["quality"] = s.quality ? to_json(*s.quality) : json(nullptr);
  return j;
}

std::string format_summary(const SessionSummary& s) {
  std::ostringstream os;
  os << "session " << s.session_id << " (" << to_string(s.mode) << "): "
     << s.friends_audited << " friends";
  if (s.bogus_friends) os << ", " << s.bogus_friends << " bogus";
  if (s.mode == SessionMode::Wild) os << ", " << s.suppressed << " suppressed";
  os << '\n';
  os << std::left << std::setw(20) << "action" << std::right << std::setw(13)
     << "recommended" << std::setw(10) << "accepted" << '\n';
  for (Action a : kActions) {
    if (a == Action::Nop) continue;
    const auto& t = s.per_action[static_cast<std::size_t>(a)];
    os << std::left << std::setw(20) << to_string(a) << std::right << std::setw(13)
       << t.recommended << std::setw(10) << t.accepted << '\n';
  }
  os << "ignore reasons:";
  for (IgnoreReason r : kIgnoreReasons) {
    os << ' ' << to_string(r) << '=' << s.ignore_reasons[static_cast<std::size_t>(r)];
  }
  os << '\n';
  if (s.quality) {
    os << "quality: " << (s.quality->retained ? "retained" : "discarded");
    for (auto c : s.quality->failed_checks) os << ' ' << to_string(c);
    os << '\n';
  }
  return os.str();
}

}  // namespace friendaudit
