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

#include "friendaudit/service.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <vector>

#include <httplib.h>

namespace friendaudit {

using json = nlohmann::ordered_json;

std::string_view to_string(ApiErrorCode code) noexcept {
  switch (code) {
    case ApiErrorCode::BadRequest: return "BadRequest";
    case ApiErrorCode::NotFound: return "NotFound";
    case ApiErrorCode::Conflict: return "Conflict";
    case ApiErrorCode::Invariant: return "Invariant";
  }
  return "";
}

int http_status(ApiErrorCode code) noexcept {
  switch (code) {
    case ApiErrorCode::BadRequest: return 400;
    case ApiErrorCode::NotFound: return 404;
    case ApiErrorCode::Conflict: return 409;
    case ApiErrorCode::Invariant: return 500;
  }
  return 500;
}

ApiErrorCode api_error_for(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument:
    case ErrorCode::UnknownToken:
    case ErrorCode::DomainMismatch:
    case ErrorCode::ParseError:
    case ErrorCode::UnknownLabel:
    case ErrorCode::IncompatibleDecision:
    case ErrorCode::MissingIgnoreReason:
    case ErrorCode::InvalidParams:
    case ErrorCode::LengthMismatch:
      return ApiErrorCode::BadRequest;
    case ErrorCode::UnknownId:
    case ErrorCode::UnknownSession:
    case ErrorCode::NotFriends:
      return ApiErrorCode::NotFound;
    case ErrorCode::OutOfOrder:
    case ErrorCode::DuplicateSubmission:
    case ErrorCode::NoPendingSuggestion:
    case ErrorCode::SessionIncomplete:
    case ErrorCode::TooFewFriends:
    case ErrorCode::MissingModel:
      return ApiErrorCode::Conflict;
    default:
      return ApiErrorCode::Invariant;
  }
}

namespace {

// Request bytes echoed into messages are not guaranteed to be UTF-8.
std::string wire_text(const json& body) {
  return body.dump(-1, ' ', false, json::error_handler_t::replace);
}

}  // namespace

ApiResponse error_response(ApiErrorCode code, std::string_view message,
                           std::string_view kind) {
  json body;
  body["error"]["code"] = to_string(code);
  body["error"]["message"] = message;
  body["error"]["detail"]["kind"] = kind;
  return {http_status(code), wire_text(body), "application/json"};
}

namespace {

ApiResponse ok(const json& body, int status = 200) {
  return {status, wire_text(body), "application/json"};
}

std::vector<std::string_view> split_path(std::string_view path) {
  if (const auto q = path.find('?'); q != std::string_view::npos) path = path.substr(0, q);
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (start <= path.size()) {
    auto end = path.find('/', start);
    if (end == std::string_view::npos) end = path.size();
    if (end > start) parts.push_back(path.substr(start, end - start));
    start = end + 1;
  }
  return parts;
}

json parse_body(std::string_view body, bool allow_empty) {
  if (body.find_first_not_of(" \t\r\n") == std::string_view::npos) {
    if (allow_empty) return json::object();
    throw Error(ErrorCode::ParseError, "request body is empty");
  }
  json j;
  try {
    j = json::parse(body);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("malformed JSON body: ") + e.what());
  }
  if (!j.is_object()) throw Error(ErrorCode::ParseError, "request body must be an object");
  return j;
}

bool valid_session_id(std::string_view id) {
  return !id.empty() && id.size() <= 128 &&
         std::all_of(id.begin(), id.end(), [](unsigned char c) {
           return std::isalnum(c) || c == '-' || c == '_' || c == '.';
         }) &&
         id.front() != '.';
}

json questionnaire_payload(const AuditSession& s, std::size_t index) {
  json step;
  step["kind"] = "questionnaire";
  step["friend_id"] = s.entries()[index].entry.friend_id;
  step["position"] = index + 1;
  step["total"] = s.entries().size();
  auto questions = json::array();
  for (int q = 1; q <= kQuestionCount; ++q) {
    auto answers = json::array();
    if (is_frequency_question(q)) {
      for (auto a : kFrequencyAnswers) answers.push_back(to_string(a));
    } else {
      for (auto a : kAgreementAnswers) answers.push_back(to_string(a));
    }
    questions.push_back({{"index", q}, {"text", question_text(q)}, {"answers", answers}});
  }
  step["questions"] = std::move(questions);
  return step;
}

}  // namespace

AuditService::AuditService(SocialSnapshot snapshot, ServiceConfig config)
    : snapshot_(std::move(snapshot)), config_(std::move(config)) {
  config_.quality.validate();
  if (!config_.persist_dir) return;
  std::filesystem::create_directories(*config_.persist_dir);
  std::vector<std::filesystem::path> logs;
  for (const auto& e : std::filesystem::directory_iterator(*config_.persist_dir)) {
    if (e.is_regular_file() && e.path().extension() == ".jsonl") logs.push_back(e.path());
  }
  std::sort(logs.begin(), logs.end());
  for (const auto& path : logs) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream text;
    text << in.rdbuf();
    AuditSession s = replay_session(text.str(), config_.rules);
    const Id id = s.id();
    sessions_.emplace(id, std::make_shared<Slot>(std::move(s)));
  }
}

std::size_t AuditService::session_count() const {
  std::lock_guard lock(store_mutex_);
  return sessions_.size();
}

std::shared_ptr<AuditService::Slot> AuditService::find(std::string_view id) const {
  std::lock_guard lock(store_mutex_);
  const auto it = sessions_.find(id);
  if (it == sessions_.end()) {
    throw Error(ErrorCode::UnknownSession, "no session '" + std::string(id) + "'");
  }
  return it->second;
}

void AuditService::persist(const AuditSession& session) const {
  if (!config_.persist_dir) return;
  const auto target = *config_.persist_dir / (session.id() + ".jsonl");
  const auto tmp = *config_.persist_dir / (session.id() + ".jsonl.tmp");
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out << session.log_text();
    if (!out) throw Error(ErrorCode::IntegrityError, "cannot write " + tmp.string());
  }
  std::filesystem::rename(tmp, target);
}

json AuditService::next_step(const AuditSession& s) const {
  if (s.status() == SessionStatus::Complete) {
    return {{"kind", "complete"}, {"summary", to_json(s.summary())}};
  }
  if (s.mode() == SessionMode::Wild) {
    if (!s.wild_ran()) return {{"kind", "predict"}};
    auto list = json::array();
    for (const auto& sg : s.pending_suggestions()) list.push_back(to_json(sg));
    return {{"kind", "suggestions"}, {"suggestions", std::move(list)}};
  }
  const std::size_t index = *s.current_index();
  const auto& p = s.entries()[index];
  if (p.state == EntryState::AwaitingDecision) {
    return {{"kind", "suggestion"}, {"suggestion", to_json(s.pending_suggestions().front())}};
  }
  return questionnaire_payload(s, index);
}

ApiResponse AuditService::create_session(const json& body) {
  const Id participant = body.at("participant_id").get<std::string>();
  const SessionMode mode = parse_session_mode(body.value("mode", std::string("questionnaire")));
  SessionOptions options;
  options.seed = body.at("seed").get<std::uint64_t>();
  options.sample_size = body.value("sample_size", options.sample_size);
  options.min_friend_count = body.value("min_friend_count", options.min_friend_count);
  options.attention_passed = body.value("attention_passed", options.attention_passed);
  options.quality = config_.quality;
  if (body.contains("session_id")) {
    options.session_id = body.at("session_id").get<std::string>();
    if (!valid_session_id(*options.session_id)) {
      throw Error(ErrorCode::InvalidArgument,
                  "session id may only use letters, digits, '-', '_' and '.'");
    }
  }

  AuditSession session =
      AuditSession::create(snapshot_, participant, mode, options, config_.rules);
  if (!valid_session_id(session.id())) {
    throw Error(ErrorCode::InvalidArgument,
                "session id may only use letters, digits, '-', '_' and '.'");
  }
  const Id id = session.id();
  std::lock_guard lock(store_mutex_);
  if (sessions_.contains(id)) {
    throw Error(ErrorCode::DuplicateSubmission, "session '" + id + "' already exists");
  }
  persist(session);
  json out;
  out["session_id"] = id;
  out["participant_id"] = session.participant_id();
  out["mode"] = to_string(session.mode());
  out["status"] = to_string(session.status());
  out["queue_length"] = session.entries().size();
  out["next"] = next_step(session);
  sessions_.emplace(id, std::make_shared<Slot>(std::move(session)));
  return ok(out, 201);
}

ApiResponse AuditService::handle_request(std::string_view method, std::string_view path,
                                         std::string_view body) {
  try {
    return dispatch(method, path, body);
  } catch (const Error& e) {
    return error_response(api_error_for(e.code()), e.what(), to_string(e.code()));
  } catch (const nlohmann::json::exception& e) {
    return error_response(ApiErrorCode::BadRequest, e.what(), "ParseError");
  } catch (const std::exception& e) {
    return error_response(ApiErrorCode::Invariant, e.what(), "Internal");
  }
}

ApiResponse AuditService::dispatch(std::string_view method, std::string_view path,
                                   std::string_view body) {
  const auto parts = split_path(path);
  const bool get = method == "GET";
  const bool post = method == "POST";

  if (parts.size() == 1 && parts[0] == "health" && get) {
    return ok({{"status", "ok"}, {"sessions", session_count()}});
  }
  if (parts.size() == 1 && parts[0] == "sessions" && post) {
    return create_session(parse_body(body, false));
  }
  if (parts.size() < 2 || parts.size() > 3 || parts[0] != "sessions" || !(get || post)) {
    return error_response(ApiErrorCode::NotFound,
                          std::string(method) + " " + std::string(path) + " is not a resource",
                          "UnknownRoute");
  }

  const auto slot = find(parts[1]);
  std::lock_guard lock(slot->mutex);
  AuditSession& s = slot->session;
  const std::string_view leaf = parts.size() == 3 ? parts[2] : std::string_view();

  const auto envelope = [&](json extra) {
    json out;
    out["session_id"] = s.id();
    out["status"] = to_string(s.status());
    for (auto& [k, v] : extra.items()) out[k] = v;
    out["next"] = next_step(s);
    return out;
  };

  if (get && leaf.empty()) {
    auto entries = json::array();
    for (const auto& p : s.entries()) {
      entries.push_back({{"friend_id", p.entry.friend_id}, {"state", to_string(p.state)}});
    }
    return ok(envelope({{"participant_id", s.participant_id()},
                        {"mode", to_string(s.mode())},
                        {"entries", std::move(entries)}}));
  }
  if (get && leaf == "next") return ok(envelope(json::object()));
  if (get && leaf == "summary") {
    json j{{"status", to_string(s.status())}};
    const json summary = to_json(s.summary());
    for (const auto& [k, v] : summary.items()) j[k] = v;
    return ok(std::move(j));
  }
  if (get && leaf == "log") return {200, s.log_text(), "application/x-ndjson"};

  if (post && leaf == "responses") {
    const json j = parse_body(body, false);
    const auto seconds = j.value("seconds", std::vector<double>{});
    const auto suggestion = s.submit_responses(j.at("friend_id").get<std::string>(),
                                               response_set_from_json(j.at("responses")),
                                               seconds);
    persist(s);
    return ok(envelope({{"suggestion", suggestion ? to_json(*suggestion) : json(nullptr)}}));
  }
  if (post && leaf == "decision") {
    const json j = parse_body(body, false);
    std::optional<IgnoreReason> reason;
    if (j.contains("ignore_reason") && !j.at("ignore_reason").is_null()) {
      reason = parse_ignore_reason(j.at("ignore_reason").get<std::string>());
    }
    std::optional<double> seconds;
    if (j.contains("seconds") && !j.at("seconds").is_null()) {
      seconds = j.at("seconds").get<double>();
    }
    const Id friend_id = j.at("friend_id").get<std::string>();
    const Decision d =
        Decision::make(parse_decision_kind(j.at("decision").get<std::string>()), reason);
    const RelationshipState state = s.submit_decision(friend_id, d, seconds);
    persist(s);
    return ok(envelope({{"friend_id", friend_id}, {"state", to_json(state)}}));
  }
  if (post && leaf == "wild") {
    parse_body(body, true);
    const auto suggestions = s.run_wild(config_.models, snapshot_);
    persist(s);
    auto list = json::array();
    for (const auto& sg : suggestions) list.push_back(to_json(sg));
    return ok(envelope({{"suggestions", std::move(list)}}));
  }
  return error_response(ApiErrorCode::NotFound,
                        std::string(method) + " " + std::string(path) + " is not a resource",
                        "UnknownRoute");
}

bool serve(AuditService& service, const std::string& host, int port) {
  httplib::Server server;
  const auto bridge = [&service](const httplib::Request& req, httplib::Response& res) {
    const ApiResponse r = service.handle_request(req.method, req.path, req.body);
    res.status = r.status;
    res.set_content(r.body, r.content_type);
  };
  server.Get(".*", bridge);
  server.Post(".*", bridge);
  return server.listen(host, port);
}

}  // namespace friendaudit
