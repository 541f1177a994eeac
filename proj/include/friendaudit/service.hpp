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

#ifndef FRIENDAUDIT_SERVICE_HPP
#define FRIENDAUDIT_SERVICE_HPP

/** @file service.hpp JSON-over-HTTP front end for interactive audits.
 *
 * AuditService::handle_request is transport-free so it can be tested
 * directly; serve() binds it to an HTTP listener. Resource paths and payloads
 * are listed in docs/wire-protocol.md.
 **/

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>

#include <json.hpp>

#include "friendaudit/error.hpp"
#include "friendaudit/features.hpp"
#include "friendaudit/quality.hpp"
#include "friendaudit/rules.hpp"
#include "friendaudit/session.hpp"

namespace friendaudit {

enum class ApiErrorCode : std::uint8_t { BadRequest, NotFound, Conflict, Invariant };

std::string_view to_string(ApiErrorCode code) noexcept;
int http_status(ApiErrorCode code) noexcept;
ApiErrorCode api_error_for(ErrorCode code) noexcept;

struct ApiResponse {
  int status = 200;
  std::string body;
  std::string content_type = "application/json";
};

struct ServiceConfig {
  RuleTable rules = RuleTable::canonical(false);
  QualityConfig quality;
  /// Needed only for wild-mode sessions.
  ModelSet models;
  /// When set, every session log is mirrored to <dir>/<session id>.jsonl and
  /// logs found there at start-up are replayed into the store.
  std::optional<std::filesystem::path> persist_dir;
};

class AuditService {
 public:
  AuditService(SocialSnapshot snapshot, ServiceConfig config);

  /// Never throws; every failure becomes an error document.
  ApiResponse handle_request(std::string_view method, std::string_view path,
                             std::string_view body);

  [[nodiscard]] std::size_t session_count() const;

 private:
  struct Slot {
    explicit Slot(AuditSession s) : session(std::move(s)) {}
    std::mutex mutex;
    AuditSession session;
  };

  ApiResponse dispatch(std::string_view method, std::string_view path,
                       std::string_view body);
  ApiResponse create_session(const nlohmann::ordered_json& body);
  std::shared_ptr<Slot> find(std::string_view id) const;
  void persist(const AuditSession& session) const;
  nlohmann::ordered_json next_step(const AuditSession& session) const;

  SocialSnapshot snapshot_;
  ServiceConfig config_;
  mutable std::mutex store_mutex_;
  std::map<Id, std::shared_ptr<Slot>, std::less<>> sessions_;
};

/// Error document: {"error": {"code", "message", "detail": {"kind"}}}.
ApiResponse error_response(ApiErrorCode code, std::string_view message,
                           std::string_view kind);

/// Blocks serving `service` on host:port until the process is stopped.
/// Returns false if the listener could not bind.
bool serve(AuditService& service, const std::string& host, int port);

}  // namespace friendaudit

#endif  // FRIENDAUDIT_SERVICE_HPP
