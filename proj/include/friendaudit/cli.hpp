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

#ifndef FRIENDAUDIT_CLI_HPP
#define FRIENDAUDIT_CLI_HPP

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "friendaudit/generator.hpp"
#include "friendaudit/learning.hpp"
#include "friendaudit/quality.hpp"
#include "friendaudit/rules.hpp"
#include "friendaudit/session.hpp"

namespace friendaudit {

/// Contents of the JSON file passed with --config. Every key is optional:
///
///   {"quality": {...}, "rules": "path/to/table.rules",
///    "sandbox_enabled": false,
///    "learner": {"tree": {"max_depth", "min_leaf_size"},
///                "forest": {"tree_count", "features_per_split", "bootstrap",
///                           "tree": {...}}},
///    "generator": {...}}
struct CliConfig {
  QualityConfig quality;
  std::optional<std::filesystem::path> rules_path;
  bool sandbox_enabled = false;
  LearnerConfig learner;
  GeneratorParams generator;

  [[nodiscard]] RuleTable rule_table() const;
};

CliConfig cli_config_from_json(const nlohmann::ordered_json& j);
CliConfig load_cli_config(const std::filesystem::path& path);

/// File name used for a target's model inside a model directory.
std::string model_file_name(TargetName target);
/// Loads whichever of the six model files exist in `dir`.
ModelSet load_model_set(const std::filesystem::path& dir);

/// Runs the command line. `args` excludes the program name. Returns 0 on
/// success, 1 on a domain error, 2 on a usage error (synopsis on `err`).
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace friendaudit

#endif  // FRIENDAUDIT_CLI_HPP
