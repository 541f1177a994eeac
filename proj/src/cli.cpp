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

#include "friendaudit/cli.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <map>
#include <random>
#include <sstream>

#include <CLI11.hpp>

#include "friendaudit/evaluation.hpp"
#include "friendaudit/service.hpp"

namespace friendaudit {

using json = nlohmann::ordered_json;

namespace {

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::InvalidArgument, "cannot open " + path.string());
  return in;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::InvalidArgument, "cannot write " + path.string());
  return out;
}

std::string slurp(const std::filesystem::path& path) {
  auto in = open_in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

TreeParams tree_params_from(const json& j, TreeParams p) {
  p.max_depth = j.value("max_depth", p.max_depth);
  p.min_leaf_size = j.value("min_leaf_size", p.min_leaf_size);
  return p;
}

SocialSnapshot read_snapshot(const std::filesystem::path& path) {
  auto in = open_in(path);
  return load_snapshot(in);
}

GroundTruth read_truth(const std::filesystem::path& path) {
  auto in = open_in(path);
  return load_ground_truth(in);
}

}  // namespace

RuleTable CliConfig::rule_table() const {
  if (rules_path) return load_rule_table(*rules_path, sandbox_enabled);
  return RuleTable::canonical(sandbox_enabled);
}

CliConfig cli_config_from_json(const json& j) {
  if (!j.is_object()) throw Error(ErrorCode::ParseError, "config must be a JSON object");
  CliConfig c;
  try {
    if (j.contains("quality")) c.quality = quality_config_from_json(j.at("quality"));
    if (j.contains("rules")) c.rules_path = j.at("rules").get<std::string>();
    c.sandbox_enabled = j.value("sandbox_enabled", c.sandbox_enabled);
    if (j.contains("learner")) {
      const json& l = j.at("learner");
      if (l.contains("tree")) c.learner.tree = tree_params_from(l.at("tree"), c.learner.tree);
      if (l.contains("forest")) {
        const json& f = l.at("forest");
        c.learner.forest.tree_count = f.value("tree_count", c.learner.forest.tree_count);
        c.learner.forest.features_per_split =
            f.value("features_per_split", c.learner.forest.features_per_split);
        c.learner.forest.bootstrap = f.value("bootstrap", c.learner.forest.bootstrap);
        if (f.contains("tree")) {
          c.learner.forest.tree = tree_params_from(f.at("tree"), c.learner.forest.tree);
        }
      }
    }
    if (j.contains("generator")) c.generator = generator_params_from_json(j.at("generator"));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("config: ") + e.what());
  }
  return c;
}

CliConfig load_cli_config(const std::filesystem::path& path) {
  try {
    CliConfig c = cli_config_from_json(json::parse(slurp(path)));
    if (c.rules_path && c.rules_path->is_relative()) {
      c.rules_path = path.parent_path() / *c.rules_path;
    }
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, path.string() + ": " + e.what());
  }
}

std::string model_file_name(TargetName target) {
  std::string name = normalize_token(to_string(target));
  return name + ".model";
}

ModelSet load_model_set(const std::filesystem::path& dir) {
  ModelSet models;
  for (TargetName t : kTargetNames) {
    const auto path = dir / model_file_name(t);
    if (!std::filesystem::exists(path)) continue;
    Model m = parse_model(slurp(path));
    if (target_of(m).name != t) {
      throw Error(ErrorCode::IntegrityError, path.string() + " holds a model for " +
                                                 std::string(to_string(target_of(m).name)));
    }
    models.emplace(t, std::move(m));
  }
  return models;
}

namespace {

struct ScriptedAnswer {
  ResponseSet responses;
  std::vector<double> seconds;
  std::optional<Decision> decision;
  std::optional<double> decision_seconds;
};

std::map<Id, ScriptedAnswer> load_script(const std::filesystem::path& path) {
  std::map<Id, ScriptedAnswer> out;
  auto in = open_in(path);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const json j = json::parse(line);
      ScriptedAnswer a;
      a.responses = response_set_from_json(j.at("responses"));
      a.seconds = j.value("seconds", std::vector<double>{});
      if (j.contains("decision") && !j.at("decision").is_null()) {
        std::optional<IgnoreReason> reason;
        if (j.contains("ignore_reason") && !j.at("ignore_reason").is_null()) {
          reason = parse_ignore_reason(j.at("ignore_reason").get<std::string>());
        }
        a.decision =
            Decision::make(parse_decision_kind(j.at("decision").get<std::string>()), reason);
      }
      if (j.contains("decision_seconds") && !j.at("decision_seconds").is_null()) {
        a.decision_seconds = j.at("decision_seconds").get<double>();
      }
      out[j.at("friend_id").get<std::string>()] = std::move(a);
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::ParseError,
                  path.string() + " line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

struct Options {
  std::uint64_t seed = 0;
  std::string config_path;
  std::string snapshot;
  std::string truth;
  std::string out_path;
  std::string target = "Q1";
  std::string algo = "forest";
  int k = 10;
  int users = 57;
  double noise = -1;
  int participants = 0;
  int violations = 0;
  std::string participants_out;
  std::string participant;
  std::string mode = "questionnaire";
  std::string responses;
  std::string models_dir;
  std::string log_path;
  int sample_size = 20;
  int min_friends = 0;
  bool attention_failed = false;
  std::string format = "text";
  bool shuffle_labels = false;
  double min_avg = -1;
  std::string table = "canonical";
  bool sandbox = false;
  std::vector<long long> cells;
  std::string pairs_file;
  std::string host = "127.0.0.1";
  int port = 8080;
  std::string persist_dir;
};

CliConfig config_of(const Options& o) {
  return o.config_path.empty() ? CliConfig{} : load_cli_config(o.config_path);
}

int cmd_gen(const Options& o, std::ostream& out) {
  const CliConfig cfg = config_of(o);
  GeneratorParams p = cfg.generator;
  p.seed = o.seed;
  p.user_count = o.users;
  if (p.max_friends > p.user_count - 1) {
    p.max_friends = std::max(0, p.user_count - 1);
    p.min_friends = std::min(p.min_friends, p.max_friends);
  }
  if (o.noise >= 0) p.answer_noise = o.noise;
  const Population pop = generate_population(p);
  {
    auto f = open_out(o.out_path);
    write_snapshot(f, pop.snapshot);
  }
  {
    auto f = open_out(o.truth);
    write_ground_truth(f, pop.truth);
  }
  out << "users: " << pop.snapshot.users().size() << "  posts: " << pop.snapshot.posts().size()
      << "  photos: " << pop.snapshot.photos().size()
      << "  directed pairs: " << pop.truth.pairs.size() << '\n';
  if (!o.participants_out.empty()) {
    const ParticipantBatch batch =
        generate_participants(o.participants, o.violations, o.seed, cfg.quality);
    auto f = open_out(o.participants_out);
    write_participants(f, batch.records);
    out << "participants: " << batch.records.size() << "  seeded violations: "
        << o.violations << '\n';
  }
  return 0;
}

int cmd_train(const Options& o, std::ostream& out) {
  const CliConfig cfg = config_of(o);
  const SocialSnapshot snapshot = read_snapshot(o.snapshot);
  const GroundTruth truth = read_truth(o.truth);
  const Algorithm algo = parse_algorithm(o.algo);
  std::vector<TargetName> targets;
  if (normalize_token(o.target) == "all") {
    targets.assign(kTargetNames.begin(), kTargetNames.end());
  } else {
    targets.push_back(parse_target_name(o.target));
  }
  for (TargetName t : targets) {
    const auto data = make_instances(snapshot, truth, t);
    const auto target = PredictionTarget::of(t);
    const auto balanced = balance_dataset(data, target, o.seed);
    const Model m = train_model(balanced, target, algo, cfg.learner, o.seed);
    std::filesystem::path path = o.out_path;
    if (targets.size() > 1 || std::filesystem::is_directory(path)) {
      std::filesystem::create_directories(path);
      path /= model_file_name(t);
    }
    auto f = open_out(path);
    f << serialize_model(m);
    out << to_string(t) << ": " << to_string(algo) << " trained on " << balanced.size()
        << " balanced instances -> " << path.string() << '\n';
  }
  return 0;
}

int cmd_evaluate(const Options& o, std::ostream& out) {
  const CliConfig cfg = config_of(o);
  const SocialSnapshot snapshot = read_snapshot(o.snapshot);
  const GroundTruth truth = read_truth(o.truth);
  const TargetName t = parse_target_name(o.target);
  auto data = make_instances(snapshot, truth, t);
  if (o.shuffle_labels) {
    std::vector<std::string> labels;
    for (const auto& x : data) labels.push_back(x.label);
    std::mt19937_64 rng(o.seed);
    std::shuffle(labels.begin(), labels.end(), rng);
    for (std::size_t i = 0; i < data.size(); ++i) data[i].label = labels[i];
  }
  EvaluationReport report = cross_validate(data, PredictionTarget::of(t),
                                           parse_algorithm(o.algo), o.k, o.seed, cfg.learner);
  if (o.shuffle_labels) report.notes.push_back("labels were shuffled (permutation control)");
  if (o.format == "json") {
    out << to_json(report).dump(2) << '\n';
  } else {
    out << format_report(report);
  }
  if (!o.out_path.empty()) {
    auto f = open_out(o.out_path);
    f << to_json(report).dump(2) << '\n';
  }
  return 0;
}

int cmd_screen(const Options& o, std::ostream& out) {
  CliConfig cfg = config_of(o);
  if (o.min_avg >= 0) cfg.quality.min_avg_response_seconds = o.min_avg;
  auto in = open_in(o.responses);
  const auto records = load_participants(in);
  const ScreeningResult result = screen_participants(records, cfg.quality);
  out << format_screening_report(result, cfg.quality);
  if (!o.out_path.empty()) {
    auto f = open_out(o.out_path);
    for (const auto& v : result.verdicts) f << to_json(v).dump() << '\n';
  }
  return 0;
}

int cmd_audit(const Options& o, std::ostream& out) {
  const CliConfig cfg = config_of(o);
  const SocialSnapshot snapshot = read_snapshot(o.snapshot);
  SessionOptions options;
  options.seed = o.seed;
  options.sample_size = o.sample_size;
  options.min_friend_count = o.min_friends;
  options.attention_passed = !o.attention_failed;
  options.quality = cfg.quality;
  const SessionMode mode = parse_session_mode(o.mode);
  AuditSession s = AuditSession::create(snapshot, o.participant, mode, options, cfg.rule_table());

  std::map<Id, ScriptedAnswer> script;
  if (!o.responses.empty()) script = load_script(o.responses);
  std::optional<GroundTruth> truth;
  if (!o.truth.empty()) truth = read_truth(o.truth);
  std::mt19937_64 rng(o.seed);
  std::uniform_real_distribution<double> think(3.0, 10.0);

  const auto decision_for = [&](const Suggestion& sg) -> std::optional<Decision> {
    if (const auto it = script.find(sg.friend_id); it != script.end()) {
      return it->second.decision;
    }
    if (truth) {
      if (const PairTruth* p = truth->find(o.participant, sg.friend_id)) {
        if (is_compatible(sg.action, p->decision.kind())) return p->decision;
        return Decision::ignore(IgnoreReason::SuggestionMakesNoSense);
      }
    }
    return std::nullopt;
  };
  const auto decide = [&](const Suggestion& sg) {
    const auto d = decision_for(sg);
    if (!d) return false;
    std::optional<double> secs;
    if (const auto it = script.find(sg.friend_id); it != script.end()) {
      secs = it->second.decision_seconds;
    } else {
      secs = think(rng);
    }
    s.submit_decision(sg.friend_id, *d, secs);
    return true;
  };

  if (mode == SessionMode::Questionnaire) {
    while (const auto index = s.current_index()) {
      const FriendProgress& p = s.entries()[*index];
      const Id friend_id = p.entry.friend_id;
      std::optional<Suggestion> sg;
      if (const auto it = script.find(friend_id); it != script.end()) {
        sg = s.submit_responses(friend_id, it->second.responses, it->second.seconds);
      } else if (truth && (p.entry.bogus || truth->find(o.participant, friend_id))) {
        ResponseSet rs;  // a careful participant does not recognize a bogus friend
        rs.q1 = rs.q2 = FrequencyAnswer::Never;
        if (!p.entry.bogus) rs = truth->find(o.participant, friend_id)->responses;
        std::vector<double> secs(5);
        for (double& x : secs) x = think(rng);
        sg = s.submit_responses(friend_id, rs, secs);
      } else {
        throw Error(ErrorCode::InvalidArgument, "no answers for friend '" + friend_id + "'");
      }
      if (sg && !decide(*sg)) {
        throw Error(ErrorCode::NoPendingSuggestion,
                    "no decision scripted for '" + friend_id + "'");
      }
    }
  } else {
    const ModelSet models =
        o.models_dir.empty() ? ModelSet{} : load_model_set(o.models_dir);
    for (const auto& sg : s.run_wild(models, snapshot)) decide(sg);
  }

  if (!o.log_path.empty()) {
    auto f = open_out(o.log_path);
    f << s.log_text();
  }
  if (s.status() == SessionStatus::Complete) {
    const SessionSummary summary = s.summary();
    if (o.format == "json") {
      out << to_json(summary).dump(2) << '\n';
    } else {
      out << format_summary(summary);
    }
  } else {
    out << "session " << s.id() << " has " << s.pending_suggestions().size()
        << " undecided suggestions\n";
    for (const auto& sg : s.pending_suggestions()) out << to_json(sg).dump() << '\n';
  }
  return 0;
}

int cmd_validate_rules(const Options& o, std::ostream& out) {
  const RuleTable table = o.table == "canonical"
                              ? RuleTable::canonical(o.sandbox)
                              : load_rule_table(o.table, o.sandbox);
  const ValidationReport r = validate_rule_table(table);
  out << "rules: " << table.rules().size() << "  checksum: " << std::hex << std::setw(8)
      << std::setfill('0') << rule_table_checksum(table) << std::dec << std::setfill(' ')
      << '\n';
  if (r.total) {
    out << "total over " << r.tuple_count << " tuples\n";
  } else {
    out << "not total: " << r.unmatched_count << " of " << r.tuple_count
        << " tuples match no rule";
    if (r.unmatched_example) out << ", e.g. " << to_json(*r.unmatched_example).dump();
    out << '\n';
  }
  out << "unreachable rules:";
  if (r.unreachable_rules.empty()) out << " none";
  for (auto i : r.unreachable_rules) out << ' ' << i;
  out << "\nhits:";
  for (std::size_t i = 0; i < r.hits.size(); ++i) out << ' ' << (i + 1) << '=' << r.hits[i];
  out << '\n';
  for (const auto& p : r.problems) out << "problem: " << p << '\n';
  if (!r.ok()) throw Error(ErrorCode::IntegrityError, "rule table failed validation");
  return 0;
}

int cmd_chi2(const Options& o, std::ostream& out) {
  Table2x2 t;
  t << o.cells[0], o.cells[1], o.cells[2], o.cells[3];
  const ChiSquareResult r = chi_square_2x2(t);
  out << std::fixed << std::setprecision(3) << "chi2 = " << r.statistic << "  df = " << r.df
      << "  p = " << r.p_value << '\n';
  return 0;
}

int cmd_pearson(const Options& o, std::ostream& out) {
  auto in = open_in(o.pairs_file);
  std::vector<double> xs, ys;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos || line[0] == '#') continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ls(line);
    double x, y;
    if (!(ls >> x >> y)) throw Error(ErrorCode::ParseError, "expected two numbers per line");
    xs.push_back(x);
    ys.push_back(y);
  }
  out << std::fixed << std::setprecision(3) << "r = " << pearson_correlation(xs, ys)
      << "  n = " << xs.size() << '\n';
  return 0;
}

int cmd_serve(const Options& o, std::ostream& out) {
  const CliConfig cfg = config_of(o);
  ServiceConfig sc;
  sc.rules = cfg.rule_table();
  sc.quality = cfg.quality;
  if (!o.models_dir.empty()) sc.models = load_model_set(o.models_dir);
  if (!o.persist_dir.empty()) sc.persist_dir = o.persist_dir;
  AuditService service(read_snapshot(o.snapshot), std::move(sc));
  out << "listening on " << o.host << ':' << o.port << std::endl;
  if (!serve(service, o.host, o.port)) {
    throw Error(ErrorCode::InvalidArgument,
                "cannot listen on " + o.host + ":" + std::to_string(o.port));
  }
  return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"friendaudit: audit friends for strangers and abuse"};
  app.name("friendaudit");
  app.require_subcommand(1);
  Options o;

  const auto add_config = [&](CLI::App* c) {
    c->add_option("--config", o.config_path, "JSON config file")->check(CLI::ExistingFile);
  };
  const auto add_seed = [&](CLI::App* c) {
    c->add_option("--seed", o.seed, "seed for every random choice")->required();
  };

  auto* gen = app.add_subcommand("gen", "generate a synthetic population");
  add_seed(gen);
  add_config(gen);
  gen->add_option("--out", o.out_path, "snapshot file to write")->required();
  gen->add_option("--truth", o.truth, "ground-truth sidecar to write")->required();
  gen->add_option("--users", o.users, "number of users")->check(CLI::PositiveNumber);
  gen->add_option("--noise", o.noise, "answer noise (0 = separable)");
  gen->add_option("--participants", o.participants, "screening records to generate");
  gen->add_option("--violations", o.violations, "records seeded to fail screening");
  gen->add_option("--participants-out", o.participants_out, "screening records file");

  auto* audit = app.add_subcommand("audit", "run one audit session");
  add_seed(audit);
  add_config(audit);
  audit->add_option("--snapshot", o.snapshot)->required()->check(CLI::ExistingFile);
  audit->add_option("--participant", o.participant)->required();
  audit->add_option("--mode", o.mode, "questionnaire or wild");
  audit->add_option("--responses", o.responses, "scripted answers and decisions (JSONL)")
      ->check(CLI::ExistingFile);
  audit->add_option("--truth", o.truth, "answer from a ground-truth sidecar")
      ->check(CLI::ExistingFile);
  audit->add_option("--models", o.models_dir, "model directory for wild mode")
      ->check(CLI::ExistingDirectory);
  audit->add_option("--sample-size", o.sample_size);
  audit->add_option("--min-friends", o.min_friends);
  audit->add_flag("--attention-failed", o.attention_failed);
  audit->add_option("--log", o.log_path, "session log to write");
  audit->add_option("--format", o.format)->check(CLI::IsMember({"text", "json"}));

  auto* train = app.add_subcommand("train", "train a classifier");
  add_seed(train);
  add_config(train);
  train->add_option("--snapshot", o.snapshot)->required()->check(CLI::ExistingFile);
  train->add_option("--truth", o.truth)->required()->check(CLI::ExistingFile);
  train->add_option("--target", o.target, "Q1..Q5, decision, or all");
  train->add_option("--algo", o.algo, "tree or forest");
  train->add_option("--out", o.out_path, "model file, or directory for --target all")
      ->required();

  auto* evaluate = app.add_subcommand("evaluate", "k-fold cross-validation report");
  add_seed(evaluate);
  add_config(evaluate);
  evaluate->add_option("--snapshot", o.snapshot)->required()->check(CLI::ExistingFile);
  evaluate->add_option("--truth", o.truth)->required()->check(CLI::ExistingFile);
  evaluate->add_option("--target", o.target, "Q1..Q5 or decision");
  evaluate->add_option("--algo", o.algo, "tree or forest");
  evaluate->add_option("--k", o.k)->check(CLI::Range(2, 1000));
  evaluate->add_option("--out", o.out_path, "JSON report file");
  evaluate->add_option("--format", o.format)->check(CLI::IsMember({"text", "json"}));
  evaluate->add_flag("--shuffle-labels", o.shuffle_labels, "permutation control");

  auto* screen = app.add_subcommand("screen", "screen participants");
  add_config(screen);
  screen->add_option("--participants", o.responses, "participant records (JSONL)")
      ->required()
      ->check(CLI::ExistingFile);
  screen->add_option("--min-avg", o.min_avg, "override the timing threshold");
  screen->add_option("--out", o.out_path, "verdicts file (JSONL)");

  auto* stats = app.add_subcommand("stats", "chi-square and correlation");
  stats->require_subcommand(1);
  auto* chi2 = stats->add_subcommand("chi2", "2x2 test of independence: a b c d");
  chi2->add_option("cells", o.cells, "row-major counts")->required()->expected(4);
  auto* pearson = stats->add_subcommand("pearson", "sample correlation of two columns");
  pearson->add_option("file", o.pairs_file)->required()->check(CLI::ExistingFile);

  auto* validate = app.add_subcommand("validate-rules", "check a rule table");
  validate->add_option("--table", o.table, "canonical or a rule file")->required();
  validate->add_flag("--sandbox", o.sandbox, "enable the sandbox option");

  auto* serve_cmd = app.add_subcommand("serve", "run the HTTP service");
  add_config(serve_cmd);
  serve_cmd->add_option("--snapshot", o.snapshot)->required()->check(CLI::ExistingFile);
  serve_cmd->add_option("--host", o.host);
  serve_cmd->add_option("--port", o.port)->check(CLI::Range(1, 65535));
  serve_cmd->add_option("--models", o.models_dir)->check(CLI::ExistingDirectory);
  serve_cmd->add_option("--persist", o.persist_dir, "session log directory");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return 2;
  }

  try {
    if (gen->parsed()) return cmd_gen(o, out);
    if (audit->parsed()) {
      if (o.mode != "wild" && o.responses.empty() && o.truth.empty()) {
        err << "error: questionnaire audits need --responses or --truth\n\n" << audit->help();
        return 2;
      }
      return cmd_audit(o, out);
    }
    if (train->parsed()) return cmd_train(o, out);
    if (evaluate->parsed()) return cmd_evaluate(o, out);
    if (screen->parsed()) return cmd_screen(o, out);
    if (chi2->parsed()) return cmd_chi2(o, out);
    if (pearson->parsed()) return cmd_pearson(o, out);
    if (validate->parsed()) return cmd_validate_rules(o, out);
    if (serve_cmd->parsed()) return cmd_serve(o, out);
  } catch (const Error& e) {
    err << "error [" << to_string(e.code()) << "]: " << e.what() << '\n';
    return 1;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error [io]: " << e.what() << '\n';
    return 1;
  } catch (const nlohmann::json::exception& e) {
    err << "error [ParseError]: " << e.what() << '\n';
    return 1;
  }
  err << app.help();
  return 2;
}

}  // namespace friendaudit
