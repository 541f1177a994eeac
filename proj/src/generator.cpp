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

#include "friendaudit/generator.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <iomanip>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>

#include "friendaudit/rules.hpp"

namespace friendaudit {

using json = nlohmann::ordered_json;

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw Error(ErrorCode::InvalidParams, what);
}

bool is_probability(double p) { return p >= 0.0 && p <= 1.0; }

std::mt19937_64 make_rng(std::uint64_t seed, std::uint32_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32), stream};
  return std::mt19937_64(seq);
}

std::string numbered(char prefix, int i, int width) {
  std::ostringstream os;
  os << prefix << std::setw(width) << std::setfill('0') << i;
  return os.str();
}

}  // namespace

void GeneratorParams::validate() const {
  require(user_count >= 1, "user_count must be at least 1");
  require(min_friends >= 0 && min_friends <= max_friends,
          "friend range must satisfy 0 <= min <= max");
  require(max_friends <= user_count - 1 || max_friends == 0,
          "max_friends must be below user_count");
  require(community_count >= 1, "community_count must be at least 1");
  require(is_probability(within_community), "within_community must be a probability");
  require(is_probability(stranger_share), "stranger_share must be a probability");
  require(!forced_tie_strength || is_probability(*forced_tie_strength),
          "forced_tie_strength must lie in [0, 1]");
  require(answer_noise >= 0 && std::isfinite(answer_noise),
          "answer_noise must be non-negative");
  for (std::size_t q = 0; q < 3; ++q) {
    require(is_probability(abuse_base[q]) && is_probability(abuse_base[q] + abuse_slope[q]) &&
                abuse_slope[q] >= 0,
            "abuse model must yield probabilities");
  }
  for (double a : acceptance) require(is_probability(a), "acceptance must be a probability");
  require(is_probability(sandbox_share), "sandbox_share must be a probability");
}

json to_json(const GeneratorParams& p) {
  json j;
  j["user_count"] = p.user_count;
  j["min_friends"] = p.min_friends;
  j["max_friends"] = p.max_friends;
  j["seed"] = p.seed;
  j["community_count"] = p.community_count;
  j["within_community"] = p.within_community;
  j["stranger_share"] = p.stranger_share;
  j["forced_tie_strength"] =
      p.forced_tie_strength ? json(*p.forced_tie_strength) : json(nullptr);
  j["answer_noise"] = p.answer_noise;
  j["abuse_base"] = p.abuse_base;
  j["abuse_slope"] = p.abuse_slope;
  json acc;
  for (Action a : kActions) {
    if (a != Action::Nop) acc[std::string(to_string(a))] = p.acceptance[static_cast<std::size_t>(a)];
  }
  j["acceptance"] = std::move(acc);
  j["sandbox_share"] = p.sandbox_share;
  j["sandbox_enabled"] = p.sandbox_enabled;
  return j;
}

GeneratorParams generator_params_from_json(const json& j) {
  GeneratorParams p;
  try {
    const auto get = [&](const char* key, auto& field) {
      if (j.contains(key)) field = j.at(key).get<std::decay_t<decltype(field)>>();
    };
    get("user_count", p.user_count);
    get("min_friends", p.min_friends);
    get("max_friends", p.max_friends);
    get("seed", p.seed);
    get("community_count", p.community_count);
    get("within_community", p.within_community);
    get("stranger_share", p.stranger_share);
    if (j.contains("forced_tie_strength") && !j.at("forced_tie_strength").is_null()) {
      p.forced_tie_strength = j.at("forced_tie_strength").get<double>();
    }
    get("answer_noise", p.answer_noise);
    get("abuse_base", p.abuse_base);
    get("abuse_slope", p.abuse_slope);
    if (j.contains("acceptance")) {
      for (const auto& [key, value] : j.at("acceptance").items()) {
        p.acceptance[static_cast<std::size_t>(parse_action(key))] = value.get<double>();
      }
    }
    get("sandbox_share", p.sandbox_share);
    get("sandbox_enabled", p.sandbox_enabled);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("generator params: ") + e.what());
  }
  p.validate();
  return p;
}

double online_score(const FeatureVector& f) { return f.mutual_post_count; }

double offline_score(const FeatureVector& f) {
  const double places = (f.same_current_city ? 1 : 0) + (f.same_hometown ? 1 : 0) +
                        f.common_study_count + f.common_work_count;
  const bool any_contact = f.mutual_post_count + f.common_photo_count > 0;
  return 2.0 * f.common_photo_count + (any_contact ? places : 0.0);
}

FrequencyAnswer frequency_from_score(double s, bool offline) {
  if (s < 0.5) return FrequencyAnswer::Never;
  if (s < 1.5) return FrequencyAnswer::DontRemember;
  if (s < (offline ? 2.5 : 3.5)) return FrequencyAnswer::NotAnymore;
  if (s < (offline ? 4.5 : 7.5)) return FrequencyAnswer::Occasionally;
  return FrequencyAnswer::Frequently;
}

const PairTruth* GroundTruth::find(std::string_view user, std::string_view friend_id) const {
  const auto it = std::lower_bound(
      pairs.begin(), pairs.end(), std::pair(user, friend_id),
      [](const PairTruth& p, const std::pair<std::string_view, std::string_view>& key) {
        return std::pair<std::string_view, std::string_view>(p.user, p.friend_id) < key;
      });
  if (it == pairs.end() || it->user != user || it->friend_id != friend_id) return nullptr;
  return &*it;
}

namespace {

struct Graph {
  std::vector<Id> ids;
  std::vector<int> community;
  std::vector<std::set<int>> adj;
  std::map<std::pair<int, int>, double> tie;  ///< key (lo, hi)

  [[nodiscard]] double strength(int a, int b) const {
    return tie.at({std::min(a, b), std::max(a, b)});
  }
};

Graph build_graph(const GeneratorParams& p, std::mt19937_64& rng) {
  Graph g;
  const int n = p.user_count;
  const int width = std::max(3, static_cast<int>(std::to_string(n).size()));
  for (int i = 0; i < n; ++i) {
    g.ids.push_back(numbered('u', i + 1, width));
    g.community.push_back(i % p.community_count);
  }
  g.adj.resize(static_cast<std::size_t>(n));

  std::vector<int> target(static_cast<std::size_t>(n));
  std::uniform_int_distribution<int> degree(p.min_friends, p.max_friends);
  for (auto& t : target) t = std::min(degree(rng), n - 1);

  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  std::bernoulli_distribution inside(p.within_community);
  std::vector<int> same, any;
  for (int u : order) {
    const auto uu = static_cast<std::size_t>(u);
    while (static_cast<int>(g.adj[uu].size()) < target[uu]) {
      same.clear();
      any.clear();
      for (int v = 0; v < n; ++v) {
        const auto vv = static_cast<std::size_t>(v);
        if (v == u || g.adj[uu].contains(v) ||
            static_cast<int>(g.adj[vv].size()) >= target[vv]) {
          continue;
        }
        any.push_back(v);
        if (g.community[vv] == g.community[uu]) same.push_back(v);
      }
      if (any.empty()) break;
      const auto& pool = (!same.empty() && inside(rng)) ? same : any;
      std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
      const int v = pool[pick(rng)];
      g.adj[uu].insert(v);
      g.adj[static_cast<std::size_t>(v)].insert(u);
    }
  }

  std::bernoulli_distribution stranger(p.stranger_share);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int u = 0; u < n; ++u) {
    for (int v : g.adj[static_cast<std::size_t>(u)]) {
      if (v < u) continue;
      double t;
      if (stranger(rng)) {
        t = 0.12 * unit(rng);
      } else if (g.community[static_cast<std::size_t>(u)] ==
                 g.community[static_cast<std::size_t>(v)]) {
        t = 0.45 + 0.55 * unit(rng);
      } else {
        t = 0.12 + 0.48 * unit(rng);
      }
      g.tie[{u, v}] = p.forced_tie_strength.value_or(t);
    }
  }
  return g;
}

std::vector<UserProfile> make_profiles(const Graph& g, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const auto chance = [&](double p) { return unit(rng) < p; };
  const auto pick = [&](int n) {
    return std::uniform_int_distribution<int>(0, n - 1)(rng);
  };
  std::vector<UserProfile> users;
  for (std::size_t i = 0; i < g.ids.size(); ++i) {
    const int c = g.community[i];
    UserProfile u;
    u.id = g.ids[i];
    if (chance(0.92)) {
      std::string city = chance(0.6) ? "City " + std::to_string(c)
                                     : "City " + std::to_string(10 + pick(10));
      // Spelling drift that place_key has to absorb.
      if (chance(0.15)) {
        std::transform(city.begin(), city.end(), city.begin(),
                       [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
      }
      if (chance(0.1)) city = " " + city + " ";
      u.current_city = city;
    }
    if (chance(0.85)) {
      u.hometown = chance(0.45) ? "Town " + std::to_string(c)
                                : "Town " + std::to_string(10 + pick(12));
    }
    const int schools = chance(0.35) ? 2 : 1;
    for (int k = 0; k < schools; ++k) {
      u.schools.insert(chance(0.5) ? "School " + std::to_string(c) + "-" + std::to_string(pick(3))
                                   : "School G" + std::to_string(pick(15)));
    }
    const int employers = pick(3);
    for (int k = 0; k < employers; ++k) {
      u.employers.insert(chance(0.4)
                             ? "Employer " + std::to_string(c) + "-" + std::to_string(pick(4))
                             : "Employer G" + std::to_string(pick(20)));
    }
    for (int v : g.adj[i]) u.friend_ids.insert(g.ids[static_cast<std::size_t>(v)]);
    users.push_back(std::move(u));
  }
  return users;
}

std::vector<PostRecord> make_posts(const Graph& g, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<int> post_count(10, 30);
  std::vector<PostRecord> posts;
  for (std::size_t i = 0; i < g.ids.size(); ++i) {
    const int count = post_count(rng);
    for (int k = 0; k < count; ++k) {
      PostRecord p;
      p.post_id = "post-" + g.ids[i] + "-" + std::to_string(k + 1);
      p.author_id = g.ids[i];
      for (int v : g.adj[i]) {
        const double t = g.strength(static_cast<int>(i), v);
        if (unit(rng) < 0.3 * t * t) p.commenter_ids.insert(g.ids[static_cast<std::size_t>(v)]);
      }
      if (unit(rng) < 0.1) p.commenter_ids.insert(g.ids[i]);
      posts.push_back(std::move(p));
    }
  }
  return posts;
}

std::vector<PhotoRecord> make_photos(const Graph& g, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<PhotoRecord> photos;
  const auto add = [&](std::set<Id> tags) {
    photos.push_back({"photo-" + std::to_string(photos.size() + 1), std::move(tags)});
  };
  for (std::size_t i = 0; i < g.ids.size(); ++i) {
    const int solo = std::uniform_int_distribution<int>(0, 3)(rng);
    for (int k = 0; k < solo; ++k) add({g.ids[i]});
    for (int v : g.adj[i]) {
      if (v < static_cast<int>(i)) continue;
      const double t = g.strength(static_cast<int>(i), v);
      std::poisson_distribution<int> joint(2.5 * t * t);
      const int k = joint(rng);
      for (int m = 0; m < k; ++m) {
        std::set<Id> tags{g.ids[i], g.ids[static_cast<std::size_t>(v)]};
        if (unit(rng) < 0.3) {
          std::vector<int> common;
          std::set_intersection(g.adj[i].begin(), g.adj[i].end(),
                                g.adj[static_cast<std::size_t>(v)].begin(),
                                g.adj[static_cast<std::size_t>(v)].end(),
                                std::back_inserter(common));
          if (!common.empty()) {
            std::uniform_int_distribution<std::size_t> pick(0, common.size() - 1);
            tags.insert(g.ids[static_cast<std::size_t>(common[pick(rng)])]);
          }
        }
        add(std::move(tags));
      }
    }
  }
  return photos;
}

AgreementAnswer draw_agreement(double p_agree, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  if (unit(rng) < p_agree) return AgreementAnswer::Agree;
  return unit(rng) < 0.75 ? AgreementAnswer::Disagree : AgreementAnswer::DontKnow;
}

Decision draw_decision(const GeneratorParams& p, Action action, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  if (action == Action::Nop) return Decision::ignore(IgnoreReason::SuggestionMakesNoSense);
  if (unit(rng) < p.acceptance[static_cast<std::size_t>(action)]) {
    switch (action) {
      case Action::Unfriend: return Decision::accept(DecisionKind::Unfriend);
      case Action::UnfriendOrSandbox:
        return Decision::accept(unit(rng) < p.sandbox_share ? DecisionKind::Sandbox
                                                            : DecisionKind::Unfriend);
      case Action::Restrict: return Decision::accept(DecisionKind::Restrict);
      case Action::Unfollow: return Decision::accept(DecisionKind::Unfollow);
      case Action::Nop: break;
    }
  }
  std::uniform_int_distribution<std::size_t> reason(0, kIgnoreReasons.size() - 1);
  return Decision::ignore(kIgnoreReasons[reason(rng)]);
}

}  // namespace

Population generate_population(const GeneratorParams& params) {
  params.validate();
  auto graph_rng = make_rng(params.seed, 1);
  const Graph g = build_graph(params, graph_rng);
  auto profile_rng = make_rng(params.seed, 2);
  auto users = make_profiles(g, profile_rng);
  auto activity_rng = make_rng(params.seed, 3);
  auto posts = make_posts(g, activity_rng);
  auto photos = make_photos(g, activity_rng);

  Population pop{SocialSnapshot(std::move(users), std::move(posts), std::move(photos)), {}};

  const RuleTable table = RuleTable::canonical(params.sandbox_enabled);
  auto answer_rng = make_rng(params.seed, 4);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::map<Id, int> index;
  for (std::size_t i = 0; i < g.ids.size(); ++i) index[g.ids[i]] = static_cast<int>(i);

  for (const auto& [uid, user] : pop.snapshot.users()) {
    for (const auto& fid : user.friend_ids) {
      const FeatureVector f = compute_features(pop.snapshot, uid, fid);
      const double t = g.strength(index.at(uid), index.at(fid));
      double on = online_score(f);
      double off = offline_score(f);
      if (params.answer_noise > 0) {
        on += params.answer_noise * (1.0 + 0.25 * on) * gauss(answer_rng);
        off += params.answer_noise * (1.0 + 0.25 * off) * gauss(answer_rng);
      }
      ResponseSet rs;
      rs.q1 = frequency_from_score(on, false);
      rs.q2 = frequency_from_score(off, true);
      rs.q3 = draw_agreement(params.abuse_base[0] + params.abuse_slope[0] * (1 - t), answer_rng);
      rs.q4 = draw_agreement(params.abuse_base[1] + params.abuse_slope[1] * (1 - t), answer_rng);
      rs.q5 = draw_agreement(params.abuse_base[2] + params.abuse_slope[2] * (1 - t), answer_rng);
      const Verdict v = infer_action(table, rs);
      pop.truth.pairs.push_back({uid, fid, t, rs, draw_decision(params, v.action, answer_rng)});
    }
  }
  return pop;
}

void write_ground_truth(std::ostream& out, const GroundTruth& truth) {
  for (const auto& p : truth.pairs) {
    json j;
    j["user"] = p.user;
    j["friend"] = p.friend_id;
    j["tie_strength"] = p.tie_strength;
    j["responses"] = to_json(p.responses);
    j["decision"] = to_string(p.decision.kind());
    j["ignore_reason"] = p.decision.ignore_reason()
                             ? json(to_string(*p.decision.ignore_reason()))
                             : json(nullptr);
    out << j.dump() << '\n';
  }
}

GroundTruth load_ground_truth(std::istream& in) {
  GroundTruth truth;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const json j = json::parse(line);
      std::optional<IgnoreReason> reason;
      if (j.contains("ignore_reason") && !j.at("ignore_reason").is_null()) {
        reason = parse_ignore_reason(j.at("ignore_reason").get<std::string>());
      }
      truth.pairs.push_back(
          {j.at("user").get<std::string>(), j.at("friend").get<std::string>(),
           j.at("tie_strength").get<double>(), response_set_from_json(j.at("responses")),
           Decision::make(parse_decision_kind(j.at("decision").get<std::string>()), reason)});
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::ParseError,
                  "ground truth line " + std::to_string(line_no) + ": " + e.what());
    } catch (const Error& e) {
      throw Error(ErrorCode::ParseError,
                  "ground truth line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  std::sort(truth.pairs.begin(), truth.pairs.end(), [](const auto& a, const auto& b) {
    return std::tie(a.user, a.friend_id) < std::tie(b.user, b.friend_id);
  });
  return truth;
}

std::vector<LabeledInstance> make_instances(const SocialSnapshot& snapshot,
                                            const GroundTruth& truth, TargetName target) {
  std::vector<LabeledInstance> out;
  out.reserve(truth.pairs.size());
  for (const auto& p : truth.pairs) {
    out.push_back({compute_features(snapshot, p.user, p.friend_id),
                   target_label(target, p.responses, p.decision.kind()),
                   p.user + "|" + p.friend_id, 1});
  }
  return out;
}

ParticipantBatch generate_participants(int count, int violations, std::uint64_t seed,
                                       const QualityConfig& config) {
  config.validate();
  require(count >= 0 && violations >= 0 && violations <= count,
          "violations must lie in 0..count");
  std::vector<QualityCheck> possible{QualityCheck::Timing};
  if (config.attention_check_required) possible.push_back(QualityCheck::AttentionCheck);
  if (!config.bogus_friend_ids.empty()) possible.push_back(QualityCheck::BogusFriend);

  auto rng = make_rng(seed, 5);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double threshold = config.min_avg_response_seconds;

  std::vector<int> order(static_cast<std::size_t>(count));
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  ParticipantBatch batch;
  batch.violating.assign(static_cast<std::size_t>(count), false);
  for (int i = 0; i < violations; ++i) batch.violating[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])] = true;

  const int width = std::max(3, static_cast<int>(std::to_string(count).size()));
  for (int i = 0; i < count; ++i) {
    std::set<QualityCheck> fail;
    if (batch.violating[static_cast<std::size_t>(i)]) {
      while (fail.empty()) {
        for (auto c : possible) {
          if (unit(rng) < 0.4) fail.insert(c);
        }
      }
    }
    ParticipantRecord r;
    r.id = numbered('p', i + 1, width);
    r.attention_passed = !fail.contains(QualityCheck::AttentionCheck);
    const bool fast = fail.contains(QualityCheck::Timing);
    for (int f = 0; f < 20; ++f) {
      const Id friend_id = "friend-" + std::to_string(f + 1);
      for (int q = 1; q <= kDecisionTimingIndex; ++q) {
        if (q == kDecisionTimingIndex && unit(rng) < 0.7) continue;
        const double s = fast ? 0.2 + 0.75 * threshold * unit(rng)
                              : threshold + 0.5 + 8.0 * unit(rng);
        r.timings.push_back({friend_id, q, s});
      }
    }
    std::size_t bad_bogus = config.bogus_friend_ids.size();
    if (fail.contains(QualityCheck::BogusFriend)) {
      bad_bogus = std::uniform_int_distribution<std::size_t>(
          0, config.bogus_friend_ids.size() - 1)(rng);
    }
    std::size_t k = 0;
    for (const auto& id : config.bogus_friend_ids) {
      ResponseSet rs;
      rs.q1 = unit(rng) < 0.7 ? FrequencyAnswer::Never : FrequencyAnswer::DontRemember;
      rs.q2 = unit(rng) < 0.7 ? FrequencyAnswer::Never : FrequencyAnswer::DontRemember;
      rs.q3 = kAgreementAnswers[static_cast<std::size_t>(unit(rng) * 3) % 3];
      rs.q4 = kAgreementAnswers[static_cast<std::size_t>(unit(rng) * 3) % 3];
      rs.q5 = kAgreementAnswers[static_cast<std::size_t>(unit(rng) * 3) % 3];
      if (k++ == bad_bogus) {
        const FrequencyAnswer implausible =
            kFrequencyAnswers[static_cast<std::size_t>(unit(rng) * 3) % 3];
        (unit(rng) < 0.5 ? rs.q1 : rs.q2) = implausible;
      }
      r.bogus_responses.emplace_back(id, rs);
    }
    batch.records.push_back(std::move(r));
  }
  return batch;
}

std::pair<std::vector<double>, std::vector<double>> correlated_sample(std::size_t n,
                                                                      double rho,
                                                                      std::uint64_t seed) {
  require(rho >= -1 && rho <= 1, "correlation must lie in [-1, 1]");
  auto rng = make_rng(seed, 6);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<double> xs(n), ys(n);
  const double rest = std::sqrt(1 - rho * rho);
  for (std::size_t i = 0; i < n; ++i) {
    xs[i] = gauss(rng);
    ys[i] = rho * xs[i] + rest * gauss(rng);
  }
  return {std::move(xs), std::move(ys)};
}

}  // namespace friendaudit
