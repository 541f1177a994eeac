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

#include <map>
#include <sstream>

#include <gtest/gtest.h>

#include "friendaudit/generator.hpp"
#include "friendaudit/rules.hpp"
#include "friendaudit/session.hpp"

namespace friendaudit {
namespace {

std::string snapshot_text(const SocialSnapshot& s) {
  std::ostringstream out;
  write_snapshot(out, s);
  return out.str();
}

TEST(Generate, SeededAndByteIdentical) {
  GeneratorParams p;
  p.seed = 5;
  p.user_count = 40;
  const Population a = generate_population(p);
  const Population b = generate_population(p);
  EXPECT_EQ(snapshot_text(a.snapshot), snapshot_text(b.snapshot));
  EXPECT_EQ(a.truth.pairs, b.truth.pairs);
  p.seed = 6;
  EXPECT_NE(snapshot_text(generate_population(p).snapshot), snapshot_text(a.snapshot));
}

TEST(Generate, DefaultScaleAndIntegrity) {
  GeneratorParams p;
  p.seed = 1;
  const Population pop = generate_population(p);
  EXPECT_EQ(pop.snapshot.users().size(), 57u);
  EXPECT_NEAR(static_cast<double>(pop.truth.pairs.size()), 1452.0, 150.0);
  // Survives a write/load cycle, so every integrity rule holds.
  std::istringstream in(snapshot_text(pop.snapshot));
  EXPECT_EQ(load_snapshot(in).users(), pop.snapshot.users());
  for (const auto& t : pop.truth.pairs) {
    ASSERT_TRUE(pop.snapshot.are_friends(t.user, t.friend_id));
  }
}

TEST(Generate, SingleUserHasNoPairs) {
  GeneratorParams p;
  p.user_count = 1;
  p.min_friends = 0;
  p.max_friends = 0;
  const Population pop = generate_population(p);
  EXPECT_EQ(pop.snapshot.users().size(), 1u);
  EXPECT_TRUE(pop.truth.pairs.empty());
}

TEST(Generate, ZeroTieStrengthMeansStrangers) {
  GeneratorParams p;
  p.seed = 3;
  p.user_count = 25;
  p.min_friends = 5;
  p.max_friends = 10;
  p.forced_tie_strength = 0.0;
  const Population pop = generate_population(p);
  ASSERT_FALSE(pop.truth.pairs.empty());
  for (const auto& t : pop.truth.pairs) {
    EXPECT_EQ(t.responses.q1, FrequencyAnswer::Never);
    EXPECT_EQ(t.responses.q2, FrequencyAnswer::Never);
  }
}

TEST(Generate, RejectsBadParams) {
  GeneratorParams p;
  p.within_community = 1.5;
  EXPECT_THROW(generate_population(p), Error);
  p = {};
  p.min_friends = 10;
  p.max_friends = 5;
  EXPECT_THROW(generate_population(p), Error);
  p = {};
  p.acceptance[0] = -0.1;
  EXPECT_THROW(generate_population(p), Error);
}

TEST(Generate, PostsRiseWithTieStrength) {
  GeneratorParams p;
  p.seed = 2;
  const Population pop = generate_population(p);
  std::map<int, std::pair<double, int>> buckets;
  for (const auto& t : pop.truth.pairs) {
    const int b = std::min(4, static_cast<int>(t.tie_strength * 5));
    const auto fv = compute_features(pop.snapshot, t.user, t.friend_id);
    buckets[b].first += fv.mutual_post_count;
    ++buckets[b].second;
  }
  double prev = -1;
  for (const auto& [b, sum] : buckets) {
    ASSERT_GT(sum.second, 0);
    const double mean = sum.first / sum.second;
    EXPECT_GT(mean, prev) << "bucket " << b;
    prev = mean;
  }
}

TEST(Generate, NoiseFreeAnswersFollowScores) {
  GeneratorParams p;
  p.seed = 4;
  const Population pop = generate_population(p);
  const RuleTable rules = RuleTable::canonical(p.sandbox_enabled);
  std::size_t flagged = 0;
  for (const auto& t : pop.truth.pairs) {
    const auto fv = compute_features(pop.snapshot, t.user, t.friend_id);
    EXPECT_EQ(t.responses.q1, frequency_from_score(online_score(fv), false));
    EXPECT_EQ(t.responses.q2, frequency_from_score(offline_score(fv), true));
    const Action a = infer_action(rules, t.responses).action;
    flagged += a != Action::Nop ? 1 : 0;
    if (a == Action::Nop) {
      EXPECT_EQ(t.decision, Decision::ignore(IgnoreReason::SuggestionMakesNoSense));
    } else {
      EXPECT_TRUE(is_compatible(a, t.decision.kind()))
          << to_string(a) << " " << to_string(t.decision.kind());
    }
  }
  const double share = static_cast<double>(flagged) / static_cast<double>(pop.truth.pairs.size());
  EXPECT_GT(share, 0.2);
  EXPECT_LT(share, 0.5);
}

TEST(Truth, WriteThenLoad) {
  GeneratorParams p;
  p.seed = 8;
  p.user_count = 12;
  p.min_friends = 3;
  p.max_friends = 6;
  const Population pop = generate_population(p);
  std::ostringstream out;
  write_ground_truth(out, pop.truth);
  std::istringstream in(out.str());
  EXPECT_EQ(load_ground_truth(in).pairs, pop.truth.pairs);
  ASSERT_FALSE(pop.truth.pairs.empty());
  const auto& first = pop.truth.pairs.front();
  EXPECT_EQ(pop.truth.find(first.user, first.friend_id), &pop.truth.pairs.front());
  EXPECT_EQ(pop.truth.find("nobody", first.friend_id), nullptr);
}

TEST(Instances, OneInstancePerPair) {
  GeneratorParams p;
  p.seed = 8;
  p.user_count = 12;
  p.min_friends = 3;
  p.max_friends = 6;
  const Population pop = generate_population(p);
  const auto data = make_instances(pop.snapshot, pop.truth, TargetName::Decision);
  ASSERT_EQ(data.size(), pop.truth.pairs.size());
  EXPECT_EQ(data[0].origin_id, pop.truth.pairs[0].user + "|" + pop.truth.pairs[0].friend_id);
}

TEST(Params, JsonRoundTrip) {
  GeneratorParams p;
  p.seed = 77;
  p.answer_noise = 0.5;
  p.forced_tie_strength = 0.25;
  const GeneratorParams back = generator_params_from_json(to_json(p));
  EXPECT_EQ(to_json(back).dump(), to_json(p).dump());
}

}  // namespace
}  // namespace friendaudit
