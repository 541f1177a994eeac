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

#include <algorithm>
#include <map>
#include <numeric>
#include <random>
#include <set>

#include <gtest/gtest.h>

#include "friendaudit/learning.hpp"

namespace friendaudit {
namespace {

const PredictionTarget kAgree = PredictionTarget::of(TargetName::Q3);  // 3 classes

LabeledInstance inst(FeatureVector fv, std::string label, std::string origin) {
  return {fv, std::move(label), std::move(origin), 1};
}

// `n` instances labeled by a threshold on mutual_friend_count.
std::vector<LabeledInstance> threshold_data(int n) {
  std::vector<LabeledInstance> out;
  for (int i = 0; i < n; ++i) {
    FeatureVector fv;
    fv.mutual_friend_count = static_cast<std::uint32_t>(i % 11);
    fv.mutual_post_count = static_cast<std::uint32_t>((i * 7) % 5);
    out.push_back(inst(fv, fv.mutual_friend_count > 5 ? "Agree" : "Disagree",
                       "o" + std::to_string(i)));
  }
  return out;
}

// Three classes; "Don't Know" is marked by common_work_count.
std::vector<LabeledInstance> three_class_data(int n) {
  auto data = threshold_data(n);
  for (std::size_t i = 0; i < data.size(); i += 4) {
    data[i].label = "Don't Know";
    data[i].features.common_work_count = 9;
  }
  return data;
}

std::vector<LabeledInstance> xor_data() {
  std::vector<LabeledInstance> out;
  int id = 0;
  for (int rep = 0; rep < 5; ++rep) {
    for (bool a : {false, true}) {
      for (bool b : {false, true}) {
        FeatureVector fv;
        fv.same_current_city = a;
        fv.same_hometown = b;
        out.push_back(inst(fv, a != b ? "Agree" : "Disagree", "x" + std::to_string(id++)));
      }
    }
  }
  return out;
}

double training_accuracy(const Model& m, const std::vector<LabeledInstance>& data) {
  int hit = 0;
  for (const auto& x : data) hit += predict(m, x.features).label == x.label ? 1 : 0;
  return static_cast<double>(hit) / static_cast<double>(data.size());
}

TEST(Tree, SingleClassIsOneLeaf) {
  std::vector<LabeledInstance> data;
  for (int i = 0; i < 6; ++i) data.push_back(inst({}, "Agree", std::to_string(i)));
  data[2].features.common_photo_count = 9;
  const TreeModel t = train_tree(data, kAgree);
  ASSERT_EQ(t.nodes.size(), 1u);
  const Prediction p = predict(t, data[0].features);
  EXPECT_EQ(p.label, "Agree");
  EXPECT_DOUBLE_EQ(p.distribution[0], 1.0);
}

TEST(Tree, ThresholdDataIsOneSplit) {
  const auto data = threshold_data(60);
  const TreeModel t = train_tree(data, kAgree);
  EXPECT_EQ(t.depth(), 1);
  EXPECT_EQ(t.nodes[0].feature, 2);
  EXPECT_DOUBLE_EQ(t.nodes[0].threshold, 5.5);
  EXPECT_DOUBLE_EQ(training_accuracy(t, data), 1.0);
}

TEST(Tree, XorNeedsTwoLevels) {
  const auto data = xor_data();
  const TreeModel t = train_tree(data, kAgree);
  EXPECT_EQ(t.depth(), 2);
  EXPECT_EQ(t.nodes.size(), 7u);
  // Neither feature lowers impurity on its own; the tie goes to the lower index.
  EXPECT_EQ(t.nodes[0].feature, 3);
  EXPECT_DOUBLE_EQ(training_accuracy(t, data), 1.0);
}

TEST(Tree, DepthLimitAndMinLeaf) {
  const auto data = xor_data();
  EXPECT_EQ(train_tree(data, kAgree, {1, 1}).depth(), 1);
  EXPECT_EQ(train_tree(data, kAgree, {0, 11}).depth(), 0);
}

TEST(Tree, WeightsActAsCopies) {
  auto data = threshold_data(30);
  auto copied = data;
  copied.push_back(data[3]);
  data[3].weight = 2;
  const TreeModel a = train_tree(data, kAgree);
  const TreeModel b = train_tree(copied, kAgree);
  EXPECT_EQ(a.nodes, b.nodes);
}

TEST(Forest, DegenerateForestIsTheTree) {
  const auto data = threshold_data(40);
  ForestParams p;
  p.tree_count = 1;
  p.features_per_split = 7;
  p.bootstrap = false;
  const ForestModel f = train_forest(data, kAgree, p);
  ASSERT_EQ(f.trees.size(), 1u);
  EXPECT_EQ(f.trees[0].nodes, train_tree(data, kAgree).nodes);
  const auto x = xor_data();
  EXPECT_EQ(train_forest(x, kAgree, p).trees[0].nodes, train_tree(x, kAgree).nodes);
}

TEST(Forest, SameSeedSamePredictions) {
  const auto data = threshold_data(80);
  ForestParams p;
  p.tree_count = 25;
  p.seed = 9;
  const ForestModel a = train_forest(data, kAgree, p);
  const ForestModel b = train_forest(data, kAgree, p);
  EXPECT_EQ(a, b);
  p.seed = 10;
  const ForestModel c = train_forest(data, kAgree, p);
  EXPECT_NE(a.trees, c.trees);
}

TEST(Forest, SeparableDataIsLearnt) {
  const auto data = threshold_data(100);
  ForestParams p;
  p.tree_count = 50;
  p.seed = 1;
  EXPECT_DOUBLE_EQ(training_accuracy(train_forest(data, kAgree, p), data), 1.0);
}

TEST(Forest, ThreeOfFiveVote) {
  ForestModel f;
  f.target = kAgree;
  for (const char* label : {"Agree", "Disagree", "Agree", "Disagree", "Agree"}) {
    TreeModel t;
    t.target = kAgree;
    TreeNode leaf;
    leaf.counts.assign(3, 0.0);
    leaf.counts[kAgree.class_index(label)] = 4;
    t.nodes.push_back(leaf);
    f.trees.push_back(t);
  }
  const Prediction p = predict(f, FeatureVector{});
  EXPECT_EQ(p.label, "Agree");
  EXPECT_DOUBLE_EQ(p.distribution[0], 0.6);
  EXPECT_DOUBLE_EQ(p.distribution[1], 0.4);
  EXPECT_DOUBLE_EQ(p.distribution[2], 0.0);
}

TEST(Forest, RejectsBadParams) {
  const auto data = threshold_data(10);
  ForestParams p;
  p.tree_count = 0;
  EXPECT_THROW(train_forest(data, kAgree, p), Error);
  p.tree_count = 3;
  p.features_per_split = 8;
  EXPECT_THROW(train_forest(data, kAgree, p), Error);
}

TEST(PredictProperty, DistributionSumsToOne) {
  std::mt19937_64 rng(3);
  const auto data = threshold_data(50);
  ForestParams p;
  p.tree_count = 15;
  const Model models[] = {train_tree(data, kAgree), train_forest(data, kAgree, p)};
  std::uniform_int_distribution<int> v(0, 12);
  for (int i = 0; i < 500; ++i) {
    FeatureVector fv;
    fv.mutual_friend_count = static_cast<std::uint32_t>(v(rng));
    fv.mutual_post_count = static_cast<std::uint32_t>(v(rng));
    for (const auto& m : models) {
      const Prediction pr = predict(m, fv);
      const double sum = std::accumulate(pr.distribution.begin(), pr.distribution.end(), 0.0);
      EXPECT_NEAR(sum, 1.0, 1e-9);
      const auto best = std::max_element(pr.distribution.begin(), pr.distribution.end());
      EXPECT_EQ(pr.label, kAgree.classes[static_cast<std::size_t>(best - pr.distribution.begin())]);
    }
  }
}

std::vector<LabeledInstance> counts_data(std::map<std::string, int> counts) {
  std::vector<LabeledInstance> out;
  int id = 0;
  for (const auto& [label, n] : counts) {
    for (int i = 0; i < n; ++i) {
      FeatureVector fv;
      fv.mutual_post_count = static_cast<std::uint32_t>(id);
      out.push_back(inst(fv, label, "g" + std::to_string(id++)));
    }
  }
  return out;
}

TEST(Balance, PadsMinoritiesToMajority) {
  const auto data = counts_data({{"Agree", 10}, {"Disagree", 4}, {"Don't Know", 2}});
  const auto out = balance_dataset(data, kAgree, 1);
  ASSERT_EQ(out.size(), 30u);
  std::map<std::string, int> n;
  for (const auto& x : out) ++n[x.label];
  EXPECT_EQ(n["Agree"], 10);
  EXPECT_EQ(n["Disagree"], 10);
  EXPECT_EQ(n["Don't Know"], 10);
  EXPECT_TRUE(std::equal(data.begin(), data.end(), out.begin()));
  // Every duplicate is a verbatim copy of some original.
  for (std::size_t i = data.size(); i < out.size(); ++i) {
    EXPECT_NE(std::find(data.begin(), data.end(), out[i]), data.end());
  }
  EXPECT_EQ(balance_dataset(data, kAgree, 1), out);
}

TEST(Balance, BalancedInputUnchangedAndEmptyClassRejected) {
  const auto data = counts_data({{"Agree", 3}, {"Disagree", 3}, {"Don't Know", 3}});
  EXPECT_EQ(balance_dataset(data, kAgree, 4), data);
  const auto missing = counts_data({{"Agree", 3}, {"Disagree", 3}});
  try {
    balance_dataset(missing, kAgree, 4);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::EmptyClass);
  }
}

TEST(Folds, TwentyGroupsTenFolds) {
  const auto data = counts_data({{"Agree", 8}, {"Disagree", 7}, {"Don't Know", 5}});
  const FoldAssignment f = make_folds(data, 10, 3);
  for (auto c : f.group_counts()) EXPECT_EQ(c, 2u);
}

TEST(Folds, LargeGroupCountIsNearEven) {
  std::vector<LabeledInstance> data;
  for (int i = 0; i < 1452; ++i) {
    data.push_back(inst({}, i % 3 == 0 ? "Agree" : "Disagree", "g" + std::to_string(i)));
  }
  const FoldAssignment f = make_folds(data, 10, 8);
  for (auto c : f.group_counts()) {
    EXPECT_TRUE(c == 145u || c == 146u) << c;
  }
}

TEST(Folds, DuplicatesFollowTheirOrigin) {
  const auto data = counts_data({{"Agree", 12}, {"Disagree", 5}, {"Don't Know", 3}});
  const auto balanced = balance_dataset(data, kAgree, 2);
  const FoldAssignment f = make_folds(balanced, 5, 2);
  std::map<Id, int> seen;
  for (const auto& x : balanced) {
    const int k = f.fold(x);
    const auto [it, fresh] = seen.emplace(x.origin_id, k);
    EXPECT_EQ(it->second, k);
  }
}

TEST(Folds, Errors) {
  const auto data = counts_data({{"Agree", 2}, {"Disagree", 1}});
  EXPECT_THROW(make_folds(data, 10, 1), Error);
  EXPECT_THROW(make_folds(data, 1, 1), Error);
  auto clash = data;
  clash[1].origin_id = clash[0].origin_id;
  clash[1].label = "Disagree";
  EXPECT_THROW(make_folds(clash, 2, 1), Error);
  FoldAssignment empty;
  EXPECT_THROW(empty.fold(data[0]), Error);
}

TEST(CrossValidate, SeparableDataScoresPerfectly) {
  const auto data = three_class_data(120);
  const EvaluationReport r = cross_validate(data, kAgree, Algorithm::Tree, 10, 5);
  EXPECT_DOUBLE_EQ(r.metrics.weighted_avg.f_measure, 1.0);
  EXPECT_EQ(r.grouping_violations, 0u);
  EXPECT_EQ(r.matrix.total(), 120);
  EXPECT_EQ(r.folds.size(), 10u);
  EXPECT_FALSE(r.notes.empty());
}

TEST(CrossValidate, ShuffledLabelsScoreNearChance) {
  double total = 0;
  const int seeds = 8;
  for (int s = 0; s < seeds; ++s) {
    std::mt19937_64 rng(static_cast<std::uint64_t>(s));
    std::uniform_int_distribution<int> v(0, 9);
    std::vector<LabeledInstance> data;
    for (int i = 0; i < 300; ++i) {
      FeatureVector fv;
      fv.mutual_post_count = static_cast<std::uint32_t>(v(rng));
      fv.mutual_friend_count = static_cast<std::uint32_t>(v(rng));
      data.push_back(inst(fv, kAgree.classes[static_cast<std::size_t>(i % 3)],
                          "r" + std::to_string(i)));
    }
    std::vector<std::string> labels;
    for (const auto& x : data) labels.push_back(x.label);
    std::shuffle(labels.begin(), labels.end(), rng);
    for (std::size_t i = 0; i < data.size(); ++i) data[i].label = labels[i];
    total += cross_validate(data, kAgree, Algorithm::Tree, 10, static_cast<std::uint64_t>(s))
                 .metrics.weighted_avg.f_measure;
  }
  EXPECT_NEAR(total / seeds, 1.0 / 3.0, 0.1);
}

TEST(CrossValidate, DeterministicInSeed) {
  const auto data = three_class_data(90);
  const auto a = cross_validate(data, kAgree, Algorithm::Forest, 5, 3);
  const auto b = cross_validate(data, kAgree, Algorithm::Forest, 5, 3);
  EXPECT_EQ(a.matrix.counts, b.matrix.counts);
  EXPECT_EQ(to_json(a).dump(), to_json(b).dump());
}

TEST(ModelFile, RoundTrip) {
  const auto data = threshold_data(40);
  ForestParams p;
  p.tree_count = 4;
  p.seed = 77;
  const Model models[] = {train_tree(xor_data(), kAgree), train_forest(data, kAgree, p)};
  for (const auto& m : models) {
    const std::string text = serialize_model(m);
    const Model back = parse_model(text);
    EXPECT_EQ(back, m);
    EXPECT_EQ(serialize_model(back), text);
  }
}

TEST(ModelFile, RejectsGarbage) {
  for (const char* bad : {"", "{}", "[1,2]", R"({"format":"friendaudit-model","version":99})",
                          R"({"format":"other","version":1})"}) {
    try {
      parse_model(bad);
      ADD_FAILURE() << bad;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::ParseError) << bad;
    }
  }
}

TEST(Targets, LabelsAndParsing) {
  const ResponseSet r{FrequencyAnswer::Never, FrequencyAnswer::Occasionally,
                      AgreementAnswer::Agree, AgreementAnswer::Disagree,
                      AgreementAnswer::DontKnow};
  EXPECT_EQ(target_label(TargetName::Q2, r, DecisionKind::Ignore), "Occasionally");
  EXPECT_EQ(target_label(TargetName::Decision, r, DecisionKind::Sandbox),
            std::string(to_string(DecisionKind::Sandbox)));
  for (auto t : kTargetNames) EXPECT_EQ(parse_target_name(to_string(t)), t);
  EXPECT_EQ(parse_algorithm("rf"), Algorithm::Forest);
  EXPECT_EQ(parse_algorithm("DT"), Algorithm::Tree);
  EXPECT_THROW(kAgree.class_index("Never"), Error);
}

}  // namespace
}  // namespace friendaudit
