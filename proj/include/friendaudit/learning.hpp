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

#ifndef FRIENDAUDIT_LEARNING_HPP
#define FRIENDAUDIT_LEARNING_HPP

/** @file learning.hpp Decision trees, random forests and grouped k-fold
 * cross-validation over mutual-activity features.
 *
 * Trees are grown top-down with the Gini criterion. At every node each
 * candidate feature is scanned over the midpoints between its sorted distinct
 * values; the split with the lowest weighted child impurity wins, ties going
 * to the lowest feature index and then the lowest threshold. A split is taken
 * even when it does not lower impurity (XOR-like data needs that), so growth
 * stops only at a pure node, the depth limit, or when no split leaves
 * `min_leaf_size` samples on both sides.
 *
 * Class imbalance is handled by duplicating minority-class instances. A
 * duplicate keeps the `origin_id` of the instance it copies, and folds are
 * assigned per origin so a tuple never lands on both sides of a split.
 **/

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

#include "friendaudit/domain.hpp"
#include "friendaudit/evaluation.hpp"
#include "friendaudit/features.hpp"

namespace friendaudit {

enum class TargetName : std::uint8_t { Q1, Q2, Q3, Q4, Q5, Decision };

inline constexpr std::array<TargetName, 6> kTargetNames{
    TargetName::Q1, TargetName::Q2, TargetName::Q3,
    TargetName::Q4, TargetName::Q5, TargetName::Decision};

std::string_view to_string(TargetName name) noexcept;
TargetName parse_target_name(std::string_view token);

struct PredictionTarget {
  TargetName name = TargetName::Q1;
  std::vector<std::string> classes;

  /// Q1/Q2 take the five frequency labels, Q3..Q5 the three agreement labels,
  /// Decision the five decision labels.
  static PredictionTarget of(TargetName name);

  /// Throws UnknownLabel.
  [[nodiscard]] std::size_t class_index(std::string_view label) const;

  friend bool operator==(const PredictionTarget&, const PredictionTarget&) = default;
};

/// Class label of a target for a given answer set and decision.
std::string target_label(TargetName name, const ResponseSet& responses,
                         DecisionKind decision);

struct LabeledInstance {
  FeatureVector features;
  std::string label;
  Id origin_id;
  int weight = 1;

  friend bool operator==(const LabeledInstance&, const LabeledInstance&) = default;
};

struct TreeParams {
  int max_depth = 0;  ///< 0 = unlimited
  int min_leaf_size = 1;

  friend bool operator==(const TreeParams&, const TreeParams&) = default;
};

struct TreeNode {
  int feature = -1;  ///< -1 marks a leaf
  double threshold = 0;
  int left = -1;   ///< samples with value <= threshold
  int right = -1;
  std::vector<double> counts;  ///< weighted class counts at this node

  [[nodiscard]] bool is_leaf() const noexcept { return feature < 0; }
  friend bool operator==(const TreeNode&, const TreeNode&) = default;
};

struct TreeModel {
  PredictionTarget target;
  TreeParams params;
  std::vector<TreeNode> nodes;  ///< nodes[0] is the root

  [[nodiscard]] const TreeNode& leaf_for(const FeatureVector& x) const;
  [[nodiscard]] int depth() const;

  friend bool operator==(const TreeModel&, const TreeModel&) = default;
};

struct ForestParams {
  int tree_count = 100;
  int features_per_split = 3;
  std::uint64_t seed = 0;
  bool bootstrap = true;
  TreeParams tree;

  friend bool operator==(const ForestParams&, const ForestParams&) = default;
};

struct ForestModel {
  PredictionTarget target;
  ForestParams params;
  std::vector<TreeModel> trees;

  friend bool operator==(const ForestModel&, const ForestModel&) = default;
};

using Model = std::variant<TreeModel, ForestModel>;

struct Prediction {
  std::string label;
  std::vector<double> distribution;  ///< in target class order, sums to 1
};

/// Tree: normalized leaf counts. Forest: fraction of tree votes. The label is
/// the arg-max, ties going to the earlier class.
Prediction predict(const TreeModel& model, const FeatureVector& x);
Prediction predict(const ForestModel& model, const FeatureVector& x);
Prediction predict(const Model& model, const FeatureVector& x);
const PredictionTarget& target_of(const Model& model);

/// Pads every class up to the majority count by duplicating its originals
/// round-robin, starting from a seeded shuffle. Originals keep their order;
/// duplicates are appended class by class. Throws EmptyClass.
std::vector<LabeledInstance> balance_dataset(std::span<const LabeledInstance> data,
                                             const PredictionTarget& target,
                                             std::uint64_t seed);

struct FoldAssignment {
  int k = 0;
  std::map<Id, int> fold_of;  ///< origin id -> fold

  [[nodiscard]] int fold(const LabeledInstance& x) const;
  /// Number of origin groups per fold.
  [[nodiscard]] std::vector<std::size_t> group_counts() const;
};

/// Deals origin groups to k folds. Groups are sorted by label, shuffled
/// within each label, and dealt round-robin, so fold group counts differ by at
/// most one. Throws TooFewGroups.
FoldAssignment make_folds(std::span<const LabeledInstance> data, int k,
                          std::uint64_t seed);

TreeModel train_tree(std::span<const LabeledInstance> data,
                     const PredictionTarget& target, const TreeParams& params = {});
ForestModel train_forest(std::span<const LabeledInstance> data,
                         const PredictionTarget& target,
                         const ForestParams& params = {});

enum class Algorithm : std::uint8_t { Tree, Forest };
std::string_view to_string(Algorithm algo) noexcept;
Algorithm parse_algorithm(std::string_view token);

struct LearnerConfig {
  TreeParams tree;
  ForestParams forest;
};

Model train_model(std::span<const LabeledInstance> data,
                  const PredictionTarget& target, Algorithm algo,
                  const LearnerConfig& config, std::uint64_t seed);

struct FoldStats {
  std::size_t groups = 0;
  std::size_t train_instances = 0;
  std::size_t test_instances = 0;
};

struct EvaluationReport {
  TargetName target = TargetName::Q1;
  Algorithm algorithm = Algorithm::Forest;
  int k = 10;
  std::uint64_t seed = 0;
  LearnerConfig config;
  std::size_t original_instances = 0;
  std::size_t balanced_instances = 0;
  std::vector<FoldStats> folds;
  /// Origins seen on both the train and the test side of some fold.
  std::size_t grouping_violations = 0;
  ConfusionMatrix matrix;
  ClassMetrics metrics;
  std::vector<std::string> notes;
};

/// Balance, group folds, train on k-1 folds, predict the held-out originals,
/// pool the predictions into one confusion matrix.
EvaluationReport cross_validate(std::span<const LabeledInstance> data,
                                const PredictionTarget& target, Algorithm algo,
                                int k, std::uint64_t seed,
                                const LearnerConfig& config = {});

std::string format_report(const EvaluationReport& report);
nlohmann::ordered_json to_json(const EvaluationReport& report);

/// Versioned JSON model document; parse_model(serialize_model(m)) == m.
std::string serialize_model(const Model& model);
Model parse_model(std::string_view text);

}  // namespace friendaudit

#endif  // FRIENDAUDIT_LEARNING_HPP
