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

#include "friendaudit/learning.hpp"

#include <algorithm>
#include <atomic>
#include <iomanip>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <thread>

#include <Eigen/Core>

namespace friendaudit {

std::string_view to_string(TargetName name) noexcept {
  switch (name) {
    case TargetName::Q1: return "Q1";
    case TargetName::Q2: return "Q2";
    case TargetName::Q3: return "Q3";
    case TargetName::Q4: return "Q4";
    case TargetName::Q5: return "Q5";
    case TargetName::Decision: return "Decision";
  }
  return "";
}

TargetName parse_target_name(std::string_view token) {
  const std::string key = normalize_token(token);
  for (TargetName t : kTargetNames) {
    if (normalize_token(to_string(t)) == key) return t;
  }
  throw Error(ErrorCode::UnknownToken,
              "unknown prediction target '" + std::string(token) + "'");
}

PredictionTarget PredictionTarget::of(TargetName name) {
  PredictionTarget t{name, {}};
  switch (name) {
    case TargetName::Q1:
    case TargetName::Q2:
      for (auto a : kFrequencyAnswers) t.classes.emplace_back(to_string(a));
      break;
    case TargetName::Q3:
    case TargetName::Q4:
    case TargetName::Q5:
      for (auto a : kAgreementAnswers) t.classes.emplace_back(to_string(a));
      break;
    case TargetName::Decision:
      for (auto d : kDecisionKinds) t.classes.emplace_back(to_string(d));
      break;
  }
  return t;
}

std::size_t PredictionTarget::class_index(std::string_view label) const {
  const auto it = std::find(classes.begin(), classes.end(), label);
  if (it == classes.end()) {
    throw Error(ErrorCode::UnknownLabel, "label '" + std::string(label) +
                                             "' is not a class of " +
                                             std::string(to_string(name)));
  }
  return static_cast<std::size_t>(it - classes.begin());
}

std::string target_label(TargetName name, const ResponseSet& responses,
                         DecisionKind decision) {
  switch (name) {
    case TargetName::Q1: return std::string(to_string(responses.q1));
    case TargetName::Q2: return std::string(to_string(responses.q2));
    case TargetName::Q3: return std::string(to_string(responses.q3));
    case TargetName::Q4: return std::string(to_string(responses.q4));
    case TargetName::Q5: return std::string(to_string(responses.q5));
    case TargetName::Decision: return std::string(to_string(decision));
  }
  return {};
}

std::string_view to_string(Algorithm algo) noexcept {
  return algo == Algorithm::Tree ? "tree" : "forest";
}

Algorithm parse_algorithm(std::string_view token) {
  const std::string key = normalize_token(token);
  if (key == "tree" || key == "dt") return Algorithm::Tree;
  if (key == "forest" || key == "rf") return Algorithm::Forest;
  throw Error(ErrorCode::UnknownToken,
              "unknown algorithm '" + std::string(token) + "'");
}

namespace {

using FeatureMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, FeatureVector::kSize, Eigen::RowMajor>;

// Training data in dense form.
struct Dataset {
  FeatureMatrix x;
  std::vector<int> y;
  std::vector<double> w;
  int class_count = 0;
};

Dataset to_dataset(std::span<const LabeledInstance> data,
                   const PredictionTarget& target) {
  Dataset d;
  d.class_count = static_cast<int>(target.classes.size());
  d.x.resize(static_cast<Eigen::Index>(data.size()), FeatureVector::kSize);
  d.y.reserve(data.size());
  d.w.reserve(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    d.x.row(static_cast<Eigen::Index>(i)) = to_row(data[i].features);
    d.y.push_back(static_cast<int>(target.class_index(data[i].label)));
    if (data[i].weight < 1) {
      throw Error(ErrorCode::InvalidArgument, "instance weight must be positive");
    }
    d.w.push_back(data[i].weight);
  }
  return d;
}

// Sum over children of W - sum(c^2)/W; proportional to the weighted Gini.
double child_impurity(const std::vector<double>& counts, double total) {
  if (total <= 0) return 0;
  double sq = 0;
  for (double c : counts) sq += c * c;
  return total - sq / total;
}

struct SplitChoice {
  int feature = -1;
  double threshold = 0;
  double score = 0;
};

class TreeGrower {
 public:
  TreeGrower(const Dataset& data, const TreeParams& params,
             std::mt19937_64* rng, int features_per_split)
      : data_(data),
        params_(params),
        rng_(rng),
        features_per_split_(features_per_split) {}

  std::vector<TreeNode> grow(std::vector<int> samples) {
    std::vector<TreeNode> nodes;
    struct Work {
      int node;
      std::vector<int> samples;
      int depth;
    };
    std::vector<Work> stack;
    nodes.emplace_back();
    stack.push_back({0, std::move(samples), 0});
    while (!stack.empty()) {
      Work work = std::move(stack.back());
      stack.pop_back();

      std::vector<double> counts(static_cast<std::size_t>(data_.class_count), 0.0);
      for (int s : work.samples) {
        counts[static_cast<std::size_t>(data_.y[static_cast<std::size_t>(s)])] +=
            data_.w[static_cast<std::size_t>(s)];
      }
      nodes[static_cast<std::size_t>(work.node)].counts = counts;

      const auto nonzero = std::count_if(counts.begin(), counts.end(),
                                         [](double c) { return c > 0; });
      const bool depth_reached =
          params_.max_depth > 0 && work.depth >= params_.max_depth;
      if (nonzero <= 1 || depth_reached) continue;

      const SplitChoice split = best_split(work.samples, counts);
      if (split.feature < 0) continue;

      std::vector<int> left, right;
      for (int s : work.samples) {
        (data_.x(s, split.feature) <= split.threshold ? left : right).push_back(s);
      }
      const int left_id = static_cast<int>(nodes.size());
      nodes.emplace_back();
      const int right_id = static_cast<int>(nodes.size());
      nodes.emplace_back();
      TreeNode& node = nodes[static_cast<std::size_t>(work.node)];
      node.feature = split.feature;
      node.threshold = split.threshold;
      node.left = left_id;
      node.right = right_id;
      // Right first so the left subtree is numbered first.
      stack.push_back({right_id, std::move(right), work.depth + 1});
      stack.push_back({left_id, std::move(left), work.depth + 1});
    }
    return nodes;
  }

 private:
  std::vector<int> candidate_features() {
    std::vector<int> all(FeatureVector::kSize);
    std::iota(all.begin(), all.end(), 0);
    if (rng_ == nullptr || features_per_split_ >= static_cast<int>(all.size())) {
      return all;
    }
    std::shuffle(all.begin(), all.end(), *rng_);
    all.resize(static_cast<std::size_t>(features_per_split_));
    std::sort(all.begin(), all.end());
    return all;
  }

  SplitChoice best_split(const std::vector<int>& samples,
                         const std::vector<double>& parent_counts) {
    constexpr double kTieEpsilon = 1e-9;
    const auto n = samples.size();
    const auto min_leaf = static_cast<std::size_t>(std::max(1, params_.min_leaf_size));
    if (n < 2 * min_leaf) return {};
    const double total_weight =
        std::accumulate(parent_counts.begin(), parent_counts.end(), 0.0);

    SplitChoice best;
    std::vector<std::pair<double, int>> order(n);
    std::vector<double> left(parent_counts.size());
    std::vector<double> right(parent_counts.size());
    for (int f : candidate_features()) {
      for (std::size_t i = 0; i < n; ++i) {
        order[i] = {data_.x(samples[i], f), samples[i]};
      }
      std::sort(order.begin(), order.end());
      if (order.front().first == order.back().first) continue;

      std::fill(left.begin(), left.end(), 0.0);
      right = parent_counts;
      double left_weight = 0;
      for (std::size_t i = 0; i + 1 < n; ++i) {
        const auto s = static_cast<std::size_t>(order[i].second);
        const auto c = static_cast<std::size_t>(data_.y[s]);
        left[c] += data_.w[s];
        right[c] -= data_.w[s];
        left_weight += data_.w[s];
        if (order[i].first == order[i + 1].first) continue;
        if (i + 1 < min_leaf || n - (i + 1) < min_leaf) continue;
        const double score = child_impurity(left, left_weight) +
                             child_impurity(right, total_weight - left_weight);
        if (best.feature < 0 || score < best.score - kTieEpsilon) {
          best = {f, 0.5 * (order[i].first + order[i + 1].first), score};
        }
      }
    }
    return best;
  }

  const Dataset& data_;
  TreeParams params_;
  std::mt19937_64* rng_;
  int features_per_split_;
};

std::size_t argmax(const std::vector<double>& v) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (v[i] > v[best]) best = i;
  }
  return best;
}

template <typename Fn>
void parallel_for(std::size_t count, Fn&& fn) {
  const std::size_t workers =
      std::min<std::size_t>(count, std::max(1u, std::thread::hardware_concurrency()));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (std::size_t t = 0; t < workers; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) fn(i);
    });
  }
}

std::mt19937_64 seeded(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream),
                    static_cast<std::uint32_t>(stream >> 32)};
  return std::mt19937_64(seq);
}

void check_target_trainable(std::span<const LabeledInstance> data,
                            const PredictionTarget& target) {
  if (data.empty()) {
    throw Error(ErrorCode::InvalidArgument, "cannot train on an empty dataset");
  }
  if (target.classes.empty()) {
    throw Error(ErrorCode::InvalidArgument, "prediction target has no classes");
  }
}

}  // namespace

const TreeNode& TreeModel::leaf_for(const FeatureVector& x) const {
  if (nodes.empty()) throw Error(ErrorCode::InvalidArgument, "empty tree");
  const TreeNode* node = &nodes.front();
  while (!node->is_leaf()) {
    const auto f = static_cast<std::size_t>(node->feature);
    node = &nodes[static_cast<std::size_t>(x[f] <= node->threshold ? node->left
                                                                   : node->right)];
  }
  return *node;
}

int TreeModel::depth() const {
  if (nodes.empty()) return 0;
  int deepest = 0;
  std::vector<std::pair<int, int>> stack{{0, 0}};
  while (!stack.empty()) {
    const auto [id, d] = stack.back();
    stack.pop_back();
    deepest = std::max(deepest, d);
    const TreeNode& n = nodes[static_cast<std::size_t>(id)];
    if (!n.is_leaf()) {
      stack.emplace_back(n.left, d + 1);
      stack.emplace_back(n.right, d + 1);
    }
  }
  return deepest;
}

Prediction predict(const TreeModel& model, const FeatureVector& x) {
  const TreeNode& leaf = model.leaf_for(x);
  const double total = std::accumulate(leaf.counts.begin(), leaf.counts.end(), 0.0);
  Prediction p;
  p.distribution.resize(leaf.counts.size());
  for (std::size_t i = 0; i < leaf.counts.size(); ++i) {
    p.distribution[i] = leaf.counts[i] / total;
  }
  p.label = model.target.classes[argmax(p.distribution)];
  return p;
}

Prediction predict(const ForestModel& model, const FeatureVector& x) {
  if (model.trees.empty()) throw Error(ErrorCode::InvalidArgument, "empty forest");
  std::vector<double> votes(model.target.classes.size(), 0.0);
  for (const TreeModel& tree : model.trees) {
    votes[argmax(tree.leaf_for(x).counts)] += 1.0;
  }
  Prediction p;
  const auto n = static_cast<double>(model.trees.size());
  for (double& v : votes) v /= n;
  p.distribution = std::move(votes);
  p.label = model.target.classes[argmax(p.distribution)];
  return p;
}

Prediction predict(const Model& model, const FeatureVector& x) {
  return std::visit([&](const auto& m) { return predict(m, x); }, model);
}

const PredictionTarget& target_of(const Model& model) {
  return std::visit(
      [](const auto& m) -> const PredictionTarget& { return m.target; }, model);
}

std::vector<LabeledInstance> balance_dataset(std::span<const LabeledInstance> data,
                                             const PredictionTarget& target,
                                             std::uint64_t seed) {
  std::vector<std::vector<std::size_t>> by_class(target.classes.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    by_class[target.class_index(data[i].label)].push_back(i);
  }
  std::size_t majority = 0;
  for (std::size_t c = 0; c < by_class.size(); ++c) {
    if (by_class[c].empty()) {
      throw Error(ErrorCode::EmptyClass,
                  "class '" + target.classes[c] + "' has no instances");
    }
    majority = std::max(majority, by_class[c].size());
  }

  std::vector<LabeledInstance> out(data.begin(), data.end());
  auto rng = seeded(seed, 0x62616c616e6365ULL);
  for (auto& members : by_class) {
    // The shuffle runs for every class so each class's start order does not
    // depend on whether earlier classes needed padding.
    std::vector<std::size_t> order = members;
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t i = 0; members.size() + i < majority; ++i) {
      out.push_back(data[order[i % order.size()]]);
    }
  }
  return out;
}

int FoldAssignment::fold(const LabeledInstance& x) const {
  const auto it = fold_of.find(x.origin_id);
  if (it == fold_of.end()) {
    throw Error(ErrorCode::UnknownId,
                "origin '" + x.origin_id + "' has no fold assignment");
  }
  return it->second;
}

std::vector<std::size_t> FoldAssignment::group_counts() const {
  std::vector<std::size_t> counts(static_cast<std::size_t>(std::max(k, 0)), 0);
  for (const auto& [origin, f] : fold_of) ++counts[static_cast<std::size_t>(f)];
  return counts;
}

FoldAssignment make_folds(std::span<const LabeledInstance> data, int k,
                          std::uint64_t seed) {
  if (k < 2) throw Error(ErrorCode::InvalidArgument, "k must be at least 2");

  std::map<Id, std::string> label_of;
  std::vector<Id> first_seen;
  for (const auto& x : data) {
    const auto [it, inserted] = label_of.emplace(x.origin_id, x.label);
    if (inserted) {
      first_seen.push_back(x.origin_id);
    } else if (it->second != x.label) {
      throw Error(ErrorCode::InvalidArgument,
                  "origin '" + x.origin_id + "' carries two labels");
    }
  }
  if (first_seen.size() < static_cast<std::size_t>(k)) {
    throw Error(ErrorCode::TooFewGroups,
                std::to_string(first_seen.size()) + " origin groups for " +
                    std::to_string(k) + " folds");
  }

  std::map<std::string, std::vector<Id>> by_label;
  for (const auto& origin : first_seen) by_label[label_of[origin]].push_back(origin);

  auto rng = seeded(seed, 0x666f6c6473ULL);
  FoldAssignment folds;
  folds.k = k;
  std::size_t dealt = 0;
  for (auto& [label, origins] : by_label) {
    std::shuffle(origins.begin(), origins.end(), rng);
    for (const auto& origin : origins) {
      folds.fold_of[origin] = static_cast<int>(dealt++ % static_cast<std::size_t>(k));
    }
  }
  return folds;
}

TreeModel train_tree(std::span<const LabeledInstance> data,
                     const PredictionTarget& target, const TreeParams& params) {
  check_target_trainable(data, target);
  const Dataset d = to_dataset(data, target);
  std::vector<int> samples(data.size());
  std::iota(samples.begin(), samples.end(), 0);
  TreeGrower grower(d, params, nullptr, FeatureVector::kSize);
  return TreeModel{target, params, grower.grow(std::move(samples))};
}

ForestModel train_forest(std::span<const LabeledInstance> data,
                         const PredictionTarget& target, const ForestParams& params) {
  check_target_trainable(data, target);
  if (params.tree_count < 1) {
    throw Error(ErrorCode::InvalidParams, "tree_count must be at least 1");
  }
  if (params.features_per_split < 1 ||
      params.features_per_split > static_cast<int>(FeatureVector::kSize)) {
    throw Error(ErrorCode::InvalidParams, "features_per_split must be in 1..7");
  }
  const Dataset d = to_dataset(data, target);
  ForestModel forest{target, params, {}};
  forest.trees.resize(static_cast<std::size_t>(params.tree_count));
  parallel_for(forest.trees.size(), [&](std::size_t t) {
    auto rng = seeded(params.seed, t);
    std::vector<int> samples(data.size());
    if (params.bootstrap) {
      std::uniform_int_distribution<int> pick(0, static_cast<int>(data.size()) - 1);
      for (int& s : samples) s = pick(rng);
    } else {
      std::iota(samples.begin(), samples.end(), 0);
    }
    TreeGrower grower(d, params.tree, &rng, params.features_per_split);
    forest.trees[t] = TreeModel{target, params.tree, grower.grow(std::move(samples))};
  });
  return forest;
}

Model train_model(std::span<const LabeledInstance> data,
                  const PredictionTarget& target, Algorithm algo,
                  const LearnerConfig& config, std::uint64_t seed) {
  if (algo == Algorithm::Tree) return train_tree(data, target, config.tree);
  ForestParams params = config.forest;
  params.seed = seed;
  return train_forest(data, target, params);
}

EvaluationReport cross_validate(std::span<const LabeledInstance> data,
                                const PredictionTarget& target, Algorithm algo,
                                int k, std::uint64_t seed,
                                const LearnerConfig& config) {
  EvaluationReport report;
  report.target = target.name;
  report.algorithm = algo;
  report.k = k;
  report.seed = seed;
  report.config = config;
  report.original_instances = data.size();

  const auto balanced = balance_dataset(data, target, seed);
  report.balanced_instances = balanced.size();
  const FoldAssignment folds = make_folds(balanced, k, seed);
  const auto group_counts = folds.group_counts();

  std::vector<std::pair<std::string, std::string>> pairs;
  pairs.reserve(data.size());
  for (int f = 0; f < k; ++f) {
    std::vector<LabeledInstance> train;
    std::set<Id> train_origins;
    for (const auto& x : balanced) {
      if (folds.fold(x) != f) {
        train.push_back(x);
        train_origins.insert(x.origin_id);
      }
    }
    FoldStats stats;
    stats.groups = group_counts[static_cast<std::size_t>(f)];
    stats.train_instances = train.size();

    const Model model =
        train_model(train, target, algo, config,
                    seed * 1000003ULL + static_cast<std::uint64_t>(f));
    for (const auto& x : data) {
      if (folds.fold(x) != f) continue;
      if (train_origins.contains(x.origin_id)) ++report.grouping_violations;
      ++stats.test_instances;
      pairs.emplace_back(x.label, predict(model, x.features).label);
    }
    report.folds.push_back(stats);
  }

  report.matrix = confusion_matrix(pairs, target.classes);
  report.metrics = class_metrics(report.matrix);
  report.notes = {
      "minority classes duplicated up to the majority count before fold "
      "assignment",
      "folds assigned per origin group, stratified by origin label",
      "each fold is tested on its original (non-duplicated) instances"};
  return report;
}

namespace {

nlohmann::ordered_json params_json(const EvaluationReport& r) {
  nlohmann::ordered_json j;
  if (r.algorithm == Algorithm::Tree) {
    j["max_depth"] = r.config.tree.max_depth;
    j["min_leaf_size"] = r.config.tree.min_leaf_size;
  } else {
    j["tree_count"] = r.config.forest.tree_count;
    j["features_per_split"] = r.config.forest.features_per_split;
    j["bootstrap"] = r.config.forest.bootstrap;
    j["max_depth"] = r.config.forest.tree.max_depth;
    j["min_leaf_size"] = r.config.forest.tree.min_leaf_size;
  }
  return j;
}

}  // namespace

std::string format_report(const EvaluationReport& r) {
  std::ostringstream os;
  os << "target: " << to_string(r.target) << "  algorithm: " << to_string(r.algorithm)
     << "  k: " << r.k << "  seed: " << r.seed << '\n';
  os << "params: " << params_json(r).dump() << '\n';
  os << "instances: " << r.original_instances << " original, "
     << r.balanced_instances << " after balancing\n";
  os << "fold groups:";
  for (const auto& f : r.folds) os << ' ' << f.groups;
  os << "\ngrouping violations: " << r.grouping_violations << "\n\n";
  os << format_confusion_matrix(r.matrix) << '\n';
  os << format_class_metrics(r.metrics);
  for (const auto& n : r.notes) os << "note: " << n << '\n';
  return os.str();
}

nlohmann::ordered_json to_json(const EvaluationReport& r) {
  nlohmann::ordered_json j;
  j["target"] = to_string(r.target);
  j["algorithm"] = to_string(r.algorithm);
  j["k"] = r.k;
  j["seed"] = r.seed;
  j["params"] = params_json(r);
  j["original_instances"] = r.original_instances;
  j["balanced_instances"] = r.balanced_instances;
  auto folds = nlohmann::ordered_json::array();
  for (const auto& f : r.folds) {
    folds.push_back({{"groups", f.groups},
                     {"train_instances", f.train_instances},
                     {"test_instances", f.test_instances}});
  }
  j["folds"] = std::move(folds);
  j["grouping_violations"] = r.grouping_violations;
  j["confusion_matrix"] = to_json(r.matrix);
  j["metrics"] = to_json(r.metrics);
  j["notes"] = r.notes;
  return j;
}

namespace {

using ojson = nlohmann::ordered_json;
constexpr int kModelVersion = 1;

ojson tree_params_json(const TreeParams& p) {
  return {{"max_depth", p.max_depth}, {"min_leaf_size", p.min_leaf_size}};
}

TreeParams tree_params_from(const ojson& j) {
  return {j.at("max_depth").get<int>(), j.at("min_leaf_size").get<int>()};
}

ojson nodes_json(const TreeModel& t) {
  auto nodes = ojson::array();
  for (const auto& n : t.nodes) {
    nodes.push_back({n.feature, n.threshold, n.left, n.right, n.counts});
  }
  return nodes;
}

std::vector<TreeNode> nodes_from(const ojson& j, std::size_t class_count) {
  std::vector<TreeNode> nodes;
  for (const auto& n : j) {
    TreeNode node{n.at(0).get<int>(), n.at(1).get<double>(), n.at(2).get<int>(),
                  n.at(3).get<int>(), n.at(4).get<std::vector<double>>()};
    if (node.counts.size() != class_count) {
      throw Error(ErrorCode::ParseError, "node class counts do not match target");
    }
    nodes.push_back(std::move(node));
  }
  const auto n = static_cast<int>(nodes.size());
  for (const auto& node : nodes) {
    if (!node.is_leaf() && (node.left <= 0 || node.left >= n || node.right <= 0 ||
                            node.right >= n ||
                            node.feature >= static_cast<int>(FeatureVector::kSize))) {
      throw Error(ErrorCode::ParseError, "malformed tree node");
    }
  }
  if (nodes.empty()) throw Error(ErrorCode::ParseError, "tree has no nodes");
  return nodes;
}

}  // namespace

std::string serialize_model(const Model& model) {
  ojson j;
  j["format"] = "friendaudit-model";
  j["version"] = kModelVersion;
  const PredictionTarget& target = target_of(model);
  j["target"] = to_string(target.name);
  j["classes"] = target.classes;
  if (const auto* tree = std::get_if<TreeModel>(&model)) {
    j["kind"] = "tree";
    j["params"] = tree_params_json(tree->params);
    j["nodes"] = nodes_json(*tree);
  } else {
    const auto& forest = std::get<ForestModel>(model);
    j["kind"] = "forest";
    j["params"] = {{"tree_count", forest.params.tree_count},
                   {"features_per_split", forest.params.features_per_split},
                   {"seed", forest.params.seed},
                   {"bootstrap", forest.params.bootstrap},
                   {"tree", tree_params_json(forest.params.tree)}};
    auto trees = ojson::array();
    for (const auto& t : forest.trees) trees.push_back(nodes_json(t));
    j["trees"] = std::move(trees);
  }
  return j.dump() + "\n";
}

Model parse_model(std::string_view text) {
  try {
    const ojson j = ojson::parse(text);
    if (j.at("format").get<std::string>() != "friendaudit-model") {
      throw Error(ErrorCode::ParseError, "not a friendaudit model document");
    }
    if (j.at("version").get<int>() != kModelVersion) {
      throw Error(ErrorCode::ParseError, "unsupported model version");
    }
    PredictionTarget target{parse_target_name(j.at("target").get<std::string>()),
                            j.at("classes").get<std::vector<std::string>>()};
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "tree") {
      return TreeModel{target, tree_params_from(j.at("params")),
                       nodes_from(j.at("nodes"), target.classes.size())};
    }
    if (kind == "forest") {
      const auto& p = j.at("params");
      ForestParams params{p.at("tree_count").get<int>(),
                          p.at("features_per_split").get<int>(),
                          p.at("seed").get<std::uint64_t>(),
                          p.at("bootstrap").get<bool>(),
                          tree_params_from(p.at("tree"))};
      ForestModel forest{target, params, {}};
      for (const auto& t : j.at("trees")) {
        forest.trees.push_back(
            TreeModel{target, params.tree, nodes_from(t, target.classes.size())});
      }
      if (forest.trees.empty()) throw Error(ErrorCode::ParseError, "forest has no trees");
      return forest;
    }
    throw Error(ErrorCode::ParseError, "unknown model kind '" + kind + "'");
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("model document: ") + e.what());
  }
}

}  // namespace friendaudit
