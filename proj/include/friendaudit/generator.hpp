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

#ifndef FRIENDAUDIT_GENERATOR_HPP
#define FRIENDAUDIT_GENERATOR_HPP

/** @file generator.hpp Seeded synthetic populations with known answers.
 *
 * Users live in communities. Every friendship gets a latent tie strength in
 * [0, 1]: strangers sit near zero, ties inside a community run high and ties
 * across communities run low. Comments and joint photos are drawn from the
 * tie strength; places, schools and employers come from per-community pools.
 *
 * Answers to Q1 and Q2 are threshold functions of two activity scores
 * computed from the features, optionally blurred by `answer_noise`. With
 * zero noise they are exact functions of the feature vector:
 *
 *   online  = mutual_post_count
 *   offline = 2 * common_photo_count
 *             + (online + common_photo_count > 0
 *                    ? same_current_city + same_hometown
 *                      + common_study_count + common_work_count
 *                    : 0)
 *
 * Q3..Q5 are Agree with a probability that grows as the tie weakens, so they
 * are only loosely tied to the features. The true decision follows the rule
 * table verdict on the true answers and the per-action acceptance rates.
 *
 * Every number here is made up for testing; none of it describes real users.
 **/

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "friendaudit/domain.hpp"
#include "friendaudit/features.hpp"
#include "friendaudit/learning.hpp"
#include "friendaudit/quality.hpp"

namespace friendaudit {

struct GeneratorParams {
  int user_count = 57;
  int min_friends = 20;  ///< target degree range, inclusive
  int max_friends = 31;
  std::uint64_t seed = 0;
  int community_count = 6;
  /// Chance that a new friendship is drawn inside the user's community.
  double within_community = 0.6;
  /// Chance that a friendship is a stranger tie (strength below 0.12).
  double stranger_share = 0.1;
  /// Replaces every drawn tie strength when set.
  std::optional<double> forced_tie_strength;
  /// Standard deviation of the Gaussian blur on the two activity scores.
  double answer_noise = 0.0;
  /// Agree probability for Q3..Q5 is base + slope * (1 - tie strength).
  std::array<double, 3> abuse_base{0.06, 0.06, 0.08};
  std::array<double, 3> abuse_slope{0.12, 0.12, 0.12};
  /// Acceptance probability per suggested action, indexed by Action
  /// (the Nop slot is unused).
  std::array<double, 5> acceptance{0.35, 0.9, 0.9, 0.95, 0.0};
  /// Share of accepted stranger suggestions that pick sandbox over unfriend.
  double sandbox_share = 0.6;
  /// Rule table mode used for the true decisions.
  bool sandbox_enabled = true;

  /// Throws InvalidParams.
  void validate() const;
};

nlohmann::ordered_json to_json(const GeneratorParams& params);
GeneratorParams generator_params_from_json(const nlohmann::ordered_json& j);

/// Ground truth for the directed pair (user, friend): the user's answers and
/// decision about that friend.
struct PairTruth {
  Id user;
  Id friend_id;
  double tie_strength = 0;
  ResponseSet responses;
  Decision decision = Decision::ignore(IgnoreReason::SuggestionMakesNoSense);

  friend bool operator==(const PairTruth&, const PairTruth&) = default;
};

struct GroundTruth {
  std::vector<PairTruth> pairs;  ///< sorted by (user, friend)

  /// nullptr if the pair is unknown.
  [[nodiscard]] const PairTruth* find(std::string_view user,
                                      std::string_view friend_id) const;
};

struct Population {
  SocialSnapshot snapshot;
  GroundTruth truth;
};

/// Deterministic in `params`. Throws InvalidParams.
Population generate_population(const GeneratorParams& params);

/// The two activity scores behind Q1 and Q2, and the noise-free answers.
double online_score(const FeatureVector& f);
double offline_score(const FeatureVector& f);
FrequencyAnswer frequency_from_score(double online_or_offline, bool offline);

// Sidecar file, one JSON object per line.
void write_ground_truth(std::ostream& out, const GroundTruth& truth);
GroundTruth load_ground_truth(std::istream& in);

/// One instance per ground-truth pair, labeled for `target`, with origin id
/// "<user>|<friend>". Throws UnknownId / NotFriends if the truth does not fit
/// the snapshot.
std::vector<LabeledInstance> make_instances(const SocialSnapshot& snapshot,
                                            const GroundTruth& truth,
                                            TargetName target);

struct ParticipantBatch {
  std::vector<ParticipantRecord> records;
  std::vector<bool> violating;  ///< parallel to records
};

/// `count` screening records of which exactly `violations` fail at least one
/// check under `config`. Each violating record fails a random non-empty
/// subset of the three checks. Throws InvalidParams.
ParticipantBatch generate_participants(int count, int violations, std::uint64_t seed,
                                       const QualityConfig& config);

/// Bivariate standard-normal sample with correlation `rho`.
std::pair<std::vector<double>, std::vector<double>> correlated_sample(
    std::size_t n, double rho, std::uint64_t seed);

}  // namespace friendaudit

#endif  // FRIENDAUDIT_GENERATOR_HPP
