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

#ifndef FRIENDAUDIT_FEATURES_HPP
#define FRIENDAUDIT_FEATURES_HPP

/** @file features.hpp Social snapshots and mutual-activity features.
 *
 * Snapshot files are line-delimited JSON. Each line is one record tagged by
 * `kind`:
 *
 *     {"kind":"user","id":"u1","current_city":"Miami","hometown":null,
 *      "schools":["FIU"],"employers":[],"friend_ids":["u2"]}
 *     {"kind":"post","post_id":"p1","author_id":"u1","commenter_ids":["u2"]}
 *     {"kind":"photo","photo_id":"ph1","tagged_ids":["u1","u2"]}
 *
 * Identifiers are opaque strings. Friendship must be listed on both sides.
 **/

#include <array>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "friendaudit/error.hpp"

namespace friendaudit {

using Id = std::string;

struct UserProfile {
  Id id;
  std::optional<std::string> current_city;
  std::optional<std::string> hometown;
  std::set<std::string> schools;
  std::set<std::string> employers;
  std::set<Id> friend_ids;

  friend bool operator==(const UserProfile&, const UserProfile&) = default;
};

/// A story and the set of users who commented on it. The author may appear
/// among the commenters.
struct PostRecord {
  Id post_id;
  Id author_id;
  std::set<Id> commenter_ids;

  friend bool operator==(const PostRecord&, const PostRecord&) = default;
};

struct PhotoRecord {
  Id photo_id;
  std::set<Id> tagged_ids;

  friend bool operator==(const PhotoRecord&, const PhotoRecord&) = default;
};

/// An immutable, integrity-checked social graph snapshot.
class SocialSnapshot {
 public:
  SocialSnapshot() = default;

  /// Checks every invariant and throws IntegrityError on the first violation:
  /// duplicate ids, dangling references, self-friendship, asymmetric
  /// friendship, or a photo with no tags.
  SocialSnapshot(std::vector<UserProfile> users, std::vector<PostRecord> posts,
                 std::vector<PhotoRecord> photos);

  using UserMap = std::map<Id, UserProfile, std::less<>>;

  [[nodiscard]] const UserMap& users() const noexcept {
    return users_;
  }
  [[nodiscard]] const std::vector<PostRecord>& posts() const noexcept {
    return posts_;
  }
  [[nodiscard]] const std::vector<PhotoRecord>& photos() const noexcept {
    return photos_;
  }

  [[nodiscard]] bool contains(std::string_view id) const;
  /// Throws UnknownId.
  [[nodiscard]] const UserProfile& user(std::string_view id) const;
  [[nodiscard]] bool are_friends(std::string_view a, std::string_view b) const;

  /// Indices into posts() authored by `id`.
  [[nodiscard]] const std::vector<std::size_t>& posts_by(std::string_view id) const;
  /// Indices into photos() tagging `id`.
  [[nodiscard]] const std::vector<std::size_t>& photos_of(std::string_view id) const;

 private:
  UserMap users_;
  std::vector<PostRecord> posts_;
  std::vector<PhotoRecord> photos_;
  std::map<Id, std::vector<std::size_t>, std::less<>> posts_by_author_;
  std::map<Id, std::vector<std::size_t>, std::less<>> photos_by_tag_;
};

SocialSnapshot load_snapshot(std::istream& in);
void write_snapshot(std::ostream& out, const SocialSnapshot& snapshot);

struct FeatureVector {
  std::uint32_t mutual_post_count = 0;
  std::uint32_t common_photo_count = 0;
  std::uint32_t mutual_friend_count = 0;
  bool same_current_city = false;
  bool same_hometown = false;
  std::uint32_t common_study_count = 0;
  std::uint32_t common_work_count = 0;

  static constexpr std::size_t kSize = 7;

  /// Feature i as a real number; booleans map to 0/1.
  [[nodiscard]] double operator[](std::size_t i) const;

  friend bool operator==(const FeatureVector&, const FeatureVector&) = default;
};

inline constexpr std::array<std::string_view, FeatureVector::kSize>
    kFeatureNames{"mutual_post_count",   "common_photo_count",
                  "mutual_friend_count", "same_current_city",
                  "same_hometown",       "common_study_count",
                  "common_work_count"};

/// True for the two boolean features.
constexpr bool is_boolean_feature(std::size_t i) noexcept {
  return i == 3 || i == 4;
}

using FeatureRow = Eigen::Matrix<double, 1, 7>;

FeatureRow to_row(const FeatureVector& features);

/// The seven mutual-activity features of a friend pair. Symmetric in its two
/// id arguments. Throws UnknownId or NotFriends.
FeatureVector compute_features(const SocialSnapshot& snapshot,
                               std::string_view user, std::string_view friend_id);

/// Trim plus case-fold; the comparison key for city and hometown.
std::string place_key(std::string_view place);

}  // namespace friendaudit

#endif  // FRIENDAUDIT_FEATURES_HPP
