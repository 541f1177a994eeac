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

#include "friendaudit/features.hpp"

#include <algorithm>
#include <cctype>
#include <istream>
#include <iterator>
#include <ostream>

#include <json.hpp>

namespace friendaudit {

namespace {

using json = nlohmann::ordered_json;

[[noreturn]] void integrity(const std::string& what) {
  throw Error(ErrorCode::IntegrityError, what);
}

const std::vector<std::size_t> kNoIndices;

template <typename Set>
std::uint32_t intersection_size(const Set& a, const Set& b) {
  std::uint32_t n = 0;
  auto ia = a.begin();
  auto ib = b.begin();
  while (ia != a.end() && ib != b.end()) {
    if (*ia < *ib) {
      ++ia;
    } else if (*ib < *ia) {
      ++ib;
    } else {
      ++n;
      ++ia;
      ++ib;
    }
  }
  return n;
}

bool same_place(const std::optional<std::string>& a,
                const std::optional<std::string>& b) {
  if (!a || !b) return false;
  const std::string ka = place_key(*a);
  return !ka.empty() && ka == place_key(*b);
}

}  // namespace

SocialSnapshot::SocialSnapshot(std::vector<UserProfile> users,
                               std::vector<PostRecord> posts,
                               std::vector<PhotoRecord> photos)
    : posts_(std::move(posts)), photos_(std::move(photos)) {
  for (auto& u : users) {
    const Id id = u.id;
    if (!users_.emplace(id, std::move(u)).second) {
      integrity("duplicate user id '" + id + "'");
    }
  }
  for (const auto& [id, u] : users_) {
    if (u.friend_ids.contains(id)) integrity("user '" + id + "' befriends itself");
    for (const auto& f : u.friend_ids) {
      const auto it = users_.find(f);
      if (it == users_.end()) {
        integrity("user '" + id + "' lists unknown friend '" + f + "'");
      }
      if (!it->second.friend_ids.contains(id)) {
        integrity("friendship '" + id + "' -> '" + f + "' is not symmetric");
      }
    }
  }

  std::set<Id, std::less<>> post_ids;
  for (std::size_t i = 0; i < posts_.size(); ++i) {
    const auto& p = posts_[i];
    if (!post_ids.insert(p.post_id).second) {
      integrity("duplicate post id '" + p.post_id + "'");
    }
    if (!users_.contains(p.author_id)) {
      integrity("post '" + p.post_id + "' has unknown author '" + p.author_id +
                "'");
    }
    for (const auto& c : p.commenter_ids) {
      if (!users_.contains(c)) {
        integrity("post '" + p.post_id + "' has unknown commenter '" + c + "'");
      }
    }
    posts_by_author_[p.author_id].push_back(i);
  }

  std::set<Id, std::less<>> photo_ids;
  for (std::size_t i = 0; i < photos_.size(); ++i) {
    const auto& ph = photos_[i];
    if (!photo_ids.insert(ph.photo_id).second) {
      integrity("duplicate photo id '" + ph.photo_id + "'");
    }
    if (ph.tagged_ids.empty()) integrity("photo '" + ph.photo_id + "' has no tags");
    for (const auto& t : ph.tagged_ids) {
      if (!users_.contains(t)) {
        integrity("photo '" + ph.photo_id + "' tags unknown user '" + t + "'");
      }
      photos_by_tag_[t].push_back(i);
    }
  }
}

bool SocialSnapshot::contains(std::string_view id) const {
  return users_.find(id) != users_.end();
}

const UserProfile& SocialSnapshot::user(std::string_view id) const {
  const auto it = users_.find(id);
  if (it == users_.end()) {
    throw Error(ErrorCode::UnknownId, "unknown user '" + std::string(id) + "'");
  }
  return it->second;
}

bool SocialSnapshot::are_friends(std::string_view a, std::string_view b) const {
  const auto it = users_.find(a);
  return it != users_.end() && it->second.friend_ids.contains(std::string(b));
}

const std::vector<std::size_t>& SocialSnapshot::posts_by(std::string_view id) const {
  const auto it = posts_by_author_.find(id);
  return it == posts_by_author_.end() ? kNoIndices : it->second;
}

const std::vector<std::size_t>& SocialSnapshot::photos_of(std::string_view id) const {
  const auto it = photos_by_tag_.find(id);
  return it == photos_by_tag_.end() ? kNoIndices : it->second;
}

SocialSnapshot load_snapshot(std::istream& in) {
  std::vector<UserProfile> users;
  std::vector<PostRecord> posts;
  std::vector<PhotoRecord> photos;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto fail = [&](const std::string& what) {
      return Error(ErrorCode::ParseError,
                   "snapshot line " + std::to_string(line_no) + ": " + what);
    };
    try {
      const json rec = json::parse(line);
      if (!rec.is_object()) throw fail("record is not an object");
      const std::string kind = rec.at("kind").get<std::string>();
      const auto opt_string = [&](const char* key) -> std::optional<std::string> {
        if (!rec.contains(key) || rec.at(key).is_null()) return std::nullopt;
        return rec.at(key).get<std::string>();
      };
      const auto string_set = [&](const char* key) {
        std::set<std::string> out;
        if (rec.contains(key)) {
          for (const auto& v : rec.at(key)) out.insert(v.get<std::string>());
        }
        return out;
      };
      if (kind == "user") {
        users.push_back(UserProfile{rec.at("id").get<std::string>(),
                                    opt_string("current_city"),
                                    opt_string("hometown"), string_set("schools"),
                                    string_set("employers"),
                                    string_set("friend_ids")});
      } else if (kind == "post") {
        posts.push_back(PostRecord{rec.at("post_id").get<std::string>(),
                                   rec.at("author_id").get<std::string>(),
                                   string_set("commenter_ids")});
      } else if (kind == "photo") {
        photos.push_back(PhotoRecord{rec.at("photo_id").get<std::string>(),
                                     string_set("tagged_ids")});
      } else {
        throw fail("unknown record kind '" + kind + "'");
      }
    } catch (const json::exception& e) {
      throw fail(e.what());
    }
  }
  return SocialSnapshot(std::move(users), std::move(posts), std::move(photos));
}

void write_snapshot(std::ostream& out, const SocialSnapshot& snapshot) {
  const auto opt = [](const std::optional<std::string>& v) {
    return v ? json(*v) : json(nullptr);
  };
  for (const auto& [id, u] : snapshot.users()) {
    json rec;
    rec["kind"] = "user";
    rec["id"] = id;
    rec["current_city"] = opt(u.current_city);
    rec["hometown"] = opt(u.hometown);
    rec["schools"] = u.schools;
    rec["employers"] = u.employers;
    rec["friend_ids"] = u.friend_ids;
    out << rec.dump() << '\n';
  }
  for (const auto& p : snapshot.posts()) {
    json rec;
    rec["kind"] = "post";
    rec["post_id"] = p.post_id;
    rec["author_id"] = p.author_id;
    rec["commenter_ids"] = p.commenter_ids;
    out << rec.dump() << '\n';
  }
  for (const auto& ph : snapshot.photos()) {
    json rec;
    rec["kind"] = "photo";
    rec["photo_id"] = ph.photo_id;
    rec["tagged_ids"] = ph.tagged_ids;
    out << rec.dump() << '\n';
  }
}

double FeatureVector::operator[](std::size_t i) const {
  switch (i) {
    case 0: return mutual_post_count;
    case 1: return common_photo_count;
    case 2: return mutual_friend_count;
    case 3: return same_current_city ? 1.0 : 0.0;
    case 4: return same_hometown ? 1.0 : 0.0;
    case 5: return common_study_count;
    case 6: return common_work_count;
    default:
      throw Error(ErrorCode::InvalidArgument,
                  "feature index out of range: " + std::to_string(i));
  }
}

FeatureRow to_row(const FeatureVector& features) {
  FeatureRow row;
  for (std::size_t i = 0; i < FeatureVector::kSize; ++i) {
    row(0, static_cast<Eigen::Index>(i)) = features[i];
  }
  return row;
}

std::string place_key(std::string_view place) {
  const auto first = place.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = place.find_last_not_of(" \t\r\n");
  std::string key;
  for (char c : place.substr(first, last - first + 1)) {
    key.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  return key;
}

FeatureVector compute_features(const SocialSnapshot& snapshot,
                               std::string_view user, std::string_view friend_id) {
  const UserProfile& u = snapshot.user(user);
  const UserProfile& f = snapshot.user(friend_id);
  if (!u.friend_ids.contains(f.id)) {
    throw Error(ErrorCode::NotFriends,
                "'" + u.id + "' and '" + f.id + "' are not friends");
  }

  FeatureVector fv;
  const auto count_commented = [&](const UserProfile& author,
                                   const UserProfile& other) {
    std::uint32_t n = 0;
    for (std::size_t i : snapshot.posts_by(author.id)) {
      if (snapshot.posts()[i].commenter_ids.contains(other.id)) ++n;
    }
    return n;
  };
  fv.mutual_post_count = count_commented(u, f) + count_commented(f, u);

  for (std::size_t i : snapshot.photos_of(u.id)) {
    if (snapshot.photos()[i].tagged_ids.contains(f.id)) ++fv.common_photo_count;
  }

  // Neither member of the pair can be in both friend sets (no self-friendship),
  // so the plain intersection already excludes them.
  fv.mutual_friend_count = intersection_size(u.friend_ids, f.friend_ids);
  fv.same_current_city = same_place(u.current_city, f.current_city);
  fv.same_hometown = same_place(u.hometown, f.hometown);
  fv.common_study_count = intersection_size(u.schools, f.schools);
  fv.common_work_count = intersection_size(u.employers, f.employers);
  return fv;
}

}  // namespace friendaudit
