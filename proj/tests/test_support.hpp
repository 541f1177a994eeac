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

// Test-side oracles and hand-rolled generators. Nothing here calls into the
// code under test except for the plain data types it fills in.

#ifndef FRIENDAUDIT_TESTS_TEST_SUPPORT_HPP
#define FRIENDAUDIT_TESTS_TEST_SUPPORT_HPP

#include <algorithm>
#include <array>
#include <cctype>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "friendaudit/domain.hpp"
#include "friendaudit/features.hpp"

namespace friendaudit::testing {

inline std::filesystem::path fixture(const std::string& name) {
  return std::filesystem::path(FRIENDAUDIT_TEST_FIXTURES) / name;
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Rule oracle. Each row is five slot strings and an action; a slot is "*",
// an answer code, or "!" plus a code. Codes: N = Never, A = Agree.
struct OracleRow {
  std::array<const char*, 5> slots;
  Action action;
};

inline const std::vector<OracleRow>& oracle_rows() {
  static const std::vector<OracleRow> rows{
      {{"N", "N", "!A", "!A", "!A"}, Action::UnfriendOrSandbox},
      {{"N", "N", "*", "*", "*"}, Action::Unfriend},
      {{"N", "!N", "A", "A", "A"}, Action::Unfriend},
      {{"!N", "N", "A", "A", "A"}, Action::Unfriend},
      {{"N", "!N", "A", "!A", "A"}, Action::Unfriend},
      {{"N", "!N", "!A", "A", "A"}, Action::Unfriend},
      {{"!N", "N", "A", "!A", "A"}, Action::Unfriend},
      {{"!N", "N", "!A", "A", "A"}, Action::Unfriend},
      {{"!N", "!N", "A", "A", "A"}, Action::Unfriend},
      {{"!N", "!N", "A", "!A", "A"}, Action::Unfriend},
      {{"!N", "!N", "!A", "A", "A"}, Action::Unfriend},
      {{"!N", "!N", "A", "A", "!A"}, Action::Restrict},
      {{"!N", "!N", "A", "!A", "!A"}, Action::Restrict},
      {{"!N", "!N", "!A", "A", "!A"}, Action::Restrict},
      {{"!N", "!N", "!A", "!A", "A"}, Action::Unfollow},
      {{"*", "*", "*", "*", "*"}, Action::Nop},
  };
  return rows;
}

/// (action, 1-based rule) by a linear scan over the rows above.
inline std::pair<Action, int> oracle_infer(const ResponseSet& r, bool sandbox) {
  const std::array<bool, 5> hit{r.q1 == FrequencyAnswer::Never,
                                r.q2 == FrequencyAnswer::Never,
                                r.q3 == AgreementAnswer::Agree,
                                r.q4 == AgreementAnswer::Agree,
                                r.q5 == AgreementAnswer::Agree};
  const auto& rows = oracle_rows();
  for (std::size_t i = 0; i < rows.size(); ++i) {
    bool ok = true;
    for (int q = 0; q < 5 && ok; ++q) {
      const std::string slot = rows[i].slots[q];
      if (slot == "*") continue;
      ok = slot[0] == '!' ? !hit[q] : hit[q];
    }
    if (ok) {
      Action a = rows[i].action;
      if (a == Action::UnfriendOrSandbox && !sandbox) a = Action::Unfriend;
      return {a, static_cast<int>(i) + 1};
    }
  }
  return {Action::Nop, 0};
}

/// Every response set, by five nested loops.
inline std::vector<ResponseSet> oracle_tuples() {
  std::vector<ResponseSet> out;
  for (auto a : kFrequencyAnswers)
    for (auto b : kFrequencyAnswers)
      for (auto c : kAgreementAnswers)
        for (auto d : kAgreementAnswers)
          for (auto e : kAgreementAnswers) out.push_back({a, b, c, d, e});
  return out;
}

inline std::string fold_place(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  std::string out;
  for (std::size_t i = b; i < e; ++i) {
    out += static_cast<char>(std::tolower(static_cast<unsigned char>(s[i])));
  }
  return out;
}

template <class Set>
std::uint32_t count_shared(const Set& a, const Set& b) {
  std::uint32_t n = 0;
  for (const auto& x : a) {
    for (const auto& y : b) n += x == y ? 1 : 0;
  }
  return n;
}

/// Features recomputed straight from the raw records, without the
/// snapshot's indexes.
inline FeatureVector oracle_features(const std::vector<UserProfile>& users,
                                     const std::vector<PostRecord>& posts,
                                     const std::vector<PhotoRecord>& photos,
                                     const Id& a, const Id& b) {
  const auto find = [&](const Id& id) -> const UserProfile& {
    return *std::find_if(users.begin(), users.end(),
                         [&](const UserProfile& u) { return u.id == id; });
  };
  const UserProfile& u = find(a);
  const UserProfile& f = find(b);
  FeatureVector fv;
  for (const auto& p : posts) {
    const bool by_u = p.author_id == a && p.commenter_ids.count(b) > 0;
    const bool by_f = p.author_id == b && p.commenter_ids.count(a) > 0;
    if (by_u || by_f) ++fv.mutual_post_count;
  }
  for (const auto& ph : photos) {
    if (ph.tagged_ids.count(a) && ph.tagged_ids.count(b)) ++fv.common_photo_count;
  }
  fv.mutual_friend_count = count_shared(u.friend_ids, f.friend_ids);
  const auto same = [](const std::optional<std::string>& x,
                       const std::optional<std::string>& y) {
    return x && y && !fold_place(*x).empty() && fold_place(*x) == fold_place(*y);
  };
  fv.same_current_city = same(u.current_city, f.current_city);
  fv.same_hometown = same(u.hometown, f.hometown);
  fv.common_study_count = count_shared(u.schools, f.schools);
  fv.common_work_count = count_shared(u.employers, f.employers);
  return fv;
}

struct RawSnapshot {
  std::vector<UserProfile> users;
  std::vector<PostRecord> posts;
  std::vector<PhotoRecord> photos;
};

/// Small random snapshot: 2..8 users, symmetric friendships, places with
/// case and whitespace drift, posts whose commenters may include the author.
inline RawSnapshot random_raw_snapshot(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> n_users(2, 8);
  std::bernoulli_distribution coin(0.5);
  std::uniform_int_distribution<int> pick3(0, 2);
  const std::array<const char*, 3> cities{"Miami", "Bucharest", "Lyon"};
  const std::array<const char*, 3> drift{"", " ", "\t"};
  RawSnapshot s;
  const int n = n_users(rng);
  for (int i = 0; i < n; ++i) {
    UserProfile u;
    u.id = "u" + std::to_string(i);
    if (coin(rng)) {
      std::string c = cities[pick3(rng)];
      if (coin(rng)) std::transform(c.begin(), c.end(), c.begin(), ::toupper);
      u.current_city = drift[pick3(rng)] + c + drift[pick3(rng)];
    }
    if (coin(rng)) u.hometown = cities[pick3(rng)];
    for (int k = 0; k < 3; ++k) {
      if (coin(rng)) u.schools.insert("school" + std::to_string(k));
      if (coin(rng)) u.employers.insert("job" + std::to_string(k));
    }
    s.users.push_back(std::move(u));
  }
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (coin(rng) || j == i + 1) {
        s.users[i].friend_ids.insert(s.users[j].id);
        s.users[j].friend_ids.insert(s.users[i].id);
      }
    }
  }
  std::uniform_int_distribution<int> n_items(0, 12);
  std::uniform_int_distribution<int> who(0, n - 1);
  const int posts = n_items(rng);
  for (int p = 0; p < posts; ++p) {
    PostRecord r;
    r.post_id = "p" + std::to_string(p);
    r.author_id = s.users[who(rng)].id;
    for (int c = 0; c < 3; ++c) {
      if (coin(rng)) r.commenter_ids.insert(s.users[who(rng)].id);
    }
    s.posts.push_back(std::move(r));
  }
  const int photos = n_items(rng);
  for (int p = 0; p < photos; ++p) {
    PhotoRecord r;
    r.photo_id = "ph" + std::to_string(p);
    r.tagged_ids.insert(s.users[who(rng)].id);
    for (int c = 0; c < 3; ++c) {
      if (coin(rng)) r.tagged_ids.insert(s.users[who(rng)].id);
    }
    s.photos.push_back(std::move(r));
  }
  return s;
}

inline ResponseSet random_responses(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> f(0, 4), a(0, 2);
  return {kFrequencyAnswers[f(rng)], kFrequencyAnswers[f(rng)],
          kAgreementAnswers[a(rng)], kAgreementAnswers[a(rng)],
          kAgreementAnswers[a(rng)]};
}

/// A snapshot where "p" has `friends` friends f00.. and nothing else.
inline SocialSnapshot star_snapshot(int friends) {
  std::vector<UserProfile> users;
  UserProfile p;
  p.id = "p";
  for (int i = 0; i < friends; ++i) {
    UserProfile f;
    f.id = (i < 10 ? "f0" : "f") + std::to_string(i);
    f.friend_ids.insert(p.id);
    p.friend_ids.insert(f.id);
    users.push_back(std::move(f));
  }
  users.push_back(std::move(p));
  return SocialSnapshot(std::move(users), {}, {});
}

}  // namespace friendaudit::testing

#endif  // FRIENDAUDIT_TESTS_TEST_SUPPORT_HPP
