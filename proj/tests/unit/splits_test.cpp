/*
 * Copyright 2026 The prag Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#include <algorithm>
#include <cmath>
#include <set>

#include <gtest/gtest.h>

#include "prag/error.hpp"
#include "prag/splits.hpp"

namespace prag {
namespace {

UserHistory rating_user(const std::string& id, std::size_t n, std::int64_t first_date = 1) {
  UserHistory u;
  u.user_id = id;
  for (std::size_t i = 0; i < n; ++i) {
    ProfileEntry e;
    e.id = std::to_string(i + 1);
    e.fields = {{"text", "review " + std::to_string(i)}, {"score", std::to_string(i % 5 + 1)}};
    e.date = first_date + static_cast<std::int64_t>(i);
    u.entries.push_back(std::move(e));
  }
  return u;
}

std::vector<std::string> entry_ids(const std::vector<ProfileEntry>& entries) {
  std::vector<std::string> out;
  for (const auto& e : entries) out.push_back(e.id);
  return out;
}

std::string source_entry(const Sample& s) { return s.id.substr(s.user_id.size() + 1); }

TEST(FilterUsers, MinimumProfile) {
  SplitConfig c;
  c.min_profile = 5;
  const auto kept =
      filter_users({rating_user("a", 4), rating_user("b", 5), rating_user("c", 9)}, c);
  ASSERT_EQ(kept.size(), 2u);
  EXPECT_EQ(kept[0].user_id, "b");
  EXPECT_EQ(kept[1].user_id, "c");
}

TEST(FilterUsers, EmailBoundsExcludeLargeUsers) {
  const auto c = SplitConfig::defaults_for(task_by_id("LaMP-6U"), SplitRegime::kUserBased);
  const auto kept = filter_users({rating_user("a", 250), rating_user("b", 20)}, c);
  ASSERT_EQ(kept.size(), 1u);
  EXPECT_EQ(kept[0].user_id, "b");
}

TEST(FilterUsers, TopOnePercentTrim) {
  std::vector<UserHistory> users;
  for (int i = 0; i < 200; ++i) users.push_back(rating_user("u" + std::to_string(i), 1 + static_cast<std::size_t>(i)));
  SplitConfig c;
  c.trim_top_fraction = 0.01;
  const auto kept = filter_users(users, c);
  EXPECT_EQ(kept.size(), 198u);
  std::set<std::string> names;
  for (const auto& u : kept) names.insert(u.user_id);
  EXPECT_FALSE(names.contains("u199"));
  EXPECT_FALSE(names.contains("u198"));
  EXPECT_TRUE(names.contains("u197"));
}

TEST(UserBasedSplit, EightOneOne) {
  std::vector<UserHistory> users;
  for (int i = 0; i < 10; ++i) users.push_back(rating_user("u" + std::to_string(i), 3));
  SplitConfig c;
  c.selection = InputSelection::kOneEntry;
  const auto out = user_based_split(users, task_by_id("LaMP-3U"), c);
  EXPECT_EQ(out.manifest.train_users.size(), 8u);
  EXPECT_EQ(out.manifest.dev_users.size(), 1u);
  EXPECT_EQ(out.manifest.test_users.size(), 1u);
  std::set<std::string> all;
  for (const auto* g : {&out.manifest.train_users, &out.manifest.dev_users,
                        &out.manifest.test_users}) {
    for (const auto& u : *g) EXPECT_TRUE(all.insert(u).second) << u;
  }
  EXPECT_EQ(out.train.samples.size(), 8u);
  for (const auto& s : out.train.samples) {
    EXPECT_EQ(s.profile.size(), 2u);
    const auto ids = entry_ids(s.profile);
    EXPECT_EQ(std::count(ids.begin(), ids.end(), source_entry(s)), 0);
    EXPECT_TRUE(validate_sample(s, out.train.task).empty());
  }
}

TEST(UserBasedSplit, SampleRateHalves) {
  std::vector<UserHistory> users;
  for (int i = 0; i < 3; ++i) users.push_back(rating_user("u" + std::to_string(i), 6));
  SplitConfig c;
  c.user_ratios = {1.0 / 3, 1.0 / 3, 1.0 / 3};
  c.sample_rate = 0.5;
  const auto out = user_based_split(users, task_by_id("LaMP-3U"), c);
  EXPECT_EQ(out.train.samples.size(), 3u);
  EXPECT_EQ(out.dev.samples.size(), 3u);
  EXPECT_EQ(out.test.samples.size(), 3u);
}

TEST(UserBasedSplit, NeedsThreeUsers) {
  EXPECT_THROW(user_based_split({rating_user("a", 3), rating_user("b", 3)},
                                task_by_id("LaMP-3U"), SplitConfig{}),
               InvalidArgument);
}

TEST(UserBasedSplit, IndependentOfUserOrder) {
  std::vector<UserHistory> users;
  for (int i = 0; i < 12; ++i) users.push_back(rating_user("u" + std::to_string(i), 4));
  SplitConfig c;
  c.seed = 99;
  const auto a = user_based_split(users, task_by_id("LaMP-3U"), c);
  std::reverse(users.begin(), users.end());
  const auto b = user_based_split(users, task_by_id("LaMP-3U"), c);
  EXPECT_TRUE(same_content(a.train, b.train));
  EXPECT_TRUE(same_content(a.test, b.test));
  EXPECT_EQ(dump_manifest(a.manifest), dump_manifest(b.manifest));
}

TEST(TimeBasedSplit, FractionsOfTen) {
  SplitConfig c;
  c.regime = SplitRegime::kTimeBased;
  const auto out = time_based_split({rating_user("a", 10)}, task_by_id("LaMP-3T"), c);
  const auto& part = out.manifest.partitions.at("a");
  EXPECT_EQ(part.profile, 6u);
  EXPECT_EQ(part.train, 2u);
  EXPECT_EQ(part.dev, 1u);
  EXPECT_EQ(part.test, 1u);
  ASSERT_EQ(out.train.samples.size(), 2u);
  EXPECT_EQ(source_entry(out.train.samples[0]), "7");
  EXPECT_EQ(source_entry(out.train.samples[1]), "8");
  EXPECT_EQ(entry_ids(out.train.samples[0].profile),
            (std::vector<std::string>{"1", "2", "3", "4", "5", "6"}));
  ASSERT_EQ(out.dev.samples.size(), 1u);
  EXPECT_EQ(source_entry(out.dev.samples[0]), "9");
  ASSERT_EQ(out.test.samples.size(), 1u);
  EXPECT_EQ(source_entry(out.test.samples[0]), "10");
  EXPECT_EQ(out.test.samples[0].profile.size(), 9u);
}

TEST(TimeBasedSplit, SingleNewest) {
  SplitConfig c = SplitConfig::defaults_for(task_by_id("LaMP-5T"), SplitRegime::kTimeBased);
  EXPECT_EQ(c.time_partition, TimePartition::kSingleNewest);
  UserHistory u;
  u.user_id = "a";
  for (int i = 0; i < 5; ++i) {
    ProfileEntry e;
    e.id = "p" + std::to_string(i);
    e.fields = {{"title", "t" + std::to_string(i)}, {"abstract", "abs " + std::to_string(i)}};
    e.date = 100 - i;
    u.entries.push_back(e);
  }
  const auto out = time_based_split({u}, task_by_id("LaMP-5T"), c);
  ASSERT_EQ(out.test.samples.size(), 1u);
  EXPECT_EQ(source_entry(out.test.samples[0]), "p0");
  EXPECT_EQ(out.test.samples[0].profile.size(), 4u);
  EXPECT_EQ(out.test.samples[0].target, "t0");
}

TEST(TimeBasedSplit, SameDateTiesBreakById) {
  UserHistory u = rating_user("a", 10);
  for (auto& e : u.entries) e.date = 5;
  SplitConfig c;
  c.regime = SplitRegime::kTimeBased;
  const auto out = time_based_split({u}, task_by_id("LaMP-3T"), c);
  // Ids sort as strings: "1", "10", "2", ..., "9".
  EXPECT_EQ(source_entry(out.test.samples[0]), "9");
  EXPECT_EQ(source_entry(out.dev.samples[0]), "8");
}

TEST(TimeBasedSplit, UndatedEntryIsNamed) {
  UserHistory u = rating_user("a", 10);
  u.entries[3].date.reset();
  SplitConfig c;
  c.regime = SplitRegime::kTimeBased;
  try {
    time_based_split({u}, task_by_id("LaMP-3T"), c);
    FAIL();
  } catch (const InvalidArgument& e) {
    EXPECT_NE(std::string(e.what()).find("'4'"), std::string::npos) << e.what();
  }
}

UserHistory author(const std::string& id, const std::vector<std::vector<std::string>>& refs,
                   const std::vector<std::string>& coauthors) {
  UserHistory u;
  u.user_id = id;
  for (std::size_t i = 0; i < refs.size(); ++i) {
    ProfileEntry e;
    e.id = id + "p" + std::to_string(i);
    e.fields = {{"title", "Paper " + std::to_string(i) + " by " + id},
                {"abstract", "abstract text"}};
    std::string arr = "[";
    for (std::size_t j = 0; j < refs[i].size(); ++j) {
      arr += (j ? ",\"" : "\"") + refs[i][j] + "\"";
    }
    e.extra_json["references"] = arr + "]";
    std::string co = "[";
    for (std::size_t j = 0; j < coauthors.size(); ++j) {
      co += (j ? ",\"" : "\"") + coauthors[j] + "\"";
    }
    e.extra_json["coauthors"] = co + "]";
    u.entries.push_back(std::move(e));
  }
  return u;
}

TEST(CitationPair, TargetNamesThePositiveAndNegativeIsForeign) {
  const auto alice = author("alice", {{"R1", "R2"}, {"R3"}}, {"bob"});
  const auto bob = author("bob", {{"B1", "R1"}, {"B2"}}, {"alice"});
  const auto carol = author("carol", {{"C1"}}, {});
  const auto pool = build_coauthor_pool({alice, bob, carol});
  const std::set<std::string> own = {"R1", "R2", "R3"};
  int first = 0;
  const int trials = 1000;
  for (int seed = 0; seed < trials; ++seed) {
    const Sample s = make_citation_pair(alice, pool, static_cast<std::uint64_t>(seed));
    const auto a = s.input.find("[1]: \"") + 6;
    const auto ref1 = s.input.substr(a, s.input.find('"', a) - a);
    const auto b = s.input.find("[2]: \"") + 6;
    const auto ref2 = s.input.substr(b, s.input.find('"', b) - b);
    const auto& positive = s.target == "[1]" ? ref1 : ref2;
    const auto& negative = s.target == "[1]" ? ref2 : ref1;
    EXPECT_TRUE(own.contains(positive)) << positive;
    EXPECT_FALSE(own.contains(negative)) << negative;
    EXPECT_EQ(s.profile.size(), 1u);
    if (s.target == "[1]") ++first;
  }
  const double sigma = std::sqrt(trials * 0.25);
  EXPECT_LT(std::abs(first - trials / 2.0), 3 * sigma) << first;
}

TEST(CitationPair, NoEligibleNegative) {
  const auto alice = author("alice", {{"R1"}}, {"bob"});
  const auto bob = author("bob", {{"R1"}}, {"alice"});
  const auto pool = build_coauthor_pool({alice, bob});
  EXPECT_THROW(make_citation_pair(alice, pool, 1), InvalidArgument);
}

TEST(SplitConfig, RejectsBadFractions) {
  SplitConfig c;
  c.user_ratios = {0.8, 0.2, 0.1};
  EXPECT_THROW(c.check(), InvalidArgument);
  c = SplitConfig{};
  c.sample_rate = 1.5;
  EXPECT_THROW(c.check(), InvalidArgument);
}

TEST(SplitConfig, TaskDefaults) {
  EXPECT_EQ(SplitConfig::defaults_for(task_by_id("LaMP-1U"), SplitRegime::kUserBased).min_profile,
            50u);
  const auto c3 = SplitConfig::defaults_for(task_by_id("LaMP-3U"), SplitRegime::kUserBased);
  EXPECT_EQ(c3.min_profile, 100u);
  EXPECT_DOUBLE_EQ(c3.trim_top_fraction, 0.01);
  const auto c2 = SplitConfig::defaults_for(task_by_id("LaMP-2U"), SplitRegime::kUserBased);
  EXPECT_DOUBLE_EQ(c2.sample_rate, 0.5);
  EXPECT_EQ(SplitConfig::defaults_for(task_by_id("LaMP-4T"), SplitRegime::kTimeBased).min_profile,
            10u);
}

}  // namespace
}  // namespace prag
