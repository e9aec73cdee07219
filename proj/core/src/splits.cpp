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

#include "prag/splits.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <json.hpp>

#include "prag/error.hpp"
#include "prag/random.hpp"

namespace prag {

namespace {

constexpr double kEps = 1e-9;

std::size_t floor_count(double n, double fraction) {
  return static_cast<std::size_t>(std::floor(n * fraction + kEps));
}

std::vector<const UserHistory*> sorted_by_id(const std::vector<UserHistory>& users) {
  std::vector<const UserHistory*> out;
  out.reserve(users.size());
  for (const auto& u : users) out.push_back(&u);
  std::sort(out.begin(), out.end(), [](const UserHistory* a, const UserHistory* b) {
    return a->user_id < b->user_id;
  });
  return out;
}

std::string fill_template(std::string_view tmpl, const ProfileEntry& entry,
                          const std::map<std::string, std::string>& extra = {}) {
  std::string out;
  std::size_t pos = 0;
  while (pos < tmpl.size()) {
    const auto open = tmpl.find('{', pos);
    const auto close = open == std::string_view::npos ? open : tmpl.find('}', open + 1);
    if (close == std::string_view::npos) {
      out += tmpl.substr(pos);
      break;
    }
    out += tmpl.substr(pos, open - pos);
    const std::string name(tmpl.substr(open + 1, close - open - 1));
    if (const auto it = extra.find(name); it != extra.end()) {
      out += it->second;
    } else if (const std::string* value = entry.field(name)) {
      out += *value;
    } else {
      throw ValidationError("history entry '" + entry.id + "' lacks field '" + name + "'");
    }
    pos = close + 1;
  }
  return out;
}

std::vector<std::string> string_list(const ProfileEntry& entry, const std::string& key) {
  const auto it = entry.extra_json.find(key);
  if (it == entry.extra_json.end()) return {};
  const auto j = nlohmann::json::parse(it->second);
  if (!j.is_array()) {
    throw ValidationError("entry '" + entry.id + "': \"" + key + "\" must be an array");
  }
  std::vector<std::string> out;
  for (const auto& x : j) {
    if (!x.is_string()) {
      throw ValidationError("entry '" + entry.id + "': \"" + key + "\" must hold strings");
    }
    out.push_back(x.get<std::string>());
  }
  return out;
}

std::set<std::string> all_references(const UserHistory& user) {
  std::set<std::string> out;
  for (const auto& e : user.entries) {
    for (auto& r : string_list(e, "references")) out.insert(std::move(r));
  }
  return out;
}

std::string sample_id_for(const std::string& user_id, const std::string& entry_id) {
  return user_id + "-" + entry_id;
}

// Citation sample for a given paper; `profile` is supplied by the caller.
Sample citation_sample(const UserHistory& user, const ProfileEntry& paper,
                       const CoauthorPool& pool, Rng& rng,
                       std::vector<ProfileEntry> profile) {
  const auto refs = string_list(paper, "references");
  if (refs.empty()) {
    throw InvalidArgument("paper '" + paper.id + "' has no references");
  }
  const std::string positive = refs[rng.below(refs.size())];
  const auto user_cited = all_references(user);

  auto negative_from = [&](const std::string& author) -> std::optional<std::string> {
    const auto it = pool.find(author);
    if (it == pool.end()) return std::nullopt;
    std::vector<std::string> eligible;
    for (const auto& title : it->second) {
      if (!user_cited.contains(title)) eligible.push_back(title);
    }
    if (eligible.empty()) return std::nullopt;
    return eligible[rng.below(eligible.size())];
  };

  std::optional<std::string> negative;
  std::vector<std::string> coauthors;
  for (auto& a : string_list(paper, "coauthors")) {
    if (a != user.user_id) coauthors.push_back(std::move(a));
  }
  std::sort(coauthors.begin(), coauthors.end());
  coauthors.erase(std::unique(coauthors.begin(), coauthors.end()), coauthors.end());
  rng.shuffle(coauthors);
  for (const auto& a : coauthors) {
    if ((negative = negative_from(a))) break;
  }
  if (!negative) {
    std::vector<std::string> authors;
    for (const auto& [a, cited] : pool) {
      if (a != user.user_id) authors.push_back(a);
    }
    rng.shuffle(authors);
    for (const auto& a : authors) {
      if ((negative = negative_from(a))) break;
    }
  }
  if (!negative) {
    throw InvalidArgument("no eligible negative citation for user '" + user.user_id + "'");
  }

  const bool positive_first = rng.bernoulli(0.5);
  const std::map<std::string, std::string> slots = {
      {"ref1", positive_first ? positive : *negative},
      {"ref2", positive_first ? *negative : positive},
  };
  Sample s;
  s.id = sample_id_for(user.user_id, paper.id);
  s.user_id = user.user_id;
  s.input = fill_template(task_by_id("LaMP-1").input_template, paper, slots);
  s.target = positive_first ? "[1]" : "[2]";
  s.profile = std::move(profile);
  return s;
}

std::string transformed(const SplitConfig& config, std::string input) {
  return config.input_transform ? config.input_transform(input) : input;
}

Sample entry_sample(const TaskSpec& task, const SplitConfig& config,
                    const std::string& user_id, const ProfileEntry& entry,
                    std::vector<ProfileEntry> profile) {
  const std::string* target = entry.field(task.target_field);
  if (target == nullptr) {
    throw ValidationError("history entry '" + entry.id + "' lacks field '" +
                          task.target_field + "'");
  }
  Sample s;
  s.id = sample_id_for(user_id, entry.id);
  s.user_id = user_id;
  s.input = transformed(config, fill_template(task.input_template, entry));
  s.target = *target;
  s.profile = std::move(profile);
  return s;
}

std::vector<ProfileEntry> all_but(const std::vector<ProfileEntry>& entries,
                                  std::size_t skip) {
  std::vector<ProfileEntry> out;
  out.reserve(entries.size() - 1);
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (i != skip) out.push_back(entries[i]);
  }
  return out;
}

// Indices of `n` items to keep at `rate`, ascending.
std::vector<std::size_t> subsample(std::size_t n, double rate, Rng& rng) {
  std::size_t keep = floor_count(static_cast<double>(n), rate);
  if (rate > 0.0 && n > 0) keep = std::max<std::size_t>(keep, 1);
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  rng.shuffle(idx);
  idx.resize(std::min(keep, n));
  std::sort(idx.begin(), idx.end());
  return idx;
}

void subsample_samples(std::vector<Sample>& samples, std::optional<std::size_t> limit,
                       Rng& rng) {
  if (!limit || samples.size() <= *limit) return;
  std::vector<std::size_t> idx(samples.size());
  std::iota(idx.begin(), idx.end(), 0);
  rng.shuffle(idx);
  idx.resize(*limit);
  std::sort(idx.begin(), idx.end());
  std::vector<Sample> kept;
  kept.reserve(*limit);
  for (const auto i : idx) kept.push_back(std::move(samples[i]));
  samples = std::move(kept);
}

Dataset make_dataset(const TaskSpec& task, const SplitConfig& config,
                     const char* split, std::vector<Sample> samples) {
  Dataset ds;
  ds.task = task;
  ds.samples = std::move(samples);
  ds.provenance = {
      {"builder", "prag split"},
      {"regime", std::string(to_string(config.regime))},
      {"seed", std::to_string(config.seed)},
      {"split", split},
  };
  return ds;
}

}  // namespace

SplitConfig SplitConfig::defaults_for(const TaskSpec& task, SplitRegime regime) {
  SplitConfig c;
  c.regime = regime;
  const bool one_per_user = task.number == 1 || task.number == 3 ||
                            task.number == 5 || task.number == 7;
  c.selection = one_per_user ? InputSelection::kOneEntry : InputSelection::kAllEntries;
  c.sample_rate = one_per_user ? 1.0 : 0.5;
  c.time_partition = one_per_user ? TimePartition::kSingleNewest : TimePartition::kFractions;
  switch (task.number) {
    case 1:
    case 5: c.min_profile = 50; break;
    case 2: c.min_profile = 5; break;
    case 3:
      c.min_profile = 100;
      c.trim_top_fraction = 0.01;
      break;
    case 4: c.min_profile = regime == SplitRegime::kUserBased ? 4 : 10; break;
    case 6:
      c.min_profile = 10;
      c.max_profile = 200;
      break;
    case 7: c.min_profile = 10; break;
    default: break;
  }
  return c;
}

void SplitConfig::check() const {
  auto check_fractions = [](const SplitFractions& f, const char* what) {
    for (const double x : {f.train, f.dev, f.test}) {
      if (x < 0.0 || x > 1.0) {
        throw InvalidArgument(std::string(what) + " must lie in [0, 1]");
      }
    }
    if (f.sum() > 1.0 + kEps) throw InvalidArgument(std::string(what) + " sum above 1");
  };
  check_fractions(user_ratios, "user ratios");
  check_fractions(time_fractions, "time fractions");
  if (min_profile < 1) throw InvalidArgument("min_profile must be at least 1");
  if (max_profile && *max_profile < min_profile) {
    throw InvalidArgument("max_profile below min_profile");
  }
  if (sample_rate < 0.0 || sample_rate > 1.0) {
    throw InvalidArgument("sample_rate must lie in [0, 1]");
  }
  if (trim_top_fraction < 0.0 || trim_top_fraction >= 1.0) {
    throw InvalidArgument("trim_top_fraction must lie in [0, 1)");
  }
}

std::vector<UserHistory> filter_users(const std::vector<UserHistory>& histories,
                                      const SplitConfig& config) {
  std::vector<const UserHistory*> kept;
  for (const auto& h : histories) {
    const auto n = h.entries.size();
    if (n < config.min_profile) continue;
    if (config.max_profile && n > *config.max_profile) continue;
    kept.push_back(&h);
  }
  if (config.trim_top_fraction > 0.0 && !kept.empty()) {
    auto ranked = kept;
    std::sort(ranked.begin(), ranked.end(), [](const UserHistory* a, const UserHistory* b) {
      if (a->entries.size() != b->entries.size()) {
        return a->entries.size() > b->entries.size();
      }
      return a->user_id < b->user_id;
    });
    const auto drop = static_cast<std::size_t>(
        std::ceil(config.trim_top_fraction * static_cast<double>(ranked.size()) - kEps));
    const std::set<const UserHistory*> dropped(ranked.begin(),
                                               ranked.begin() + static_cast<long>(drop));
    std::erase_if(kept, [&](const UserHistory* h) { return dropped.contains(h); });
  }
  std::vector<UserHistory> out;
  out.reserve(kept.size());
  for (const auto* h : kept) out.push_back(*h);
  return out;
}

CoauthorPool build_coauthor_pool(const std::vector<UserHistory>& histories) {
  CoauthorPool pool;
  for (const auto& h : histories) {
    auto& cited = pool[h.user_id];
    for (auto& r : all_references(h)) cited.insert(std::move(r));
  }
  return pool;
}

Sample make_citation_pair(const UserHistory& user, const CoauthorPool& pool,
                          std::uint64_t seed, const std::optional<std::string>& paper_id) {
  if (pool.empty()) throw InvalidArgument("empty co-author pool");
  Rng rng(seed, stable_hash(user.user_id));
  std::size_t chosen = user.entries.size();
  if (paper_id) {
    for (std::size_t i = 0; i < user.entries.size(); ++i) {
      if (user.entries[i].id == *paper_id) chosen = i;
    }
    if (chosen == user.entries.size()) {
      throw InvalidArgument("user '" + user.user_id + "' has no paper '" + *paper_id + "'");
    }
  } else {
    std::vector<std::size_t> eligible;
    for (std::size_t i = 0; i < user.entries.size(); ++i) {
      if (!string_list(user.entries[i], "references").empty()) eligible.push_back(i);
    }
    if (eligible.empty()) {
      throw InvalidArgument("user '" + user.user_id + "' has no paper with references");
    }
    chosen = eligible[rng.below(eligible.size())];
  }
  return citation_sample(user, user.entries[chosen], pool, rng,
                         all_but(user.entries, chosen));
}

SplitOutput user_based_split(const std::vector<UserHistory>& histories,
                             const TaskSpec& task, const SplitConfig& config) {
  config.check();
  if (histories.size() < 3) {
    throw InvalidArgument("a user-based split needs at least 3 users");
  }
  auto users = sorted_by_id(histories);
  Rng rng(config.seed);
  rng.shuffle(users);

  const double n = static_cast<double>(users.size());
  const std::size_t n_dev = floor_count(n, config.user_ratios.dev);
  const std::size_t n_test = floor_count(n, config.user_ratios.test);
  std::size_t n_train = floor_count(n, config.user_ratios.train);
  if (std::abs(config.user_ratios.sum() - 1.0) < kEps) {
    n_train = users.size() - n_dev - n_test;
  }

  SplitOutput out;
  out.manifest.regime = SplitRegime::kUserBased;
  out.manifest.seed = config.seed;
  const CoauthorPool pool =
      task.number == 1 ? build_coauthor_pool(histories) : CoauthorPool{};

  std::vector<const UserHistory*> groups[3];
  groups[0].assign(users.begin(), users.begin() + static_cast<long>(n_train));
  groups[1].assign(users.begin() + static_cast<long>(n_train),
                   users.begin() + static_cast<long>(n_train + n_dev));
  groups[2].assign(users.begin() + static_cast<long>(n_train + n_dev),
                   users.begin() + static_cast<long>(n_train + n_dev + n_test));
  std::vector<std::string>* names[3] = {&out.manifest.train_users,
                                        &out.manifest.dev_users,
                                        &out.manifest.test_users};
  std::vector<Sample> samples[3];

  for (int g = 0; g < 3; ++g) {
    std::sort(groups[g].begin(), groups[g].end(),
              [](const UserHistory* a, const UserHistory* b) { return a->user_id < b->user_id; });
    for (const auto* user : groups[g]) {
      if (user->entries.size() < 2) {
        out.manifest.skipped_users.push_back(user->user_id);
        continue;
      }
      names[g]->push_back(user->user_id);
      Rng user_rng(config.seed, stable_hash(user->user_id));
      if (task.number == 1) {
        samples[g].push_back(make_citation_pair(*user, pool, config.seed));
        continue;
      }
      if (config.selection == InputSelection::kOneEntry) {
        const auto i = static_cast<std::size_t>(user_rng.below(user->entries.size()));
        samples[g].push_back(entry_sample(task, config, user->user_id, user->entries[i],
                                          all_but(user->entries, i)));
        continue;
      }
      for (const auto i : subsample(user->entries.size(), config.sample_rate, user_rng)) {
        samples[g].push_back(entry_sample(task, config, user->user_id, user->entries[i],
                                          all_but(user->entries, i)));
      }
    }
  }
  std::sort(out.manifest.skipped_users.begin(), out.manifest.skipped_users.end());

  Rng final_rng(config.seed, stable_hash("final-subset"));
  subsample_samples(samples[1], config.dev_subsample, final_rng);
  subsample_samples(samples[2], config.test_subsample, final_rng);
  out.train = make_dataset(task, config, "train", std::move(samples[0]));
  out.dev = make_dataset(task, config, "dev", std::move(samples[1]));
  out.test = make_dataset(task, config, "test", std::move(samples[2]));
  return out;
}

SplitOutput time_based_split(const std::vector<UserHistory>& histories,
                             const TaskSpec& task, const SplitConfig& config) {
  config.check();
  SplitOutput out;
  out.manifest.regime = SplitRegime::kTimeBased;
  out.manifest.seed = config.seed;
  const CoauthorPool pool =
      task.number == 1 ? build_coauthor_pool(histories) : CoauthorPool{};

  std::vector<Sample> samples[3];
  std::vector<std::string>* names[3] = {&out.manifest.train_users,
                                        &out.manifest.dev_users,
                                        &out.manifest.test_users};

  for (const auto* user : sorted_by_id(histories)) {
    for (const auto& e : user->entries) {
      if (!e.date) {
        throw InvalidArgument("time-based split: entry '" + e.id + "' of user '" +
                              user->user_id + "' has no date");
      }
    }
    std::vector<ProfileEntry> entries = user->entries;
    std::sort(entries.begin(), entries.end(), [](const ProfileEntry& a, const ProfileEntry& b) {
      if (*a.date != *b.date) return *a.date < *b.date;
      return a.id < b.id;
    });

    const std::size_t n = entries.size();
    UserPartition part;
    if (config.time_partition == TimePartition::kSingleNewest) {
      part.train = part.dev = part.test = 1;
    } else {
      auto count = [&](double f) {
        std::size_t c = floor_count(static_cast<double>(n), f);
        return f > 0.0 ? std::max<std::size_t>(c, 1) : c;
      };
      part.train = count(config.time_fractions.train);
      part.dev = count(config.time_fractions.dev);
      part.test = count(config.time_fractions.test);
    }
    const std::size_t inputs = part.train + part.dev + part.test;
    if (inputs >= n) {
      out.manifest.skipped_users.push_back(user->user_id);
      continue;
    }
    part.profile = n - inputs;
    out.manifest.partitions.emplace(user->user_id, part);

    Rng user_rng(config.seed, stable_hash(user->user_id));
    const std::size_t starts[3] = {part.profile, part.profile + part.train,
                                   part.profile + part.train + part.dev};
    const std::size_t sizes[3] = {part.train, part.dev, part.test};
    for (int g = 0; g < 3; ++g) {
      if (sizes[g] > 0) names[g]->push_back(user->user_id);
      const std::vector<ProfileEntry> profile(entries.begin(),
                                              entries.begin() + static_cast<long>(starts[g]));
      for (std::size_t i = starts[g]; i < starts[g] + sizes[g]; ++i) {
        if (task.number == 1) {
          if (string_list(entries[i], "references").empty()) continue;
          samples[g].push_back(citation_sample(*user, entries[i], pool, user_rng, profile));
        } else {
          samples[g].push_back(entry_sample(task, config, user->user_id, entries[i], profile));
        }
      }
    }
  }

  Rng final_rng(config.seed, stable_hash("final-subset"));
  subsample_samples(samples[1], config.dev_subsample, final_rng);
  subsample_samples(samples[2], config.test_subsample, final_rng);
  out.train = make_dataset(task, config, "train", std::move(samples[0]));
  out.dev = make_dataset(task, config, "dev", std::move(samples[1]));
  out.test = make_dataset(task, config, "test", std::move(samples[2]));
  return out;
}

SplitOutput build_splits(const std::vector<UserHistory>& histories, const TaskSpec& task,
                         const SplitConfig& config) {
  const auto kept = filter_users(histories, config);
  return config.regime == SplitRegime::kUserBased ? user_based_split(kept, task, config)
                                                  : time_based_split(kept, task, config);
}

std::string dump_manifest(const SplitManifest& manifest) {
  nlohmann::json j;
  j["regime"] = std::string(to_string(manifest.regime));
  j["seed"] = manifest.seed;
  j["users"] = {{"train", manifest.train_users},
                {"dev", manifest.dev_users},
                {"test", manifest.test_users}};
  nlohmann::json parts = nlohmann::json::object();
  for (const auto& [user, p] : manifest.partitions) {
    parts[user] = {{"profile", p.profile}, {"train", p.train}, {"dev", p.dev}, {"test", p.test}};
  }
  j["partitions"] = std::move(parts);
  j["skipped_users"] = manifest.skipped_users;
  return j.dump(2) + "\n";
}

}  // namespace prag
