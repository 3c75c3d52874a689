// Copyright 2026 The Threadrec Authors.
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

#include "threadrec/synthetic.hpp"

#include <array>
#include <string>
#include <unordered_set>

#include "threadrec/error.hpp"
#include "threadrec/random.hpp"

namespace threadrec {

void GeneratorConfig::validate() const {
  if (min_posts == 0) throw ValidationError("generator: min_posts must be at least 1");
  if (min_posts > max_posts) throw ValidationError("generator: min_posts exceeds max_posts");
  if (min_sentences == 0) throw ValidationError("generator: min_sentences must be at least 1");
  if (min_sentences > max_sentences) {
    throw ValidationError("generator: min_sentences exceeds max_sentences");
  }
  if (entities_per_branch < 2) {
    throw ValidationError("generator: entities_per_branch must be at least 2");
  }
  if (!(branch_cohesion >= 0.0 && branch_cohesion <= 1.0)) {
    throw ValidationError("generator: branch_cohesion must lie in [0, 1]");
  }
  if (!(cross_talk >= 0.0 && cross_talk <= 1.0)) {
    throw ValidationError("generator: cross_talk must lie in [0, 1]");
  }
}

namespace {

constexpr std::array<std::string_view, 32> kFiller = {
    "really", "just", "maybe", "actually", "quite", "basically", "honestly", "anyway",
    "probably", "usually", "simply", "totally", "again", "still", "sometimes", "often",
    "kind", "sort", "stuff", "thing", "lately", "today", "yesterday", "somehow",
    "pretty", "fine", "okay", "sure", "though", "perhaps", "mostly", "already"};

// Shared nouns that turn up in every kind of discussion.
constexpr std::array<std::string_view, 12> kGlobalNouns = {
    "computer", "problem", "window", "laptop", "setting", "version",
    "driver", "error", "folder", "update", "screen", "memory"};

constexpr std::array<std::string_view, 10> kVerbs = {
    "fixes", "needs", "breaks", "replaces", "cleans", "blocks", "loads", "checks", "moves",
    "scans"};

constexpr std::array<std::string_view, 6> kPrepositions = {"with", "near", "for", "like",
                                                           "after", "over"};

constexpr std::array<std::string_view, 16> kOnsets = {"b",  "d",  "f",  "g",  "k",  "l",
                                                      "m",  "n",  "p",  "r",  "t",  "v",
                                                      "z",  "br", "tr", "gl"};
constexpr std::array<std::string_view, 5> kVowels = {"a", "e", "i", "o", "u"};
constexpr std::array<std::string_view, 6> kCodas = {"n", "r", "x", "k", "m", "l"};

template <typename T, std::size_t N>
const T& pick(const std::array<T, N>& items, SplitMix64& rng) {
  return items[rng.below(N)];
}

// Pronounceable nouns, unique within one thread.
class NameSource {
 public:
  explicit NameSource(SplitMix64& rng) : rng_(rng) {}

  std::string next() {
    while (true) {
      std::string name;
      const std::size_t syllables = 2 + rng_.below(2);
      for (std::size_t i = 0; i < syllables; ++i) {
        name += pick(kOnsets, rng_);
        name += pick(kVowels, rng_);
      }
      name += pick(kCodas, rng_);
      if (used_.insert(name).second) return name;
    }
  }

 private:
  SplitMix64& rng_;
  std::unordered_set<std::string> used_;
};

struct SentencePlan {
  std::string subject;
  std::string object;
  std::vector<std::string> others;
};

std::size_t in_range(std::size_t lo, std::size_t hi, SplitMix64& rng) {
  return lo + static_cast<std::size_t>(rng.below(hi - lo + 1));
}

const std::string& other_than(const std::vector<std::string>& pool, const std::string& avoid,
                              SplitMix64& rng) {
  while (true) {
    const std::string& e = pool[rng.below(pool.size())];
    if (e != avoid || pool.size() == 1) return e;
  }
}

Sentence realize(const SentencePlan& plan, std::size_t filler_words, SplitMix64& rng) {
  std::string text = "the " + plan.subject + " " + std::string(pick(kVerbs, rng)) + " the " +
                     plan.object;
  std::vector<EntityMention> mentions{{plan.subject, Role::kSubject},
                                      {plan.object, Role::kObject}};
  for (const auto& x : plan.others) {
    text += " " + std::string(pick(kPrepositions, rng)) + " the " + x;
    mentions.push_back({x, Role::kOther});
  }
  for (std::size_t i = 0; i < filler_words; ++i) {
    text += " ";
    text += pick(kFiller, rng);
  }
  text += ".";
  return make_sentence(std::move(text), std::move(mentions));
}

Thread generate_thread(const GeneratorConfig& config, std::size_t index, SplitMix64& rng) {
  Thread thread;
  thread.thread_id = "syn-" + std::to_string(index);
  const std::size_t n = in_range(config.min_posts, config.max_posts, rng);

  std::vector<int> parents(n, 0);
  for (std::size_t i = 1; i < n; ++i) parents[i] = 1 + static_cast<int>(rng.below(i));
  thread.gold_parents = ParentVector(parents);

  NameSource names(rng);
  // Branch 0 belongs to the first post; each direct reply to it opens a new
  // branch, deeper replies inherit their parent's branch.
  std::vector<std::size_t> branch(n, 0);
  std::vector<std::vector<std::string>> branch_entities;
  auto new_branch = [&] {
    std::vector<std::string> set;
    for (std::size_t e = 0; e < config.entities_per_branch; ++e) set.push_back(names.next());
    branch_entities.push_back(std::move(set));
    return branch_entities.size() - 1;
  };
  branch[0] = new_branch();
  for (std::size_t i = 1; i < n; ++i) {
    branch[i] = parents[i] == 1 ? new_branch() : branch[static_cast<std::size_t>(parents[i] - 1)];
  }

  std::vector<SentencePlan> last_plan(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& pool = branch_entities[branch[i]];
    Post post;
    post.post_id = static_cast<int>(i) + 1;
    post.author = "user" + std::to_string(rng.below(1000));
    const std::size_t count = in_range(config.min_sentences, config.max_sentences, rng);
    SentencePlan prev;
    bool has_prev = false;
    if (i > 0) {
      prev = last_plan[static_cast<std::size_t>(parents[i] - 1)];
      has_prev = true;
    }
    for (std::size_t s = 0; s < count; ++s) {
      SentencePlan plan;
      const bool cohesive = has_prev && rng.uniform() < config.branch_cohesion;
      if (cohesive) {
        // Within a post the subject persists; across a reply boundary the
        // replied-to post's object becomes the new subject.
        plan.subject = s == 0 ? prev.object : prev.subject;
      } else {
        plan.subject = pool[rng.below(pool.size())];
      }
      plan.object = other_than(pool, plan.subject, rng);
      plan.others.emplace_back(pick(kGlobalNouns, rng));
      if (branch_entities.size() > 1 && rng.uniform() < config.cross_talk) {
        std::size_t b = rng.below(branch_entities.size());
        if (b == branch[i]) b = (b + 1) % branch_entities.size();
        const auto& other_pool = branch_entities[b];
        const std::string& e = other_pool[rng.below(other_pool.size())];
        if (e != plan.subject && e != plan.object) plan.others.push_back(e);
      }
      post.sentences.push_back(realize(plan, config.filler_words, rng));
      prev = plan;
      has_prev = true;
    }
    last_plan[i] = prev;
    thread.posts.push_back(std::move(post));
  }
  return thread;
}

}  // namespace

std::vector<Thread> generate_synthetic_corpus(const GeneratorConfig& config,
                                              std::uint64_t seed) {
  config.validate();
  std::vector<Thread> corpus;
  corpus.reserve(config.threads);
  for (std::size_t i = 0; i < config.threads; ++i) {
    SplitMix64 rng(derive_seed(seed, i));
    corpus.push_back(generate_thread(config, i, rng));
  }
  return corpus;
}

}  // namespace threadrec
