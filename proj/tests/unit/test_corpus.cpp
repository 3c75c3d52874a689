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

#include <map>
#include <set>
#include <sstream>

#include "doctest.h"
#include "fixtures.hpp"
#include "threadrec/corpus.hpp"
#include "threadrec/error.hpp"
#include "threadrec/synthetic.hpp"

using namespace threadrec;

namespace {

std::vector<Thread> load_string(const std::string& text) {
  std::istringstream in(text);
  return load_corpus(in);
}

std::string serialize_all(const std::vector<Thread>& threads) {
  std::ostringstream out;
  write_corpus(out, threads);
  return out.str();
}

}  // namespace

TEST_CASE("parent vector validity") {
  CHECK(ParentVector::is_valid({0}));
  CHECK(ParentVector::is_valid({0, 1, 1, 1, 4}));
  CHECK_FALSE(ParentVector::is_valid({}));
  CHECK_FALSE(ParentVector::is_valid({0, 1, 3, 2}));
  CHECK_FALSE(ParentVector::is_valid({0, 0}));
  CHECK_THROWS_AS(ParentVector({0, 2}), ValidationError);

  const auto pv = ParentVector::from_replies({1, 1, 1, 4});
  CHECK(pv.values() == std::vector<int>{0, 1, 1, 1, 4});
  CHECK(pv.to_string() == "0,1,1,1,4");
  CHECK(ParentVector::parse("0,1,1,1,4") == pv);
  CHECK(ParentVector::parse("1,1,1,4") == pv);
  CHECK_THROWS_AS(ParentVector::parse("1,x"), ValidationError);
}

TEST_CASE("load the five-post fixture") {
  const Thread t = testing::registry_thread();
  CHECK(t.thread_id == "registry-cleanup");
  REQUIRE(t.num_posts() == 5);
  REQUIRE(t.gold_parents.has_value());
  CHECK(t.gold_parents->values() == std::vector<int>{0, 1, 1, 1, 4});
  CHECK(t.num_sentences() == 16);
  CHECK(t.posts[3].sentences[0].text == "try regseeker.");
  CHECK(t.posts[3].sentences[0].tokens == std::vector<std::string>{"try", "regseeker"});
  REQUIRE(t.posts[1].sentences[1].annotations.has_value());
  CHECK(t.posts[1].sentences[1].annotations->front() ==
        EntityMention{"regedit", Role::kSubject});

  // The raw-text copy segments into the same sentences.
  const Thread raw = testing::registry_raw_thread();
  REQUIRE(raw.num_posts() == 5);
  for (std::size_t p = 0; p < 5; ++p) {
    REQUIRE(raw.posts[p].sentences.size() == t.posts[p].sentences.size());
    for (std::size_t s = 0; s < t.posts[p].sentences.size(); ++s) {
      CHECK(raw.posts[p].sentences[s].text == t.posts[p].sentences[s].text);
    }
  }
}

TEST_CASE("load_corpus edge cases") {
  CHECK(load_string("").empty());
  CHECK(load_string("\n\n").empty());

  const std::string self_ref =
      R"({"thread_id":"x","posts":[{"post_id":1,"text":"a."},{"post_id":2,"text":"b."},)"
      R"({"post_id":3,"text":"c."},{"post_id":4,"text":"d."}],"parents":[null,1,3,2]})";
  CHECK_THROWS_AS(load_string(self_ref), ValidationError);

  try {
    load_string("\n{not json}\n");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
  }

  const std::string no_gold = R"({"thread_id":"y","posts":[{"post_id":1,"text":""}]})";
  const auto threads = load_string(no_gold);
  REQUIRE(threads.size() == 1);
  CHECK_FALSE(threads[0].gold_parents.has_value());
  REQUIRE(threads[0].posts[0].sentences.size() == 1);
  CHECK(threads[0].posts[0].sentences[0].text.empty());

  const std::string wrong_len =
      R"({"thread_id":"z","posts":[{"post_id":1,"text":"a."}],"parents":[null,1]})";
  CHECK_THROWS_AS(load_string(wrong_len), ValidationError);
  CHECK_THROWS_AS(load_corpus_file("/nonexistent/corpus.jsonl"), IoError);
}

TEST_CASE("segment_sentences") {
  const auto two = segment_sentences("try regseeker. it's free and pretty safe to use automatic.");
  REQUIRE(two.size() == 2);
  CHECK(two[0].text == "try regseeker.");
  CHECK(two[1].text == "it's free and pretty safe to use automatic.");
  CHECK(two[1].tokens.front() == "it's");

  CHECK(segment_sentences("").empty());

  const auto one = segment_sentences("hello world");
  REQUIRE(one.size() == 1);
  CHECK(one[0].tokens == std::vector<std::string>{"hello", "world"});

  CHECK(segment_sentences("Ask Dr. Smith about it. He knows!").size() == 2);
  CHECK(segment_sentences("Really?! Yes.").size() == 2);
  CHECK(segment_sentences("version 1.5 is out").size() == 1);
  CHECK(segment_sentences("... !!").empty());
  CHECK(segment_sentences("use indexing.) then stop. (really!) done").size() == 4);
  CHECK(tokenize("Hello, World's END") == std::vector<std::string>{"hello", "world's", "end"});
}

TEST_CASE("serialize then load is the identity") {
  const Thread reg = testing::registry_thread();
  GeneratorConfig config;
  config.threads = 30;
  auto threads = generate_synthetic_corpus(config, 5);
  threads.push_back(reg);
  threads.push_back(testing::registry_raw_thread());
  threads.back().gold_parents.reset();

  const std::string text = serialize_all(threads);
  const auto reloaded = load_string(text);
  CHECK(reloaded == threads);
  CHECK(serialize_all(reloaded) == text);
}

TEST_CASE("synthetic generator") {
  GeneratorConfig config;
  config.threads = 200;
  const auto a = generate_synthetic_corpus(config, 11);
  const auto b = generate_synthetic_corpus(config, 11);
  CHECK(serialize_all(a) == serialize_all(b));
  CHECK(serialize_all(a) != serialize_all(generate_synthetic_corpus(config, 12)));

  double posts = 0.0;
  for (const auto& t : a) {
    validate_thread(t);
    REQUIRE(t.gold_parents.has_value());
    CHECK(t.num_posts() >= 2);
    CHECK(t.num_posts() <= 5);
    posts += static_cast<double>(t.num_posts());
    for (const auto& p : t.posts) {
      for (const auto& s : p.sentences) CHECK(s.annotations.has_value());
    }
  }
  CHECK(posts / 200.0 == doctest::Approx(3.5).epsilon(0.1));

  config.threads = 0;
  CHECK(generate_synthetic_corpus(config, 1).empty());

  GeneratorConfig bad;
  bad.min_posts = 4;
  bad.max_posts = 3;
  CHECK_THROWS_AS(generate_synthetic_corpus(bad, 1), ValidationError);
  bad = GeneratorConfig{};
  bad.branch_cohesion = 1.5;
  CHECK_THROWS_AS(bad.validate(), ValidationError);
}

TEST_CASE("gold trees are uniform over valid trees") {
  GeneratorConfig config;
  config.threads = 4000;
  config.min_posts = 4;
  config.max_posts = 4;
  config.min_sentences = 1;
  config.max_sentences = 1;
  std::map<std::string, int> counts;
  for (const auto& t : generate_synthetic_corpus(config, 3)) {
    ++counts[t.gold_parents->to_string()];
  }
  CHECK(counts.size() == 6);
  for (const auto& [tree, c] : counts) {
    // Expected 666.7, binomial sd about 23.6.
    CHECK(c > 566);
    CHECK(c < 766);
  }
}

TEST_CASE("split_corpus") {
  GeneratorConfig config;
  config.threads = 2200;
  config.max_posts = 3;
  config.max_sentences = 2;
  const auto corpus = generate_synthetic_corpus(config, 1);
  const auto s = split_corpus(corpus, 1500, 200, std::nullopt, 9);
  CHECK(s.train.size() == 1500);
  CHECK(s.dev.size() == 200);
  CHECK(s.test.size() == 500);
  const auto again = split_corpus(corpus, 1500, 200, std::nullopt, 9);
  CHECK(again.train == s.train);
  CHECK(again.test == s.test);

  std::set<std::string> ids;
  for (const auto* part : {&s.train, &s.dev, &s.test}) {
    for (const auto& t : *part) ids.insert(t.thread_id);
  }
  CHECK(ids.size() == 2200);

  const auto all_test = split_corpus(corpus, 0, 0, std::nullopt, 9);
  CHECK(all_test.test.size() == 2200);
  CHECK(split_corpus(corpus, 10, 10, 10, 9).test.size() == 10);
  CHECK_THROWS_AS(split_corpus(corpus, 2000, 300, std::nullopt, 9), ValidationError);
}
