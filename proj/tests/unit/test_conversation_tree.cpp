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

#include <algorithm>
#include <map>
#include <set>

#include "doctest.h"
#include "fixtures.hpp"
#include "threadrec/conversation_tree.hpp"
#include "threadrec/error.hpp"

using namespace threadrec;

namespace {

// Every assignment of a parent in 1..n to posts 2..n, kept when each parent
// precedes its post.
std::vector<ParentVector> brute_force_trees(std::size_t n) {
  std::vector<ParentVector> out;
  std::vector<int> v(n, 0);
  std::size_t total = 1;
  for (std::size_t i = 1; i < n; ++i) total *= n;
  for (std::size_t code = 0; code < total; ++code) {
    std::size_t c = code;
    bool ok = true;
    for (std::size_t i = 1; i < n; ++i) {
      v[i] = static_cast<int>(c % n) + 1;
      c /= n;
      if (v[i] > static_cast<int>(i)) ok = false;
    }
    if (ok) out.emplace_back(v);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<int> node_ids(std::initializer_list<int> ids) { return ids; }

}  // namespace

TEST_CASE("sentence tree of the fixture thread") {
  const Thread t = testing::registry_thread();
  const auto tree = build_sentence_tree(t, *t.gold_parents);
  REQUIRE(tree.size() == 16);
  CHECK(tree.parent[0] == -1);
  CHECK(tree.nodes[9] == SentenceRef{3, 0});
  // Reply heads hang off the last sentence of the replied-to post.
  CHECK(tree.parent[2] == 1);
  CHECK(tree.parent[5] == 1);
  CHECK(tree.parent[9] == 1);
  CHECK(tree.parent[13] == 12);
  CHECK(tree.depth[2] == 2);
  CHECK(tree.depth[5] == 2);
  CHECK(tree.depth[9] == 2);
  CHECK(tree.depth[8] == 5);
  CHECK(tree.depth[12] == 5);
  CHECK(tree.depth[15] == 8);

  const auto levels = depth_levels(tree);
  REQUIRE(levels.depth_count() == 9);
  CHECK(levels.levels[0] == node_ids({0}));
  CHECK(levels.levels[1] == node_ids({1}));
  CHECK(levels.levels[2] == node_ids({2, 5, 9}));
  CHECK(levels.levels[3] == node_ids({3, 6, 10}));
  CHECK(levels.levels[4] == node_ids({4, 7, 11}));
  CHECK(levels.levels[5] == node_ids({8, 12}));
  CHECK(levels.levels[6] == node_ids({13}));
  CHECK(levels.levels[8] == node_ids({15}));
}

TEST_CASE("chains and validation") {
  const Thread one = testing::text_thread({"a b. c d. e f."});
  const auto tree = build_sentence_tree(one, ParentVector({0}));
  CHECK(tree.depth == std::vector<int>{0, 1, 2});
  const auto levels = depth_levels(tree);
  REQUIRE(levels.depth_count() == 3);
  for (const auto& l : levels.levels) CHECK(l.size() == 1);

  const Thread chain = testing::text_thread({"a. b.", "c.", "d. e."});
  const auto chain_levels = depth_levels(build_sentence_tree(chain, ParentVector({0, 1, 2})));
  CHECK(chain_levels.depth_count() == 5);

  CHECK_THROWS_AS(build_sentence_tree(chain, ParentVector({0, 1})), ValidationError);
}

TEST_CASE("preorder within a level") {
  // Post 2 and 3 both reply to 1, post 4 replies to 2: the level holding
  // post 4 and post 3's second sentence lists post 4's subtree first.
  const Thread t = testing::text_thread({"a.", "b.", "c. d.", "e."});
  const auto levels = depth_levels(build_sentence_tree(t, ParentVector({0, 1, 1, 2})));
  REQUIRE(levels.depth_count() == 3);
  CHECK(levels.levels[1] == node_ids({1, 2}));
  CHECK(levels.levels[2] == node_ids({4, 3}));
}

TEST_CASE("candidate counts") {
  const std::uint64_t expected[] = {1, 1, 2, 6, 24, 120, 720, 5040};
  for (std::size_t n = 1; n <= 8; ++n) {
    CHECK(count_candidate_trees(n) == expected[n - 1]);
    const auto trees = enumerate_candidate_trees(n);
    CHECK(trees.size() == expected[n - 1]);
    CHECK(std::is_sorted(trees.begin(), trees.end()));
    for (const auto& t : trees) CHECK(ParentVector::is_valid(t.values()));
  }
  CHECK(enumerate_candidate_trees(2) == std::vector<ParentVector>{ParentVector({0, 1})});
  CHECK(enumerate_candidate_trees(5).front().values() == std::vector<int>{0, 1, 1, 1, 1});
  CHECK(enumerate_candidate_trees(5).back().values() == std::vector<int>{0, 1, 2, 3, 4});
  CHECK_THROWS_AS(enumerate_candidate_trees(9), ValidationError);
  CHECK_THROWS_AS(enumerate_candidate_trees(0), ValidationError);
  CHECK(enumerate_candidate_trees(9, 9).size() == 40320);
}

TEST_CASE("enumeration equals the brute-force filter") {
  for (std::size_t n = 1; n <= 6; ++n) {
    CHECK(enumerate_candidate_trees(n) == brute_force_trees(n));
  }
}

TEST_CASE("sampling candidate trees") {
  const ParentVector gold({0, 1, 1, 1, 4});
  CHECK(sample_candidate_trees(2, 5, 1, ParentVector({0, 1})).empty());

  const auto s23 = sample_candidate_trees(5, 23, 1, gold);
  CHECK(s23.size() == 23);
  const std::set<ParentVector> distinct(s23.begin(), s23.end());
  CHECK(distinct.size() == 23);
  CHECK(distinct.count(gold) == 0);

  CHECK(sample_candidate_trees(5, 100, 1, gold).size() == 23);
  CHECK(sample_candidate_trees(5, 100, 1).size() == 24);
  CHECK(sample_candidate_trees(5, 4, 7, gold) == sample_candidate_trees(5, 4, 7, gold));

  // Large spaces go through rejection sampling.
  const auto big = sample_candidate_trees(12, 50, 3);
  CHECK(big.size() == 50);
  CHECK(std::set<ParentVector>(big.begin(), big.end()).size() == 50);
  for (const auto& t : big) CHECK(ParentVector::is_valid(t.values()));
}

TEST_CASE("sampling is close to uniform") {
  std::map<ParentVector, int> counts;
  for (std::uint64_t seed = 0; seed < 6000; ++seed) {
    for (const auto& t : sample_candidate_trees(4, 1, seed)) ++counts[t];
  }
  CHECK(counts.size() == 6);
  for (const auto& [t, c] : counts) {
    CHECK(c > 850);
    CHECK(c < 1150);
  }
}
