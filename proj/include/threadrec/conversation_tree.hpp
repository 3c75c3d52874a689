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

#ifndef THREADREC_CONVERSATION_TREE_HPP_
#define THREADREC_CONVERSATION_TREE_HPP_

#include <cstdint>
#include <optional>
#include <vector>

#include "threadrec/corpus.hpp"

namespace threadrec {

// Largest thread for which every candidate tree is enumerated (7! = 5040).
inline constexpr std::size_t kEnumerationCap = 8;

struct SentenceRef {
  std::size_t post = 0;      // 0-based post index
  std::size_t sentence = 0;  // 0-based index within the post

  friend bool operator==(const SentenceRef&, const SentenceRef&) = default;
};

// Sentence-level conversation tree. Node k is the k-th sentence of the thread
// in reading order (post by post), so node ids match the s0, s1, ... numbering
// of a thread listing. Sentences of one post are chained; the first sentence
// of a reply hangs off the last sentence of the post it replies to.
struct SentenceTree {
  std::vector<SentenceRef> nodes;
  std::vector<int> parent;  // -1 for the root
  std::vector<int> depth;
  std::vector<std::vector<int>> children;  // ascending node id

  std::size_t size() const { return nodes.size(); }
};

// levels[d] lists the nodes at depth d. Within a level, nodes appear in
// pre-order of the tree with children visited by ascending post id, i.e.
// branches in order of their earliest post.
struct DepthLevels {
  std::vector<std::vector<int>> levels;

  std::size_t depth_count() const { return levels.size(); }
};

// Throws ValidationError if parents do not fit the thread.
SentenceTree build_sentence_tree(const Thread& thread, const ParentVector& parents);

DepthLevels depth_levels(const SentenceTree& tree);

// (n-1)! saturated at UINT64_MAX.
std::uint64_t count_candidate_trees(std::size_t n_posts);

// Every valid parent vector for n posts, in lexicographic order. Throws
// ValidationError when n is 0 or above `cap`.
std::vector<ParentVector> enumerate_candidate_trees(std::size_t n_posts,
                                                    std::size_t cap = kEnumerationCap);

// Up to k distinct valid trees drawn uniformly without replacement, never
// returning `exclude`. Fewer are returned only when the candidate space is
// exhausted. Deterministic given seed.
std::vector<ParentVector> sample_candidate_trees(
    std::size_t n_posts, std::size_t k, std::uint64_t seed,
    const std::optional<ParentVector>& exclude = std::nullopt);

}  // namespace threadrec

#endif  // THREADREC_CONVERSATION_TREE_HPP_
