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

#include "threadrec/conversation_tree.hpp"

#include <algorithm>
#include <limits>
#include <set>

#include "threadrec/error.hpp"
#include "threadrec/random.hpp"

namespace threadrec {

SentenceTree build_sentence_tree(const Thread& thread, const ParentVector& parents) {
  const std::size_t n = thread.posts.size();
  if (parents.size() != n) {
    throw ValidationError("parent vector has " + std::to_string(parents.size()) +
                          " entries for a thread of " + std::to_string(n) + " posts");
  }
  if (!ParentVector::is_valid(parents.values())) {
    throw ValidationError("parent vector " + parents.to_string() + " is not a valid tree");
  }

  SentenceTree tree;
  std::vector<int> first(n), last(n);
  for (std::size_t p = 0; p < n; ++p) {
    const std::size_t count = thread.posts[p].sentences.size();
    if (count == 0) {
      throw ValidationError("post " + std::to_string(p + 1) + " has no sentences");
    }
    first[p] = static_cast<int>(tree.nodes.size());
    for (std::size_t s = 0; s < count; ++s) tree.nodes.push_back({p, s});
    last[p] = static_cast<int>(tree.nodes.size()) - 1;
  }

  tree.parent.assign(tree.nodes.size(), -1);
  tree.depth.assign(tree.nodes.size(), 0);
  tree.children.assign(tree.nodes.size(), {});
  for (std::size_t p = 0; p < n; ++p) {
    for (int k = first[p] + 1; k <= last[p]; ++k) tree.parent[k] = k - 1;
    if (p > 0) {
      const auto replied = static_cast<std::size_t>(parents.parent_of(p) - 1);
      tree.parent[first[p]] = last[replied];
    }
  }
  // Parents always precede children in node order, so one forward pass
  // settles depths and keeps child lists sorted.
  for (std::size_t k = 1; k < tree.nodes.size(); ++k) {
    const int par = tree.parent[k];
    tree.depth[k] = tree.depth[par] + 1;
    tree.children[par].push_back(static_cast<int>(k));
  }
  return tree;
}

DepthLevels depth_levels(const SentenceTree& tree) {
  DepthLevels out;
  if (tree.nodes.empty()) return out;
  std::vector<int> stack{0};
  while (!stack.empty()) {
    const int node = stack.back();
    stack.pop_back();
    const auto d = static_cast<std::size_t>(tree.depth[node]);
    if (out.levels.size() <= d) out.levels.resize(d + 1);
    out.levels[d].push_back(node);
    const auto& kids = tree.children[node];
    for (auto it = kids.rbegin(); it != kids.rend(); ++it) stack.push_back(*it);
  }
  return out;
}

std::uint64_t count_candidate_trees(std::size_t n_posts) {
  std::uint64_t count = 1;
  for (std::size_t i = 2; i < n_posts; ++i) {
    if (count > std::numeric_limits<std::uint64_t>::max() / i) {
      return std::numeric_limits<std::uint64_t>::max();
    }
    count *= i;
  }
  return count;
}

std::vector<ParentVector> enumerate_candidate_trees(std::size_t n_posts, std::size_t cap) {
  if (n_posts == 0) throw ValidationError("cannot enumerate trees of an empty thread");
  if (n_posts > cap) {
    throw ValidationError("thread of " + std::to_string(n_posts) +
                          " posts exceeds the enumeration cap of " + std::to_string(cap) +
                          "; use sample_candidate_trees instead");
  }
  std::vector<ParentVector> out;
  out.reserve(count_candidate_trees(n_posts));
  std::vector<int> current(n_posts, 1);
  current[0] = 0;
  // Odometer over parents[i] in 1..i, last position fastest.
  while (true) {
    out.emplace_back(current);
    std::size_t i = n_posts - 1;
    while (i >= 1 && current[i] == static_cast<int>(i)) {
      current[i] = 1;
      --i;
    }
    if (i == 0) return out;
    ++current[i];
  }
}

std::vector<ParentVector> sample_candidate_trees(std::size_t n_posts, std::size_t k,
                                                 std::uint64_t seed,
                                                 const std::optional<ParentVector>& exclude) {
  if (n_posts == 0 || k == 0) return {};
  SplitMix64 rng(seed);
  const std::uint64_t total = count_candidate_trees(n_posts);
  const bool excluded = exclude && exclude->size() == n_posts;
  const std::uint64_t available = total - (excluded ? 1 : 0);

  // Small spaces: shuffle the full list. Otherwise rejection-sample distinct
  // vectors, which stays cheap because k is far below the space size.
  if (n_posts <= kEnumerationCap && available <= 4 * static_cast<std::uint64_t>(k)) {
    auto all = enumerate_candidate_trees(n_posts);
    if (excluded) std::erase(all, *exclude);
    shuffle(std::span<ParentVector>(all), rng);
    if (all.size() > k) all.resize(k);
    return all;
  }

  std::set<std::vector<int>> seen;
  if (excluded) seen.insert(exclude->values());
  std::vector<ParentVector> out;
  std::vector<int> draw(n_posts, 0);
  while (out.size() < k) {
    for (std::size_t i = 1; i < n_posts; ++i) {
      draw[i] = 1 + static_cast<int>(rng.below(i));
    }
    if (seen.insert(draw).second) out.emplace_back(draw);
  }
  return out;
}

}  // namespace threadrec
