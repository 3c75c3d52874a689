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

#ifndef THREADREC_SYNTHETIC_HPP_
#define THREADREC_SYNTHETIC_HPP_

#include <cstdint>
#include <vector>

#include "threadrec/corpus.hpp"

namespace threadrec {

// Knobs of the synthetic forum generator.
//
// Every thread gets a gold tree drawn uniformly from the valid trees. A direct
// reply to the first post opens a new branch with its own entity set; deeper
// replies stay in their parent's branch. Sentences carry the branch's entities
// with subject continuity: the subject of a sentence is usually the entity
// the previous sentence (or, for the first sentence of a reply, the last
// sentence of the replied-to post) talked about. Every sentence is also padded
// with words drawn from one shared vocabulary, so lexical overlap between
// posts is a weak cue for the reply structure.
struct GeneratorConfig {
  std::size_t threads = 100;
  std::size_t min_posts = 2;
  std::size_t max_posts = 5;
  std::size_t min_sentences = 2;
  std::size_t max_sentences = 4;
  std::size_t entities_per_branch = 3;
  // Probability that a sentence continues its predecessor's center entity.
  double branch_cohesion = 0.8;
  // Probability per sentence of an extra X-role mention of an entity from
  // another branch of the same thread.
  double cross_talk = 0.4;
  // Shared filler words per sentence, drawn from one global list.
  std::size_t filler_words = 6;

  // Throws ValidationError on empty or inverted ranges and probabilities
  // outside [0, 1].
  void validate() const;
};

// Identical (config, seed) yields identical corpora.
std::vector<Thread> generate_synthetic_corpus(const GeneratorConfig& config,
                                              std::uint64_t seed);

}  // namespace threadrec

#endif  // THREADREC_SYNTHETIC_HPP_
