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

#ifndef THREADREC_ENTITY_GRID_HPP_
#define THREADREC_ENTITY_GRID_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "threadrec/conversation_tree.hpp"
#include "threadrec/corpus.hpp"

namespace threadrec {

// Token alphabet of a linearized grid. The numeric values index the
// embedding table, so they are part of the model file format.
enum class GridToken : std::uint8_t { kS = 0, kO = 1, kX = 2, kAbsent = 3, kPad = 4 };

inline constexpr std::size_t kGridVocabSize = 5;
inline constexpr std::size_t kDefaultSeqLen = 768;

// "S", "O", "X", "-", "PAD".
const char* grid_token_name(GridToken t);

// Mentions of one sentence, one entry per entity.
//
// Annotated sentences pass their annotations through. Otherwise a verb-pivot
// heuristic stands in for a parser: candidate entities are tokens of length >= 3
// outside a fixed stopword/verb list, with a trailing 's' stripped from words
// of length >= 5. The first candidate before the first verb is the subject,
// the first candidate after it the object, everything else X. Repeated
// entities keep their strongest role (S > O > X). Output is in first-mention
// order.
std::vector<EntityMention> tag_entities(const Sentence& sentence);

// Entity mentions for every sentence of a thread, in node order, plus the
// column order shared by all candidate trees of that thread: mention
// frequency descending, ties broken by first mention.
struct TaggedThread {
  std::vector<std::vector<EntityMention>> mentions;  // per sentence node
  std::vector<std::string> entities;                  // column order
  std::vector<std::vector<std::pair<int, Role>>> by_node;  // (column, role)
};

TaggedThread tag_thread(const Thread& thread);

// Rows are depth levels, columns entities. cells[d][e] holds one role letter
// per sentence at depth d, left to right in level order.
struct ConversationalGrid {
  std::vector<std::string> entities;
  std::vector<std::vector<std::string>> cells;  // [depth][entity]
  DepthLevels levels;

  std::size_t depth_count() const { return cells.size(); }
  std::size_t entity_count() const { return entities.size(); }

  // Column index of an entity, or -1.
  int column_of(const std::string& entity) const;

  // Text table: sentence ids, depth, then one column per entity.
  std::string render() const;
};

ConversationalGrid build_grid(const Thread& thread, const ParentVector& parents);
ConversationalGrid build_grid(const Thread& thread, const TaggedThread& tagged,
                              const ParentVector& parents);

using GridTokenSequence = std::vector<GridToken>;

// Column-major flattening: entity by entity in column order, each entity's
// cells in depth order. Whole trailing columns are dropped until the content
// fits in `length`; the rest is PAD.
GridTokenSequence linearize_grid(const ConversationalGrid& grid,
                                 std::size_t length = kDefaultSeqLen);

// Same result as linearize_grid(build_grid(...)) without materializing cells.
// Used on the hot path where every candidate tree of a thread is scored.
GridTokenSequence grid_sequence(const Thread& thread, const TaggedThread& tagged,
                                const ParentVector& parents,
                                std::size_t length = kDefaultSeqLen);

}  // namespace threadrec

#endif  // THREADREC_ENTITY_GRID_HPP_
