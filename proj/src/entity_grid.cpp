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

#include "threadrec/entity_grid.hpp"

#include <algorithm>
#include <sstream>
#include <string_view>
#include <unordered_map>
#include <unordered_set>

namespace threadrec {

const char* grid_token_name(GridToken t) {
  switch (t) {
    case GridToken::kS: return "S";
    case GridToken::kO: return "O";
    case GridToken::kX: return "X";
    case GridToken::kAbsent: return "-";
    case GridToken::kPad: return "PAD";
  }
  return "?";
}

namespace {

// Function words, pronouns, and frequent adjectives/adverbs. None of these
// can head an entity.
const std::unordered_set<std::string_view>& stopwords() {
  static const std::unordered_set<std::string_view> words = {
      "the", "and", "but", "for", "nor", "yet", "you", "your", "yours", "she",
      "her", "hers", "him", "his", "its", "it's", "they", "them", "their", "our",
      "ours", "this", "that", "these", "those", "there", "here", "what", "which",
      "who", "whom", "whose", "when", "where", "why", "how", "all", "any", "both",
      "each", "few", "more", "most", "other", "some", "such", "only", "own",
      "same", "than", "too", "very", "can", "will", "just", "don't", "should",
      "now", "not", "with", "from", "into", "onto", "upon", "about", "above",
      "below", "over", "under", "again", "then", "once", "also", "because",
      "while", "until", "after", "before", "since", "though", "although",
      "if", "else", "off", "out", "via", "per", "one", "two", "three", "any",
      "anything", "something", "nothing", "everything", "someone", "anyone",
      "everyone", "way", "lot", "lots", "bit", "thanks", "thank", "please",
      "free", "good", "great", "new", "old", "big", "small", "less", "much",
      "many", "pretty", "safe", "sure", "well", "still", "even", "really",
      "further", "somewhat", "doubtful", "faster", "fast", "slow", "better",
      "best", "bad", "worse", "worst", "able", "likely", "expensive", "cheap",
      "hardcore", "automatic", "aside", "no", "yes", "okay", "ok", "i'm", "im",
      "i've", "i'll", "i'd", "you're", "you've", "we're", "they're", "that's",
      "there's", "can't", "won't", "didn't", "doesn't", "isn't", "wasn't",
      "would", "could", "might", "must", "shall", "may", "guyz", "guys",
      "already", "almost", "always", "never", "often", "sometimes", "maybe",
      "perhaps", "probably", "right", "left", "first", "last", "next", "own",
      "another", "every", "either", "neither", "whether", "within", "without",
      "through", "during", "across", "along", "around", "between", "behind",
      "beyond", "toward", "towards", "against", "among", "like", "unlike",
      "yourself", "myself", "itself", "themselves", "ourselves", "himself",
      "herself", "mine", "ever", "quite", "rather", "instead", "however"};
  return words;
}

// Verb forms that anchor the subject/object split.
const std::unordered_set<std::string_view>& verbs() {
  static const std::unordered_set<std::string_view> words = {
      "is", "are", "was", "were", "be", "been", "being", "am", "has", "have",
      "had", "do", "does", "did", "use", "uses", "used", "using", "try", "tries",
      "tried", "get", "gets", "got", "make", "makes", "made", "need", "needs",
      "needed", "want", "wants", "wanted", "clean", "cleans", "cleaned",
      "delete", "deletes", "deleted", "install", "installs", "installed",
      "uninstall", "uninstalls", "uninstalled", "run", "runs", "ran", "check",
      "checks", "checked", "found", "find", "finds", "fix", "fixes", "fixed",
      "work", "works", "worked", "help", "helps", "helped", "suggest",
      "suggests", "suggested", "mentioned", "mention", "mentions", "tend",
      "cure", "cures", "cured", "compress", "compressed", "uncompress",
      "suffer", "suffers", "suffered", "left", "having", "think", "thinks",
      "thought", "know", "knows", "knew", "see", "sees", "saw", "seen", "say",
      "says", "said", "go", "goes", "went", "gone", "take", "takes", "took",
      "taken", "give", "gives", "gave", "given", "put", "puts", "set", "sets",
      "keep", "keeps", "kept", "let", "lets", "seem", "seems", "seemed",
      "look", "looks", "looked", "update", "updates", "updated", "replace",
      "replaces", "replaced", "restart", "restarts", "restarted", "download",
      "downloads", "downloaded", "open", "opens", "opened", "remove", "removes",
      "removed", "crash", "crashed", "boot", "boots", "booted", "recommend",
      "recommends", "recommended", "show", "shows", "showed", "shown", "call",
      "calls", "called", "change", "changes", "changed", "depending"};
  return words;
}

std::string normalize_entity(std::string_view token) {
  std::string e(token);
  if (e.size() >= 5 && e.back() == 's') e.pop_back();
  return e;
}

void add_mention(std::vector<EntityMention>& out, std::string entity, Role role) {
  for (auto& m : out) {
    if (m.entity == entity) {
      if (role_priority(role) > role_priority(m.role)) m.role = role;
      return;
    }
  }
  out.push_back({std::move(entity), role});
}

}  // namespace

std::vector<EntityMention> tag_entities(const Sentence& sentence) {
  std::vector<EntityMention> out;
  if (sentence.annotations) {
    for (const auto& m : *sentence.annotations) add_mention(out, m.entity, m.role);
    return out;
  }
  bool seen_verb = false;
  bool subject_taken = false;
  bool object_taken = false;
  for (const auto& token : sentence.tokens) {
    if (verbs().contains(token)) {
      seen_verb = true;
      continue;
    }
    if (token.size() < 3 || stopwords().contains(token)) continue;
    if (std::all_of(token.begin(), token.end(),
                    [](unsigned char c) { return c >= '0' && c <= '9'; })) {
      continue;
    }
    Role role = Role::kOther;
    if (!seen_verb && !subject_taken) {
      role = Role::kSubject;
      subject_taken = true;
    } else if (seen_verb && !object_taken) {
      role = Role::kObject;
      object_taken = true;
    }
    add_mention(out, normalize_entity(token), role);
  }
  // A subject is only a subject if a verb follows it.
  if (!seen_verb) {
    for (auto& m : out) m.role = Role::kOther;
  }
  return out;
}

TaggedThread tag_thread(const Thread& thread) {
  TaggedThread tagged;
  std::unordered_map<std::string, std::size_t> first_seen;
  std::unordered_map<std::string, std::size_t> frequency;
  for (const auto& post : thread.posts) {
    for (const auto& sentence : post.sentences) {
      auto mentions = tag_entities(sentence);
      for (const auto& m : mentions) {
        first_seen.try_emplace(m.entity, first_seen.size());
        ++frequency[m.entity];
      }
      tagged.mentions.push_back(std::move(mentions));
    }
  }
  tagged.entities.reserve(first_seen.size());
  for (const auto& [entity, order] : first_seen) tagged.entities.push_back(entity);
  std::sort(tagged.entities.begin(), tagged.entities.end(),
            [&](const std::string& a, const std::string& b) {
              const auto fa = frequency.at(a), fb = frequency.at(b);
              if (fa != fb) return fa > fb;
              return first_seen.at(a) < first_seen.at(b);
            });
  std::unordered_map<std::string, int> column;
  for (std::size_t c = 0; c < tagged.entities.size(); ++c) {
    column[tagged.entities[c]] = static_cast<int>(c);
  }
  tagged.by_node.resize(tagged.mentions.size());
  for (std::size_t k = 0; k < tagged.mentions.size(); ++k) {
    for (const auto& m : tagged.mentions[k]) {
      tagged.by_node[k].emplace_back(column.at(m.entity), m.role);
    }
  }
  return tagged;
}

int ConversationalGrid::column_of(const std::string& entity) const {
  auto it = std::find(entities.begin(), entities.end(), entity);
  return it == entities.end() ? -1 : static_cast<int>(it - entities.begin());
}

std::string ConversationalGrid::render() const {
  std::vector<std::string> row_labels;
  std::size_t label_width = 4;
  for (const auto& level : levels.levels) {
    std::string label;
    for (int node : level) {
      if (!label.empty()) label += ' ';
      label += 's' + std::to_string(node);
    }
    label_width = std::max(label_width, label.size());
    row_labels.push_back(std::move(label));
  }
  std::vector<std::size_t> widths(entities.size());
  for (std::size_t e = 0; e < entities.size(); ++e) {
    widths[e] = entities[e].size();
    for (const auto& row : cells) widths[e] = std::max(widths[e], row[e].size());
  }
  std::ostringstream out;
  auto pad = [&](const std::string& s, std::size_t w) {
    out << s << std::string(w - std::min(w, s.size()), ' ');
  };
  pad("tree", label_width);
  out << " | depth |";
  for (std::size_t e = 0; e < entities.size(); ++e) {
    out << ' ';
    std::string upper = entities[e];
    for (auto& c : upper) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    pad(upper, widths[e]);
  }
  out << '\n';
  for (std::size_t d = 0; d < cells.size(); ++d) {
    pad(row_labels[d], label_width);
    std::string depth = std::to_string(d);
    out << " | " << std::string(5 - std::min<std::size_t>(5, depth.size()), ' ') << depth
        << " |";
    for (std::size_t e = 0; e < entities.size(); ++e) {
      out << ' ';
      pad(cells[d][e], widths[e]);
    }
    out << '\n';
  }
  return out.str();
}

ConversationalGrid build_grid(const Thread& thread, const ParentVector& parents) {
  return build_grid(thread, tag_thread(thread), parents);
}

ConversationalGrid build_grid(const Thread& thread, const TaggedThread& tagged,
                              const ParentVector& parents) {
  ConversationalGrid grid;
  grid.entities = tagged.entities;
  grid.levels = depth_levels(build_sentence_tree(thread, parents));
  grid.cells.resize(grid.levels.depth_count());
  for (std::size_t d = 0; d < grid.levels.depth_count(); ++d) {
    const auto& level = grid.levels.levels[d];
    auto& row = grid.cells[d];
    row.assign(grid.entities.size(), std::string(level.size(), '-'));
    for (std::size_t pos = 0; pos < level.size(); ++pos) {
      for (const auto& [col, role] : tagged.by_node[level[pos]]) {
        row[col][pos] = role_char(role);
      }
    }
  }
  return grid;
}

namespace {

GridToken token_of(char c) {
  switch (c) {
    case 'S': return GridToken::kS;
    case 'O': return GridToken::kO;
    case 'X': return GridToken::kX;
    default: return GridToken::kAbsent;
  }
}

GridToken token_of(Role r) {
  switch (r) {
    case Role::kSubject: return GridToken::kS;
    case Role::kObject: return GridToken::kO;
    case Role::kOther: return GridToken::kX;
    case Role::kAbsent: return GridToken::kAbsent;
  }
  return GridToken::kAbsent;
}

}  // namespace

GridTokenSequence linearize_grid(const ConversationalGrid& grid, std::size_t length) {
  GridTokenSequence seq;
  seq.reserve(length);
  for (std::size_t e = 0; e < grid.entity_count(); ++e) {
    std::size_t column_size = 0;
    for (const auto& row : grid.cells) column_size += row[e].size();
    if (seq.size() + column_size > length) break;
    for (const auto& row : grid.cells) {
      for (char c : row[e]) seq.push_back(token_of(c));
    }
  }
  seq.resize(length, GridToken::kPad);
  return seq;
}

GridTokenSequence grid_sequence(const Thread& thread, const TaggedThread& tagged,
                                const ParentVector& parents, std::size_t length) {
  const DepthLevels levels = depth_levels(build_sentence_tree(thread, parents));
  std::vector<int> order;
  order.reserve(tagged.mentions.size());
  for (const auto& level : levels.levels) order.insert(order.end(), level.begin(), level.end());

  const std::size_t n_sentences = order.size();
  GridTokenSequence seq(length, GridToken::kPad);
  if (n_sentences == 0) return seq;
  const std::size_t kept = std::min(tagged.entities.size(), length / n_sentences);
  for (std::size_t c = 0; c < kept; ++c) {
    std::fill_n(seq.begin() + static_cast<std::ptrdiff_t>(c * n_sentences), n_sentences,
                GridToken::kAbsent);
  }
  for (std::size_t pos = 0; pos < n_sentences; ++pos) {
    for (const auto& [col, role] : tagged.by_node[order[pos]]) {
      if (static_cast<std::size_t>(col) < kept) {
        seq[static_cast<std::size_t>(col) * n_sentences + pos] = token_of(role);
      }
    }
  }
  return seq;
}

}  // namespace threadrec
