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

#ifndef THREADREC_CORPUS_HPP_
#define THREADREC_CORPUS_HPP_

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace threadrec {

// Grammatical role of an entity in a sentence. Absent renders as '-'.
enum class Role : std::uint8_t { kSubject = 0, kObject = 1, kOther = 2, kAbsent = 3 };

char role_char(Role role);

// Accepts 'S', 'O', 'X' and '-'. Throws ValidationError otherwise.
Role role_from_char(char c);

// Higher wins when one entity is mentioned several times in a sentence.
int role_priority(Role role);

struct EntityMention {
  std::string entity;
  Role role = Role::kOther;

  friend bool operator==(const EntityMention&, const EntityMention&) = default;
};

struct Sentence {
  std::string text;
  std::vector<std::string> tokens;
  std::optional<std::vector<EntityMention>> annotations;

  friend bool operator==(const Sentence&, const Sentence&) = default;
};

struct Post {
  int post_id = 0;
  std::string author;
  std::vector<Sentence> sentences;

  friend bool operator==(const Post&, const Post&) = default;
};

// Reply structure of a thread with n posts. Entry 0 is the root and holds 0;
// entry i (0-based) holds the 1-based id of the post that post i+1 replies to,
// which must lie in 1..i.
class ParentVector {
 public:
  ParentVector() = default;

  // Throws ValidationError unless the vector encodes a chronologically valid
  // tree rooted at post 1.
  explicit ParentVector(std::vector<int> parents);

  // Parents for posts 2..n; the root entry is implied.
  static ParentVector from_replies(const std::vector<int>& replies);

  static bool is_valid(const std::vector<int>& parents);

  std::size_t size() const { return parents_.size(); }
  bool empty() const { return parents_.empty(); }

  // 1-based parent id of the post at 0-based index i; 0 for the root.
  int parent_of(std::size_t i) const { return parents_[i]; }

  const std::vector<int>& values() const { return parents_; }

  // "0,1,1,1,4".
  std::string to_string() const;

  // Accepts "1,1,1,4" (replies only) or "0,1,1,1,4".
  static ParentVector parse(std::string_view text);

  friend bool operator==(const ParentVector&, const ParentVector&) = default;
  friend auto operator<=>(const ParentVector&, const ParentVector&) = default;

 private:
  std::vector<int> parents_;
};

struct Thread {
  std::string thread_id;
  std::vector<Post> posts;
  std::optional<ParentVector> gold_parents;

  std::size_t num_posts() const { return posts.size(); }
  std::size_t num_sentences() const;

  friend bool operator==(const Thread&, const Thread&) = default;
};

struct CorpusSplit {
  std::vector<Thread> train;
  std::vector<Thread> dev;
  std::vector<Thread> test;
};

// Lowercased word tokens. Words are maximal runs of letters, digits,
// apostrophes and non-ASCII bytes; apostrophes at a word boundary are dropped.
std::vector<std::string> tokenize(std::string_view text);

// Rule-based splitter: a sentence ends at a run of '.', '!' or '?', plus any
// closing brackets or quotes, followed by whitespace or end of text, unless
// the run is a single period after a known abbreviation. Fragments without any alphanumeric character are dropped.
std::vector<Sentence> segment_sentences(std::string_view text);

// Sentence with tokens derived from its text.
Sentence make_sentence(std::string text,
                       std::optional<std::vector<EntityMention>> annotations = std::nullopt);

// Checks post ids, sentence presence and gold parents. Throws ValidationError.
void validate_thread(const Thread& thread);

// One thread per line, JSON records. Blank lines are skipped. Throws
// ParseError (with line number) on malformed records and on validation
// failures.
std::vector<Thread> load_corpus(std::istream& in);
std::vector<Thread> load_corpus_file(const std::string& path);

// Single-line JSON record; load_corpus() reads it back to an equal Thread.
std::string serialize_thread(const Thread& thread);
void write_corpus(std::ostream& out, const std::vector<Thread>& threads);
void write_corpus_file(const std::string& path, const std::vector<Thread>& threads);

// Deterministic shuffle by seed, then partition. test_count == nullopt puts
// the remainder into test. Throws ValidationError if the counts exceed the
// corpus size.
CorpusSplit split_corpus(const std::vector<Thread>& corpus, std::size_t train_count,
                         std::size_t dev_count, std::optional<std::size_t> test_count,
                         std::uint64_t seed);

}  // namespace threadrec

#endif  // THREADREC_CORPUS_HPP_
