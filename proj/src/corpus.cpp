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

#include "threadrec/corpus.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "json.hpp"
#include "threadrec/error.hpp"
#include "threadrec/random.hpp"

namespace threadrec {

using json = nlohmann::json;

char role_char(Role role) {
  switch (role) {
    case Role::kSubject: return 'S';
    case Role::kObject: return 'O';
    case Role::kOther: return 'X';
    case Role::kAbsent: return '-';
  }
  return '-';
}

Role role_from_char(char c) {
  switch (c) {
    case 'S': return Role::kSubject;
    case 'O': return Role::kObject;
    case 'X': return Role::kOther;
    case '-': return Role::kAbsent;
    default: break;
  }
  throw ValidationError(std::string("unknown role letter '") + c + "'");
}

int role_priority(Role role) {
  switch (role) {
    case Role::kSubject: return 3;
    case Role::kObject: return 2;
    case Role::kOther: return 1;
    case Role::kAbsent: return 0;
  }
  return 0;
}

// ParentVector

bool ParentVector::is_valid(const std::vector<int>& parents) {
  if (parents.empty() || parents[0] != 0) return false;
  for (std::size_t i = 1; i < parents.size(); ++i) {
    if (parents[i] < 1 || static_cast<std::size_t>(parents[i]) > i) return false;
  }
  return true;
}

ParentVector::ParentVector(std::vector<int> parents) : parents_(std::move(parents)) {
  if (parents_.empty()) throw ValidationError("parent vector is empty");
  if (parents_[0] != 0) throw ValidationError("post 1 must be the root");
  for (std::size_t i = 1; i < parents_.size(); ++i) {
    if (parents_[i] < 1 || static_cast<std::size_t>(parents_[i]) > i) {
      throw ValidationError("post " + std::to_string(i + 1) + " replies to post " +
                            std::to_string(parents_[i]) +
                            ", which is not an earlier post");
    }
  }
}

ParentVector ParentVector::from_replies(const std::vector<int>& replies) {
  std::vector<int> parents;
  parents.reserve(replies.size() + 1);
  parents.push_back(0);
  parents.insert(parents.end(), replies.begin(), replies.end());
  return ParentVector(std::move(parents));
}

std::string ParentVector::to_string() const {
  std::string out;
  for (std::size_t i = 0; i < parents_.size(); ++i) {
    if (i > 0) out += ',';
    out += std::to_string(parents_[i]);
  }
  return out;
}

ParentVector ParentVector::parse(std::string_view text) {
  std::vector<int> values;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t comma = text.find(',', pos);
    if (comma == std::string_view::npos) comma = text.size();
    std::string_view field = text.substr(pos, comma - pos);
    while (!field.empty() && std::isspace(static_cast<unsigned char>(field.front()))) {
      field.remove_prefix(1);
    }
    while (!field.empty() && std::isspace(static_cast<unsigned char>(field.back()))) {
      field.remove_suffix(1);
    }
    int value = 0;
    auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (field.empty() || ec != std::errc() || ptr != field.data() + field.size()) {
      throw ValidationError("malformed parent list '" + std::string(text) + "'");
    }
    values.push_back(value);
    pos = comma + 1;
  }
  if (!values.empty() && values[0] == 0) return ParentVector(std::move(values));
  return from_replies(values);
}

std::size_t Thread::num_sentences() const {
  std::size_t n = 0;
  for (const auto& post : posts) n += post.sentences.size();
  return n;
}

// Text

namespace {

bool is_word_byte(unsigned char c) {
  return std::isalnum(c) || c == '\'' || c >= 0x80;
}

bool has_alnum(std::string_view text) {
  return std::any_of(text.begin(), text.end(), [](unsigned char c) {
    return std::isalnum(c) || c >= 0x80;
  });
}

constexpr std::array<std::string_view, 17> kAbbreviations = {
    "mr", "mrs", "ms", "dr", "prof", "sr", "jr", "st", "vs",
    "etc", "e.g", "i.e", "inc", "ltd", "co", "approx", "fig"};

bool is_abbreviation(std::string_view word) {
  std::string lower;
  for (unsigned char c : word) lower += static_cast<char>(std::tolower(c));
  return std::find(kAbbreviations.begin(), kAbbreviations.end(), lower) !=
         kAbbreviations.end();
}

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

}  // namespace

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  auto flush = [&] {
    std::size_t b = 0, e = current.size();
    while (b < e && current[b] == '\'') ++b;
    while (e > b && current[e - 1] == '\'') --e;
    if (e > b) tokens.emplace_back(current.substr(b, e - b));
    current.clear();
  };
  for (unsigned char c : text) {
    if (is_word_byte(c)) {
      current += static_cast<char>(c < 0x80 ? std::tolower(c) : c);
    } else {
      flush();
    }
  }
  flush();
  return tokens;
}

Sentence make_sentence(std::string text,
                       std::optional<std::vector<EntityMention>> annotations) {
  Sentence s;
  s.tokens = tokenize(text);
  s.text = std::move(text);
  s.annotations = std::move(annotations);
  return s;
}

std::vector<Sentence> segment_sentences(std::string_view text) {
  std::vector<Sentence> out;
  std::size_t start = 0;
  std::size_t i = 0;
  auto emit = [&](std::size_t end) {
    std::string piece = trim(text.substr(start, end - start));
    if (has_alnum(piece)) out.push_back(make_sentence(std::move(piece)));
  };
  while (i < text.size()) {
    const char c = text[i];
    if (c != '.' && c != '!' && c != '?') {
      ++i;
      continue;
    }
    std::size_t run_end = i;
    while (run_end < text.size() &&
           (text[run_end] == '.' || text[run_end] == '!' || text[run_end] == '?')) {
      ++run_end;
    }
    const bool single_period = c == '.' && run_end == i + 1;
    // Closing brackets and quotes stay with the sentence they end.
    while (run_end < text.size() && (text[run_end] == ')' || text[run_end] == ']' ||
                                     text[run_end] == '"' || text[run_end] == '\'')) {
      ++run_end;
    }
    bool split =
        run_end == text.size() || std::isspace(static_cast<unsigned char>(text[run_end]));
    if (split && single_period) {
      // Word immediately before the period, e.g. "etc" or "e.g".
      std::size_t w = i;
      while (w > start && !std::isspace(static_cast<unsigned char>(text[w - 1])) &&
             text[w - 1] != '(') {
        --w;
      }
      if (is_abbreviation(text.substr(w, i - w))) split = false;
    }
    if (split) {
      emit(run_end);
      start = run_end;
    }
    i = run_end;
  }
  if (start < text.size()) emit(text.size());
  return out;
}

// Validation

void validate_thread(const Thread& thread) {
  if (thread.posts.empty()) {
    throw ValidationError("thread '" + thread.thread_id + "' has no posts");
  }
  for (std::size_t i = 0; i < thread.posts.size(); ++i) {
    const Post& post = thread.posts[i];
    if (post.post_id != static_cast<int>(i) + 1) {
      throw ValidationError("thread '" + thread.thread_id +
                            "': post ids must be consecutive from 1, found " +
                            std::to_string(post.post_id) + " at position " +
                            std::to_string(i + 1));
    }
    if (post.sentences.empty()) {
      throw ValidationError("thread '" + thread.thread_id + "': post " +
                            std::to_string(post.post_id) + " has no sentences");
    }
    for (const auto& sentence : post.sentences) {
      if (!sentence.annotations) continue;
      for (const auto& m : *sentence.annotations) {
        if (m.entity.empty()) {
          throw ValidationError("thread '" + thread.thread_id + "': empty entity");
        }
        if (m.role == Role::kAbsent) {
          throw ValidationError("thread '" + thread.thread_id +
                                "': annotation role must be S, O or X");
        }
      }
    }
  }
  if (thread.gold_parents) {
    if (thread.gold_parents->size() != thread.posts.size()) {
      throw ValidationError("thread '" + thread.thread_id + "': " +
                            std::to_string(thread.gold_parents->size()) +
                            " parents for " + std::to_string(thread.posts.size()) +
                            " posts");
    }
    if (!ParentVector::is_valid(thread.gold_parents->values())) {
      throw ValidationError("thread '" + thread.thread_id +
                            "': gold parents violate chronological order");
    }
  }
}

// Records

namespace {

std::string lowercase(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

std::vector<EntityMention> parse_annotations(const json& arr) {
  if (!arr.is_array()) throw ValidationError("annotations must be an array");
  std::vector<EntityMention> mentions;
  for (const auto& item : arr) {
    if (!item.is_array() || item.size() != 2 || !item[0].is_string() ||
        !item[1].is_string()) {
      throw ValidationError("annotation must be [entity, role]");
    }
    const auto role_text = item[1].get<std::string>();
    if (role_text.size() != 1 || role_text == "-") {
      throw ValidationError("annotation role must be one of S, O, X");
    }
    EntityMention m;
    m.entity = lowercase(item[0].get<std::string>());
    if (m.entity.empty()) throw ValidationError("annotation entity is empty");
    m.role = role_from_char(role_text[0]);
    mentions.push_back(std::move(m));
  }
  return mentions;
}

Post parse_post(const json& rec) {
  if (!rec.is_object()) throw ValidationError("post must be an object");
  Post post;
  if (!rec.contains("post_id") || !rec["post_id"].is_number_integer()) {
    throw ValidationError("post_id missing or not an integer");
  }
  post.post_id = rec["post_id"].get<int>();
  if (rec.contains("author")) {
    if (!rec["author"].is_string()) throw ValidationError("author must be a string");
    post.author = rec["author"].get<std::string>();
  }
  if (rec.contains("sentences")) {
    const auto& sentences = rec["sentences"];
    if (!sentences.is_array()) throw ValidationError("sentences must be an array");
    for (const auto& s : sentences) {
      if (s.is_string()) {
        post.sentences.push_back(make_sentence(s.get<std::string>()));
        continue;
      }
      if (!s.is_object() || !s.contains("text") || !s["text"].is_string()) {
        throw ValidationError("sentence must be an object with a text field");
      }
      std::optional<std::vector<EntityMention>> annotations;
      if (s.contains("annotations") && !s["annotations"].is_null()) {
        annotations = parse_annotations(s["annotations"]);
      }
      post.sentences.push_back(make_sentence(s["text"].get<std::string>(),
                                             std::move(annotations)));
    }
  } else if (rec.contains("text")) {
    if (!rec["text"].is_string()) throw ValidationError("text must be a string");
    post.sentences = segment_sentences(rec["text"].get<std::string>());
  } else {
    throw ValidationError("post needs either text or sentences");
  }
  // A post without any sentence still occupies a node in the conversation
  // tree.
  if (post.sentences.empty()) post.sentences.push_back(make_sentence(""));
  return post;
}

Thread parse_thread(const json& rec) {
  if (!rec.is_object()) throw ValidationError("record must be a JSON object");
  Thread thread;
  if (!rec.contains("thread_id")) throw ValidationError("thread_id missing");
  const auto& id = rec["thread_id"];
  if (id.is_string()) {
    thread.thread_id = id.get<std::string>();
  } else if (id.is_number_integer()) {
    thread.thread_id = std::to_string(id.get<long long>());
  } else {
    throw ValidationError("thread_id must be a string");
  }
  if (!rec.contains("posts") || !rec["posts"].is_array()) {
    throw ValidationError("posts missing or not an array");
  }
  for (const auto& p : rec["posts"]) thread.posts.push_back(parse_post(p));
  if (rec.contains("parents") && !rec["parents"].is_null()) {
    const auto& parents = rec["parents"];
    if (!parents.is_array()) throw ValidationError("parents must be an array");
    std::vector<int> values;
    for (const auto& v : parents) {
      if (v.is_null()) {
        values.push_back(0);
      } else if (v.is_number_integer()) {
        values.push_back(v.get<int>());
      } else {
        throw ValidationError("parents entries must be integers or null");
      }
    }
    if (values.size() != thread.posts.size()) {
      throw ValidationError(std::to_string(values.size()) + " parents for " +
                            std::to_string(thread.posts.size()) + " posts");
    }
    // Throws with the offending post when chronology is violated.
    thread.gold_parents = ParentVector(std::move(values));
  }
  validate_thread(thread);
  return thread;
}

}  // namespace

std::vector<Thread> load_corpus(std::istream& in) {
  std::vector<Thread> threads;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    json rec;
    try {
      rec = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ParseError(line_no, std::string("malformed record: ") + e.what());
    }
    try {
      threads.push_back(parse_thread(rec));
    } catch (const ValidationError& e) {
      throw ParseError(line_no, e.what());
    } catch (const json::exception& e) {
      throw ParseError(line_no, e.what());
    }
  }
  if (in.bad()) throw IoError("read error after line " + std::to_string(line_no));
  return threads;
}

std::vector<Thread> load_corpus_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  return load_corpus(in);
}

std::string serialize_thread(const Thread& thread) {
  json rec;
  rec["thread_id"] = thread.thread_id;
  json posts = json::array();
  for (const auto& post : thread.posts) {
    json p;
    p["post_id"] = post.post_id;
    p["author"] = post.author;
    json sentences = json::array();
    for (const auto& s : post.sentences) {
      json js;
      js["text"] = s.text;
      if (s.annotations) {
        json ann = json::array();
        for (const auto& m : *s.annotations) {
          ann.push_back(json::array({m.entity, std::string(1, role_char(m.role))}));
        }
        js["annotations"] = std::move(ann);
      }
      sentences.push_back(std::move(js));
    }
    p["sentences"] = std::move(sentences);
    posts.push_back(std::move(p));
  }
  rec["posts"] = std::move(posts);
  if (thread.gold_parents) {
    json parents = json::array();
    for (int v : thread.gold_parents->values()) {
      if (v == 0) {
        parents.push_back(nullptr);
      } else {
        parents.push_back(v);
      }
    }
    rec["parents"] = std::move(parents);
  }
  return rec.dump();
}

void write_corpus(std::ostream& out, const std::vector<Thread>& threads) {
  for (const auto& t : threads) out << serialize_thread(t) << '\n';
}

void write_corpus_file(const std::string& path, const std::vector<Thread>& threads) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  write_corpus(out, threads);
  out.flush();
  if (!out) throw IoError("write to '" + path + "' failed");
}

CorpusSplit split_corpus(const std::vector<Thread>& corpus, std::size_t train_count,
                         std::size_t dev_count, std::optional<std::size_t> test_count,
                         std::uint64_t seed) {
  const std::size_t fixed = train_count + dev_count + test_count.value_or(0);
  if (fixed > corpus.size()) {
    throw ValidationError("split counts (" + std::to_string(fixed) +
                          ") exceed corpus size (" + std::to_string(corpus.size()) + ")");
  }
  std::vector<std::size_t> order(corpus.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  SplitMix64 rng(seed);
  shuffle(std::span<std::size_t>(order), rng);

  const std::size_t test_end =
      test_count ? train_count + dev_count + *test_count : corpus.size();
  CorpusSplit split;
  for (std::size_t i = 0; i < test_end; ++i) {
    const Thread& t = corpus[order[i]];
    if (i < train_count) {
      split.train.push_back(t);
    } else if (i < train_count + dev_count) {
      split.dev.push_back(t);
    } else {
      split.test.push_back(t);
    }
  }
  return split;
}

}  // namespace threadrec
