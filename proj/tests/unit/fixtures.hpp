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

#ifndef THREADREC_TESTS_FIXTURES_HPP_
#define THREADREC_TESTS_FIXTURES_HPP_

#include <string>
#include <vector>

#include "threadrec/corpus.hpp"

namespace threadrec::testing {

inline std::string fixture_path(const std::string& name) {
  return std::string(THREADREC_FIXTURE_DIR) + "/" + name;
}

// The annotated five-post help-forum thread.
inline Thread registry_thread() { return load_corpus_file(fixture_path("registry_thread.jsonl")).at(0); }

// The same thread as raw post text, without annotations.
inline Thread registry_raw_thread() {
  return load_corpus_file(fixture_path("registry_thread.jsonl")).at(1);
}

// A thread of n posts with one sentence each, built from plain text.
inline Thread text_thread(const std::vector<std::string>& texts) {
  Thread t;
  t.thread_id = "t";
  for (std::size_t i = 0; i < texts.size(); ++i) {
    Post p;
    p.post_id = static_cast<int>(i) + 1;
    p.author = "a";
    p.sentences = segment_sentences(texts[i]);
    if (p.sentences.empty()) p.sentences.push_back(make_sentence(""));
    t.posts.push_back(std::move(p));
  }
  return t;
}

}  // namespace threadrec::testing

#endif  // THREADREC_TESTS_FIXTURES_HPP_
