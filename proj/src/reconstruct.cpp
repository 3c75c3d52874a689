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

#include "threadrec/reconstruct.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>

#include "json.hpp"
#include "threadrec/conversation_tree.hpp"
#include "threadrec/entity_grid.hpp"
#include "threadrec/error.hpp"

namespace threadrec {

using json = nlohmann::json;

std::string strategy_name(StrategyKind kind) {
  switch (kind) {
    case StrategyKind::kGridCnn: return "grid-cnn";
    case StrategyKind::kAllPrevious: return "all-previous";
    case StrategyKind::kAllFirst: return "all-first";
    case StrategyKind::kCosSim: return "cos-sim";
  }
  return "unknown";
}

StrategyKind parse_strategy(const std::string& name) {
  for (auto kind : {StrategyKind::kGridCnn, StrategyKind::kAllPrevious,
                    StrategyKind::kAllFirst, StrategyKind::kCosSim}) {
    if (strategy_name(kind) == name) return kind;
  }
  throw ValidationError("unknown strategy '" + name + "'");
}

Prediction predict_grid_cnn(const CoherenceModel& model, const Thread& thread) {
  const std::size_t n = thread.num_posts();
  if (n > kEnumerationCap) {
    throw ValidationError("thread '" + thread.thread_id + "' has " + std::to_string(n) +
                          " posts; grid-cnn prediction enumerates at most " +
                          std::to_string(kEnumerationCap) +
                          " (beam or sampled search is not supported)");
  }
  Prediction pred{thread.thread_id, {}, std::nullopt};
  const auto candidates = enumerate_candidate_trees(n);
  if (candidates.size() == 1) {
    pred.parents = candidates.front();
    return pred;
  }
  const TaggedThread tagged = tag_thread(thread);
  const std::size_t length = model.hyper_params().seq_len;
  std::size_t best = 0;
  double best_score = 0.0;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const double s = model.score(grid_sequence(thread, tagged, candidates[i], length));
    // Strict comparison keeps the earliest (lexicographically smallest) tie.
    if (i == 0 || s > best_score) {
      best = i;
      best_score = s;
    }
  }
  pred.parents = candidates[best];
  pred.score = best_score;
  return pred;
}

ParentVector predict_all_previous(const Thread& thread) {
  std::vector<int> parents(thread.num_posts());
  for (std::size_t i = 1; i < parents.size(); ++i) parents[i] = static_cast<int>(i);
  return ParentVector(std::move(parents));
}

ParentVector predict_all_first(const Thread& thread) {
  std::vector<int> parents(thread.num_posts(), 1);
  if (!parents.empty()) parents[0] = 0;
  return ParentVector(std::move(parents));
}

TermVector term_vector(const Post& post) {
  TermVector tv;
  for (const auto& s : post.sentences) {
    for (const auto& t : s.tokens) tv[t] += 1.0;
  }
  return tv;
}

double cosine(const TermVector& u, const TermVector& v) {
  double dot = 0.0, nu = 0.0, nv = 0.0;
  for (const auto& [t, c] : u) nu += c * c;
  for (const auto& [t, c] : v) nv += c * c;
  if (nu == 0.0 || nv == 0.0) return 0.0;
  // Both maps are sorted; walk them in step.
  auto a = u.begin();
  auto b = v.begin();
  while (a != u.end() && b != v.end()) {
    if (a->first < b->first) {
      ++a;
    } else if (b->first < a->first) {
      ++b;
    } else {
      dot += a->second * b->second;
      ++a;
      ++b;
    }
  }
  return dot / (std::sqrt(nu) * std::sqrt(nv));
}

ParentVector predict_cos_sim(const Thread& thread) {
  const std::size_t n = thread.num_posts();
  std::vector<TermVector> vectors;
  vectors.reserve(n);
  for (const auto& post : thread.posts) vectors.push_back(term_vector(post));
  std::vector<int> parents(n, 0);
  for (std::size_t i = 1; i < n; ++i) {
    parents[i] = static_cast<int>(i);
    if (vectors[i].empty()) continue;
    double best = -1.0;
    for (std::size_t j = 0; j < i; ++j) {
      const double c = cosine(vectors[i], vectors[j]);
      if (c >= best) {
        best = c;
        parents[i] = static_cast<int>(j) + 1;
      }
    }
  }
  return ParentVector(std::move(parents));
}

Prediction predict(StrategyKind kind, const Thread& thread, const CoherenceModel* model) {
  switch (kind) {
    case StrategyKind::kGridCnn:
      if (model == nullptr) throw ValidationError("grid-cnn prediction needs a model");
      return predict_grid_cnn(*model, thread);
    case StrategyKind::kAllPrevious:
      return {thread.thread_id, predict_all_previous(thread), std::nullopt};
    case StrategyKind::kAllFirst:
      return {thread.thread_id, predict_all_first(thread), std::nullopt};
    case StrategyKind::kCosSim:
      return {thread.thread_id, predict_cos_sim(thread), std::nullopt};
  }
  throw ValidationError("unknown strategy");
}

std::vector<Prediction> predict_all(StrategyKind kind, const std::vector<Thread>& threads,
                                    const CoherenceModel* model) {
  std::vector<Prediction> out;
  out.reserve(threads.size());
  for (const auto& t : threads) out.push_back(predict(kind, t, model));
  return out;
}

std::string serialize_prediction(const Prediction& p, const std::string& strategy) {
  json rec;
  rec["thread_id"] = p.thread_id;
  rec["strategy"] = strategy;
  json parents = json::array();
  for (int v : p.parents.values()) {
    if (v == 0) {
      parents.push_back(nullptr);
    } else {
      parents.push_back(v);
    }
  }
  rec["parents"] = std::move(parents);
  if (p.score) rec["score"] = *p.score;
  return rec.dump();
}

void write_predictions(std::ostream& out, const std::vector<Prediction>& preds,
                       const std::string& strategy) {
  for (const auto& p : preds) out << serialize_prediction(p, strategy) << '\n';
}

PredictionFile read_predictions(std::istream& in) {
  PredictionFile file;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const json rec = json::parse(line);
      Prediction p;
      const auto& id = rec.at("thread_id");
      p.thread_id = id.is_string() ? id.get<std::string>() : std::to_string(id.get<long long>());
      std::vector<int> parents;
      for (const auto& v : rec.at("parents")) parents.push_back(v.is_null() ? 0 : v.get<int>());
      p.parents = ParentVector(std::move(parents));
      if (rec.contains("score") && rec["score"].is_number()) p.score = rec["score"].get<double>();
      if (rec.contains("strategy") && rec["strategy"].is_string() && file.strategy.empty()) {
        file.strategy = rec["strategy"].get<std::string>();
      }
      file.predictions.push_back(std::move(p));
    } catch (const json::exception& e) {
      throw ParseError(line_no, std::string("malformed prediction: ") + e.what());
    } catch (const ValidationError& e) {
      throw ParseError(line_no, e.what());
    }
  }
  return file;
}

PredictionFile read_predictions_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  return read_predictions(in);
}

}  // namespace threadrec
