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

#include "threadrec/evaluation.hpp"

#include <cstdio>
#include <sstream>
#include <unordered_map>

#include "json.hpp"
#include "threadrec/error.hpp"

namespace threadrec {

std::vector<AlignedPair> align(const std::vector<Prediction>& preds,
                               const std::vector<Thread>& golds) {
  if (golds.empty()) throw ValidationError("evaluation set is empty");
  std::unordered_map<std::string, const Prediction*> by_id;
  for (const auto& p : preds) {
    if (!by_id.emplace(p.thread_id, &p).second) {
      throw ValidationError("duplicate prediction for thread '" + p.thread_id + "'");
    }
  }
  std::vector<AlignedPair> out;
  out.reserve(golds.size());
  for (const auto& t : golds) {
    if (!t.gold_parents) {
      throw ValidationError("thread '" + t.thread_id + "' has no gold tree");
    }
    auto it = by_id.find(t.thread_id);
    if (it == by_id.end()) {
      throw ValidationError("missing prediction for thread '" + t.thread_id + "'");
    }
    if (it->second->parents.size() != t.gold_parents->size()) {
      throw ValidationError("prediction for thread '" + t.thread_id +
                            "' has the wrong number of posts");
    }
    out.push_back({&it->second->parents, &*t.gold_parents});
  }
  return out;
}

namespace {

struct Counts {
  std::size_t threads = 0, exact = 0;
  std::size_t links = 0, correct = 0;
  std::size_t predicted_nontrivial = 0, gold_nontrivial = 0, correct_nontrivial = 0;
};

Counts count(const std::vector<AlignedPair>& pairs) {
  Counts c;
  for (const auto& [pred, gold] : pairs) {
    ++c.threads;
    if (*pred == *gold) ++c.exact;
    for (std::size_t i = 1; i < gold->size(); ++i) {
      const int p = pred->parent_of(i);
      const int g = gold->parent_of(i);
      ++c.links;
      if (p == g) ++c.correct;
      if (p != 1) ++c.predicted_nontrivial;
      if (g != 1) ++c.gold_nontrivial;
      if (p != 1 && p == g) ++c.correct_nontrivial;
    }
  }
  return c;
}

double ratio(std::size_t num, std::size_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

void fill_edges(const Counts& c, EvalResult& r) {
  r.threads = c.threads;
  r.links = c.links;
  r.nontrivial_links = c.gold_nontrivial;
  // Corpora made only of 1-post threads have no links; every link is then
  // trivially right.
  r.edge_accuracy = c.links == 0 ? 1.0 : ratio(c.correct, c.links);
  r.edge_precision = ratio(c.correct_nontrivial, c.predicted_nontrivial);
  r.edge_recall = ratio(c.correct_nontrivial, c.gold_nontrivial);
  const double pr = r.edge_precision + r.edge_recall;
  r.edge_f1 = pr > 0.0 ? 2.0 * r.edge_precision * r.edge_recall / pr : 0.0;
}

}  // namespace

double tree_accuracy(const std::vector<Prediction>& preds, const std::vector<Thread>& golds) {
  const Counts c = count(align(preds, golds));
  return ratio(c.exact, c.threads);
}

EvalResult edge_scores(const std::vector<Prediction>& preds, const std::vector<Thread>& golds) {
  EvalResult r;
  fill_edges(count(align(preds, golds)), r);
  return r;
}

EvalResult evaluate_predictions(const std::vector<Prediction>& preds,
                                const std::vector<Thread>& golds) {
  const Counts c = count(align(preds, golds));
  EvalResult r;
  r.tree_accuracy = ratio(c.exact, c.threads);
  fill_edges(c, r);
  return r;
}

std::string Report::to_table() const {
  std::size_t name_width = 6;
  for (const auto& row : rows) name_width = std::max(name_width, row.system.size());
  std::ostringstream out;
  auto line = [&](const std::string& name, const std::string& a, const std::string& b,
                  const std::string& c) {
    out << name << std::string(name_width - name.size(), ' ') << " | " << a << " | " << b
        << " | " << c << '\n';
  };
  auto num = [](double v) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%8.2f", 100.0 * v);
    return std::string(buf);
  };
  // The edge-level caption spans the F1 and accuracy columns.
  out << std::string(name_width, ' ') << " | Tree-lvl |     Edge-level\n";
  line("system", "     Acc", "      F1", "     Acc");
  out << std::string(name_width + 33, '-') << '\n';
  for (const auto& row : rows) {
    line(row.system, num(row.result.tree_accuracy), num(row.result.edge_f1),
         num(row.result.edge_accuracy));
  }
  return out.str();
}

std::string Report::to_jsonl() const {
  std::string out;
  for (const auto& row : rows) {
    nlohmann::ordered_json rec;
    rec["system"] = row.system;
    rec["tree_accuracy"] = row.result.tree_accuracy;
    rec["edge_accuracy"] = row.result.edge_accuracy;
    rec["edge_precision"] = row.result.edge_precision;
    rec["edge_recall"] = row.result.edge_recall;
    rec["edge_f1"] = row.result.edge_f1;
    rec["threads"] = row.result.threads;
    rec["links"] = row.result.links;
    rec["nontrivial_links"] = row.result.nontrivial_links;
    out += rec.dump();
    out += '\n';
  }
  return out;
}

Report evaluate(const std::vector<StrategyKind>& strategies, const std::vector<Thread>& test,
                const CoherenceModel* model) {
  if (strategies.empty()) throw ValidationError("no strategies to evaluate");
  Report report;
  for (auto kind : strategies) {
    const auto preds = predict_all(kind, test, model);
    report.rows.push_back({strategy_name(kind), evaluate_predictions(preds, test)});
  }
  return report;
}

}  // namespace threadrec
