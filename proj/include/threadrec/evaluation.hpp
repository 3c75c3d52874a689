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

#ifndef THREADREC_EVALUATION_HPP_
#define THREADREC_EVALUATION_HPP_

#include <string>
#include <vector>

#include "threadrec/corpus.hpp"
#include "threadrec/reconstruct.hpp"

namespace threadrec {

// Tree-level and edge-level scores of one system.
//
// Edge accuracy pools every non-root post of every thread. Precision, recall
// and F1 are computed for non-trivial links only, i.e. replies whose parent
// is not the first post: a link counts as predicted when the system attaches
// a post somewhere other than post 1, and as correct when that parent is the
// gold one.
struct EvalResult {
  double tree_accuracy = 0.0;
  double edge_accuracy = 0.0;
  double edge_precision = 0.0;
  double edge_recall = 0.0;
  double edge_f1 = 0.0;
  std::size_t threads = 0;
  std::size_t links = 0;
  std::size_t nontrivial_links = 0;  // in the gold trees

  friend bool operator==(const EvalResult&, const EvalResult&) = default;
};

// Predictions and gold trees paired by thread id. Throws ValidationError when
// the gold set is empty, a gold thread lacks its tree or prediction, or sizes
// disagree.
struct AlignedPair {
  const ParentVector* predicted;
  const ParentVector* gold;
};

std::vector<AlignedPair> align(const std::vector<Prediction>& preds,
                               const std::vector<Thread>& golds);

double tree_accuracy(const std::vector<Prediction>& preds, const std::vector<Thread>& golds);

// Fills every field of EvalResult.
EvalResult evaluate_predictions(const std::vector<Prediction>& preds,
                                const std::vector<Thread>& golds);

// Edge fields only; tree_accuracy is left at 0.
EvalResult edge_scores(const std::vector<Prediction>& preds, const std::vector<Thread>& golds);

struct ReportRow {
  std::string system;
  EvalResult result;
};

struct Report {
  std::vector<ReportRow> rows;

  // Percentages, two decimals:  system | Tree Acc | Edge F1 | Edge Acc
  std::string to_table() const;
  // One JSON object per line.
  std::string to_jsonl() const;
};

// One row per strategy in the given order. Throws ValidationError when
// `strategies` is empty.
Report evaluate(const std::vector<StrategyKind>& strategies, const std::vector<Thread>& test,
                const CoherenceModel* model = nullptr);

}  // namespace threadrec

#endif  // THREADREC_EVALUATION_HPP_
