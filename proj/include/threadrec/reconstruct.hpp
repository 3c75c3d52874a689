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

#ifndef THREADREC_RECONSTRUCT_HPP_
#define THREADREC_RECONSTRUCT_HPP_

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "threadrec/coherence_model.hpp"
#include "threadrec/corpus.hpp"

namespace threadrec {

enum class StrategyKind { kGridCnn, kAllPrevious, kAllFirst, kCosSim };

// "grid-cnn", "all-previous", "all-first", "cos-sim".
std::string strategy_name(StrategyKind kind);
StrategyKind parse_strategy(const std::string& name);

struct Prediction {
  std::string thread_id;
  ParentVector parents;
  std::optional<double> score;  // grid-cnn only
};

// Argmax of the coherence score over every candidate tree, ties resolved
// toward the lexicographically smallest parent vector. Threads of one or two
// posts have a single candidate and are not scored. Throws ValidationError
// above the enumeration cap.
Prediction predict_grid_cnn(const CoherenceModel& model, const Thread& thread);

// Post i+1 replies to post i.
ParentVector predict_all_previous(const Thread& thread);

// Every post replies to post 1.
ParentVector predict_all_first(const Thread& thread);

// Raw term counts over a post's tokens.
using TermVector = std::map<std::string, double>;

TermVector term_vector(const Post& post);

// dot(u, v) / (|u| |v|); 0 when either vector is empty.
double cosine(const TermVector& u, const TermVector& v);

// Each post replies to the earlier post with the highest cosine similarity,
// ties toward the most recent post; an empty post replies to its predecessor.
ParentVector predict_cos_sim(const Thread& thread);

// Dispatches on kind; `model` is required for kGridCnn.
Prediction predict(StrategyKind kind, const Thread& thread,
                   const CoherenceModel* model = nullptr);

std::vector<Prediction> predict_all(StrategyKind kind, const std::vector<Thread>& threads,
                                    const CoherenceModel* model = nullptr);

// One JSON object per line: {"thread_id", "strategy", "parents", "score"?}.
std::string serialize_prediction(const Prediction& p, const std::string& strategy);
void write_predictions(std::ostream& out, const std::vector<Prediction>& preds,
                       const std::string& strategy);

struct PredictionFile {
  std::string strategy;  // from the records; empty when absent
  std::vector<Prediction> predictions;
};

PredictionFile read_predictions(std::istream& in);
PredictionFile read_predictions_file(const std::string& path);

}  // namespace threadrec

#endif  // THREADREC_RECONSTRUCT_HPP_
