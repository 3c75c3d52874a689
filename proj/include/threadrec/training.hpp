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

#ifndef THREADREC_TRAINING_HPP_
#define THREADREC_TRAINING_HPP_

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "threadrec/coherence_model.hpp"
#include "threadrec/corpus.hpp"

namespace threadrec {

struct TrainingPair {
  ParentVector gold;
  ParentVector negative;
};

// Up to m (gold, false tree) pairs with false trees drawn without replacement
// from the valid trees of the thread. Threads of fewer than three posts give
// none. Throws ValidationError when the thread has no gold tree.
std::vector<TrainingPair> make_training_pairs(const Thread& thread, std::size_t m,
                                              std::uint64_t seed);

// Raised when training produces a non-finite loss or parameter.
class TrainingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class StopReason { kMaxEpochs, kEarlyStopping };

std::string stop_reason_name(StopReason r);

struct EpochStats {
  std::size_t epoch = 0;  // 1-based
  double mean_loss = 0.0;
  double train_pair_accuracy = 0.0;  // on this epoch's updates, dropout on
  double dev_pair_accuracy = 0.0;
  double dev_tree_accuracy = 0.0;

  friend bool operator==(const EpochStats&, const EpochStats&) = default;
};

struct TrainReport {
  std::vector<EpochStats> epochs;
  std::size_t best_epoch = 0;  // 1-based; argmax of dev tree accuracy
  StopReason stop_reason = StopReason::kMaxEpochs;

  friend bool operator==(const TrainReport&, const TrainReport&) = default;

  // One JSON object per epoch, then a summary line.
  std::string to_jsonl() const;
};

struct TrainResult {
  CoherenceModel model;  // parameters of the best epoch
  TrainReport report;
};

using EpochCallback = std::function<void(const EpochStats&)>;

// Pairwise ranking training with RMSprop and early stopping on dev
// tree-level accuracy. Both trees of a pair share one dropout mask. All
// randomness (pair sampling, shuffling, dropout) derives from `seed`.
// Throws ValidationError when train or dev is empty, TrainingError on
// non-finite values.
TrainResult train(const CoherenceModel& initial, const CorpusSplit& split,
                  const HyperParams& hp, std::uint64_t seed,
                  const EpochCallback& on_epoch = {});

// Fraction of pairs scored strictly in the right order, evaluation mode.
double pairwise_accuracy(const CoherenceModel& model, const std::vector<Thread>& threads,
                         std::size_t m, std::uint64_t seed);

}  // namespace threadrec

#endif  // THREADREC_TRAINING_HPP_
