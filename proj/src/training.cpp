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

#include "threadrec/training.hpp"

#include <cmath>
#include <sstream>

#include "json.hpp"
#include "threadrec/conversation_tree.hpp"
#include "threadrec/entity_grid.hpp"
#include "threadrec/error.hpp"
#include "threadrec/random.hpp"

namespace threadrec {

std::vector<TrainingPair> make_training_pairs(const Thread& thread, std::size_t m,
                                              std::uint64_t seed) {
  if (!thread.gold_parents) {
    throw ValidationError("thread '" + thread.thread_id + "' has no gold tree");
  }
  std::vector<TrainingPair> pairs;
  if (thread.num_posts() < 3) return pairs;
  for (auto& negative :
       sample_candidate_trees(thread.num_posts(), m, seed, thread.gold_parents)) {
    pairs.push_back({*thread.gold_parents, std::move(negative)});
  }
  return pairs;
}

std::string stop_reason_name(StopReason r) {
  return r == StopReason::kEarlyStopping ? "early_stopping" : "max_epochs";
}

std::string TrainReport::to_jsonl() const {
  std::string out;
  for (const auto& e : epochs) {
    nlohmann::ordered_json rec;
    rec["epoch"] = e.epoch;
    rec["mean_loss"] = e.mean_loss;
    rec["train_pair_accuracy"] = e.train_pair_accuracy;
    rec["dev_pair_accuracy"] = e.dev_pair_accuracy;
    rec["dev_tree_accuracy"] = e.dev_tree_accuracy;
    out += rec.dump();
    out += '\n';
  }
  nlohmann::ordered_json summary;
  summary["best_epoch"] = best_epoch;
  summary["stop_reason"] = stop_reason_name(stop_reason);
  summary["epochs_run"] = epochs.size();
  out += summary.dump();
  out += '\n';
  return out;
}

namespace {

// Token sequences of every tree a thread is trained or evaluated on.
// sequences[0] is the gold tree.
struct EncodedThread {
  std::vector<GridTokenSequence> sequences;
  std::size_t gold_index = 0;
};

struct PairRef {
  std::uint32_t thread;
  std::uint32_t pos;
  std::uint32_t neg;
};

// Gold first, then the sampled false trees; one pair per false tree.
void encode_pairs(const std::vector<Thread>& threads, std::size_t m, std::uint64_t seed,
                  std::size_t length, std::vector<EncodedThread>& encoded,
                  std::vector<PairRef>& pairs) {
  for (std::size_t t = 0; t < threads.size(); ++t) {
    const Thread& thread = threads[t];
    const auto training_pairs = make_training_pairs(thread, m, derive_seed(seed, t));
    if (training_pairs.empty()) continue;
    const TaggedThread tagged = tag_thread(thread);
    EncodedThread enc;
    enc.sequences.push_back(grid_sequence(thread, tagged, *thread.gold_parents, length));
    for (const auto& p : training_pairs) {
      enc.sequences.push_back(grid_sequence(thread, tagged, p.negative, length));
      pairs.push_back({static_cast<std::uint32_t>(encoded.size()), 0,
                       static_cast<std::uint32_t>(enc.sequences.size() - 1)});
    }
    encoded.push_back(std::move(enc));
  }
}

// Every candidate of each dev thread, for tree-level accuracy.
std::vector<EncodedThread> encode_candidates(const std::vector<Thread>& threads,
                                             std::size_t length) {
  std::vector<EncodedThread> out;
  out.reserve(threads.size());
  for (const Thread& thread : threads) {
    if (!thread.gold_parents) {
      throw ValidationError("dev thread '" + thread.thread_id + "' has no gold tree");
    }
    EncodedThread enc;
    const auto candidates = enumerate_candidate_trees(thread.num_posts());
    if (candidates.size() > 1) {
      const TaggedThread tagged = tag_thread(thread);
      for (std::size_t i = 0; i < candidates.size(); ++i) {
        enc.sequences.push_back(grid_sequence(thread, tagged, candidates[i], length));
        if (candidates[i] == *thread.gold_parents) enc.gold_index = i;
      }
    }
    out.push_back(std::move(enc));
  }
  return out;
}

double tree_accuracy_of(const CoherenceModel& model, const std::vector<EncodedThread>& dev) {
  std::size_t correct = 0;
  for (const auto& enc : dev) {
    if (enc.sequences.size() <= 1) {
      ++correct;
      continue;
    }
    std::size_t best = 0;
    double best_score = 0.0;
    for (std::size_t i = 0; i < enc.sequences.size(); ++i) {
      const double s = model.score(enc.sequences[i]);
      if (i == 0 || s > best_score) {
        best = i;
        best_score = s;
      }
    }
    if (best == enc.gold_index) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(dev.size());
}

double pair_accuracy_of(const CoherenceModel& model, const std::vector<EncodedThread>& threads,
                        const std::vector<PairRef>& pairs) {
  if (pairs.empty()) return 0.0;
  std::size_t correct = 0;
  // Gold scores are shared by all pairs of a thread.
  std::uint32_t cached_thread = ~0u;
  double gold_score = 0.0;
  for (const auto& p : pairs) {
    if (p.thread != cached_thread) {
      cached_thread = p.thread;
      gold_score = model.score(threads[p.thread].sequences[p.pos]);
    }
    if (gold_score > model.score(threads[p.thread].sequences[p.neg])) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(pairs.size());
}

void apply_rmsprop(Parameters& params, const Parameters& grad, Parameters& cache,
                   const HyperParams& hp) {
  const double lr = hp.learning_rate, decay = hp.rmsprop_decay, eps = hp.rmsprop_epsilon;
  rmsprop_update(params.embeddings, grad.embeddings, cache.embeddings, lr, decay, eps);
  rmsprop_update(params.filters, grad.filters, cache.filters, lr, decay, eps);
  rmsprop_update(params.filter_bias, grad.filter_bias, cache.filter_bias, lr, decay, eps);
  rmsprop_update(params.score_weights, grad.score_weights, cache.score_weights, lr, decay,
                 eps);
  rmsprop_update(std::span<double>(&params.score_bias, 1),
                 std::span<const double>(&grad.score_bias, 1),
                 std::span<double>(&cache.score_bias, 1), lr, decay, eps);
}

}  // namespace

double pairwise_accuracy(const CoherenceModel& model, const std::vector<Thread>& threads,
                         std::size_t m, std::uint64_t seed) {
  std::vector<EncodedThread> encoded;
  std::vector<PairRef> pairs;
  encode_pairs(threads, m, seed, model.hyper_params().seq_len, encoded, pairs);
  return pair_accuracy_of(model, encoded, pairs);
}

TrainResult train(const CoherenceModel& initial, const CorpusSplit& split,
                  const HyperParams& hp, std::uint64_t seed, const EpochCallback& on_epoch) {
  hp.validate();
  if (split.train.empty()) throw ValidationError("training set is empty");
  if (split.dev.empty()) throw ValidationError("development set is empty");
  if (!(initial.hyper_params().seq_len == hp.seq_len &&
        initial.hyper_params().emb_dim == hp.emb_dim &&
        initial.hyper_params().n_filters == hp.n_filters &&
        initial.hyper_params().window == hp.window && initial.hyper_params().pool == hp.pool &&
        initial.hyper_params().pooling == hp.pooling)) {
    throw ValidationError("initial model does not match the training hyperparameters");
  }

  CoherenceModel model(hp, initial.parameters());
  const std::uint64_t pair_seed = derive_seed(seed, "pairs");
  const std::uint64_t shuffle_seed = derive_seed(seed, "shuffle");
  const std::uint64_t dropout_seed = derive_seed(seed, "dropout");

  std::vector<EncodedThread> train_threads;
  std::vector<PairRef> train_pairs;
  encode_pairs(split.train, hp.negatives, pair_seed, hp.seq_len, train_threads, train_pairs);
  if (train_pairs.empty()) {
    throw ValidationError("training set yields no pairs (every thread has fewer than 3 posts)");
  }
  std::vector<EncodedThread> dev_pair_threads;
  std::vector<PairRef> dev_pairs;
  encode_pairs(split.dev, hp.negatives, derive_seed(seed, "dev-pairs"), hp.seq_len,
               dev_pair_threads, dev_pairs);
  const auto dev_candidates = encode_candidates(split.dev, hp.seq_len);

  Parameters cache = Parameters::zeros(hp);
  GradientAccumulator acc(hp);
  ForwardState pos_state, neg_state;
  const std::size_t width = hp.feature_width();

  TrainResult result{model, {}};
  double best_accuracy = -1.0;
  std::size_t stale = 0;

  for (std::size_t epoch = 1; epoch <= hp.max_epochs; ++epoch) {
    SplitMix64 order_rng(derive_seed(shuffle_seed, epoch));
    std::vector<PairRef> order = train_pairs;
    shuffle(std::span<PairRef>(order), order_rng);
    const std::uint64_t epoch_dropout = derive_seed(dropout_seed, epoch);

    double loss_sum = 0.0;
    std::size_t ordered = 0;
    for (std::size_t start = 0; start < order.size(); start += hp.batch) {
      const std::size_t end = std::min(order.size(), start + hp.batch);
      acc.clear();
      for (std::size_t i = start; i < end; ++i) {
        const PairRef& p = order[i];
        const auto& pos = train_threads[p.thread].sequences[p.pos];
        const auto& neg = train_threads[p.thread].sequences[p.neg];
        std::vector<double> mask;
        if (hp.dropout > 0.0) {
          mask = make_dropout_mask(width, hp.dropout, derive_seed(epoch_dropout, i));
        }
        const double sp = model.forward(pos, mask, pos_state);
        const double sn = model.forward(neg, mask, neg_state);
        const double loss = ranking_loss(sp, sn);
        if (!std::isfinite(loss)) {
          throw TrainingError("non-finite loss in epoch " + std::to_string(epoch) +
                              " (scores " + std::to_string(sp) + ", " + std::to_string(sn) +
                              ")");
        }
        loss_sum += loss;
        if (sp > sn) ++ordered;
        if (loss > 0.0) {
          model.backward(pos, pos_state, -1.0, acc);
          model.backward(neg, neg_state, 1.0, acc);
        }
      }
      const Parameters grad = model.gradient(acc, 1.0 / static_cast<double>(end - start));
      Parameters params = model.parameters();
      apply_rmsprop(params, grad, cache, hp);
      if (!params.all_finite()) {
        throw TrainingError("non-finite parameter after an update in epoch " +
                            std::to_string(epoch));
      }
      model.set_parameters(std::move(params));
    }

    EpochStats stats;
    stats.epoch = epoch;
    stats.mean_loss = loss_sum / static_cast<double>(order.size());
    stats.train_pair_accuracy = static_cast<double>(ordered) / static_cast<double>(order.size());
    stats.dev_pair_accuracy = pair_accuracy_of(model, dev_pair_threads, dev_pairs);
    stats.dev_tree_accuracy = tree_accuracy_of(model, dev_candidates);
    result.report.epochs.push_back(stats);
    if (on_epoch) on_epoch(stats);

    if (stats.dev_tree_accuracy > best_accuracy) {
      best_accuracy = stats.dev_tree_accuracy;
      result.report.best_epoch = epoch;
      result.model.set_parameters(model.parameters());
      stale = 0;
    } else {
      ++stale;
      // patience 0 and 1 both stop at the first epoch without improvement.
      if (stale >= std::max<std::size_t>(hp.patience, 1)) {
        result.report.stop_reason = StopReason::kEarlyStopping;
        break;
      }
    }
  }
  return result;
}

}  // namespace threadrec
