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

#ifndef THREADREC_COHERENCE_MODEL_HPP_
#define THREADREC_COHERENCE_MODEL_HPP_

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "threadrec/entity_grid.hpp"

namespace threadrec {

enum class PoolingMode : std::uint8_t {
  kChunked = 0,  // window = stride = pool length
  kGlobal = 1,   // one max over the whole feature map
};

struct HyperParams {
  std::size_t batch = 64;
  std::size_t emb_dim = 100;
  double dropout = 0.5;
  std::size_t n_filters = 150;
  std::size_t window = 6;
  std::size_t pool = 6;
  std::size_t seq_len = kDefaultSeqLen;
  double learning_rate = 0.001;
  double rmsprop_decay = 0.9;
  double rmsprop_epsilon = 1e-8;
  std::size_t max_epochs = 25;
  std::size_t patience = 10;
  std::size_t negatives = 20;
  PoolingMode pooling = PoolingMode::kChunked;

  // Throws ValidationError.
  void validate() const;

  // Positions of a valid convolution over seq_len tokens.
  std::size_t conv_length() const { return seq_len - window + 1; }
  // Pooled values per feature map.
  std::size_t chunks() const;
  // Input width of the scoring layer.
  std::size_t feature_width() const { return n_filters * chunks(); }

  friend bool operator==(const HyperParams&, const HyperParams&) = default;
};

// All trainable values, stored flat in row-major order.
struct Parameters {
  std::vector<double> embeddings;     // kGridVocabSize x emb_dim; PAD row is zero
  std::vector<double> filters;        // n_filters x window x emb_dim
  std::vector<double> filter_bias;    // n_filters
  std::vector<double> score_weights;  // feature_width, filter-major
  double score_bias = 0.0;

  static Parameters zeros(const HyperParams& hp);

  // Calls f(span) on each tensor and on a one-element span over score_bias.
  template <typename F>
  void for_each_tensor(F&& f) {
    f(std::span<double>(embeddings));
    f(std::span<double>(filters));
    f(std::span<double>(filter_bias));
    f(std::span<double>(score_weights));
    f(std::span<double>(&score_bias, 1));
  }

  std::size_t size() const {
    return embeddings.size() + filters.size() + filter_bias.size() + score_weights.size() + 1;
  }

  bool all_finite() const;

  friend bool operator==(const Parameters&, const Parameters&) = default;
};

// Gradient in the scorer's working coordinates. Convolution gradients are
// kept per (filter, offset, token) and mapped back onto the embedding and
// filter tensors once per batch by CoherenceModel::gradient().
struct GradientAccumulator {
  std::vector<double> lookup;  // n_filters x window x kGridVocabSize
  std::vector<double> filter_bias;
  std::vector<double> score_weights;
  double score_bias = 0.0;

  explicit GradientAccumulator(const HyperParams& hp);
  void clear();
};

// Per-call activations needed for backpropagation.
struct ForwardState {
  std::vector<double> features;  // pooled, after dropout
  std::vector<int> argmax;       // conv position per feature; -1 when inactive
  std::vector<double> mask;      // empty in eval mode
  double score = 0.0;
};

// Inverted dropout mask: each entry is 0 with probability `rate`, otherwise
// 1 / (1 - rate).
std::vector<double> make_dropout_mask(std::size_t width, double rate, std::uint64_t seed);

// The Grid-CNN scorer. Tokens are embedded, convolved with n_filters windows
// of `window` embeddings, passed through max(0, .), max-pooled per chunk, and
// mapped to a scalar by a linear layer.
//
// The vocabulary has five symbols, so every filter's response to a token at
// a given offset is precomputed into a lookup table; a convolution position
// costs `window` table reads per filter. Windows made only of PAD reduce to
// the filter bias exactly, so trailing padding is never convolved.
//
// A model is immutable for scoring; concurrent score() calls are safe.
class CoherenceModel {
 public:
  // Throws ValidationError on invalid hyperparameters or tensor shapes.
  CoherenceModel(HyperParams hp, Parameters params);

  // Embeddings and filters uniform on [-0.05, 0.05]; biases and the scoring
  // layer zero, so every sequence initially scores 0.
  static CoherenceModel initialize(const HyperParams& hp, std::uint64_t seed);

  const HyperParams& hyper_params() const { return hp_; }
  const Parameters& parameters() const { return params_; }

  // Replaces all parameters (shape-checked) and refreshes derived tables.
  void set_parameters(Parameters params);

  // Evaluation mode; dropout is the identity.
  double score(std::span<const GridToken> seq) const;

  // train_mode applies inverted dropout with a mask drawn from `seed`.
  double score(std::span<const GridToken> seq, bool train_mode, std::uint64_t seed) const;

  // `mask` may be empty (eval mode) or of size feature_width(). Throws
  // ValidationError when seq.size() != seq_len.
  double forward(std::span<const GridToken> seq, std::span<const double> mask,
                 ForwardState& state) const;

  // Adds d(loss)/d(params) to `grad` given d(loss)/d(score) for one forward
  // call.
  void backward(std::span<const GridToken> seq, const ForwardState& state, double d_score,
                GradientAccumulator& grad) const;

  // Maps accumulated working gradients onto the parameter tensors, scaled by
  // `scale`. The PAD embedding row receives zero.
  Parameters gradient(const GradientAccumulator& grad, double scale = 1.0) const;

 private:
  void rebuild_lookup();

  HyperParams hp_;
  Parameters params_;
  std::vector<double> lookup_;  // n_filters x window x kGridVocabSize
};

// Pairwise hinge loss max(0, 1 - pos + neg).
double ranking_loss(double score_pos, double score_neg);

// One RMSprop step in place:
//   cache <- decay * cache + (1 - decay) * grad^2
//   param <- param - lr * grad / (sqrt(cache) + eps)
void rmsprop_update(std::span<double> param, std::span<const double> grad,
                    std::span<double> cache, double lr, double decay, double eps);

// Model file: magic "GRIDCNN1", hyperparameters, vocabulary order, then every
// parameter as a little-endian IEEE-754 double.
void save_model(const CoherenceModel& model, std::ostream& out);
void save_model_file(const CoherenceModel& model, const std::string& path);

// Throws ValidationError on a bad magic, truncated data or invalid
// hyperparameters; IoError when the file cannot be opened.
CoherenceModel load_model(std::istream& in);
CoherenceModel load_model_file(const std::string& path);

struct GradientCheckResult {
  double max_relative_error = 0.0;
  double loss = 0.0;
  std::size_t coordinates = 0;
  std::size_t skipped = 0;  // probes that crossed a ReLU or max-pool switch
};

// Compares the analytic gradient of ranking_loss(score(pos), score(neg)) with
// central finite differences on `samples` randomly chosen coordinates,
// dropout disabled. Relative error is |a - n| / max(1e-8, |a| + |n|).
// A coordinate whose +-epsilon probe changes which positions win the ReLU
// and max-pool selections is not differentiable within the step; it is
// skipped and another coordinate is drawn in its place.
//
// `corrupt_score_gradient` flips the sign of the analytic score-layer
// gradient; it exists so tests can confirm the check detects a broken
// backward pass. Throws ValidationError when the pair sits on the hinge
// boundary (|loss| within 10 * epsilon of the kink).
GradientCheckResult gradient_check(const CoherenceModel& model,
                                   std::span<const GridToken> pos,
                                   std::span<const GridToken> neg, double epsilon = 1e-4,
                                   std::size_t samples = 256, std::uint64_t seed = 0,
                                   bool corrupt_score_gradient = false);

}  // namespace threadrec

#endif  // THREADREC_COHERENCE_MODEL_HPP_
