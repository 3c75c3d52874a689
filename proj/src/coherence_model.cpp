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

#include "threadrec/coherence_model.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <utility>

#include "threadrec/error.hpp"
#include "threadrec/random.hpp"

namespace threadrec {

namespace {

constexpr std::size_t kPad = static_cast<std::size_t>(GridToken::kPad);

}  // namespace

void HyperParams::validate() const {
  auto fail = [](const std::string& what) { throw ValidationError("hyperparameters: " + what); };
  if (batch == 0) fail("batch must be positive");
  if (emb_dim == 0) fail("embedding size must be positive");
  if (!(dropout >= 0.0 && dropout < 1.0)) fail("dropout must lie in [0, 1)");
  if (n_filters == 0) fail("filter count must be positive");
  if (window == 0) fail("window must be positive");
  if (pool == 0) fail("pool length must be positive");
  if (seq_len == 0) fail("sequence length must be positive");
  if (window > seq_len) fail("window larger than sequence length");
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) fail("learning rate must be positive");
  if (!(rmsprop_decay >= 0.0 && rmsprop_decay < 1.0)) fail("rmsprop decay must lie in [0, 1)");
  if (!(rmsprop_epsilon > 0.0)) fail("rmsprop epsilon must be positive");
  if (pooling != PoolingMode::kChunked && pooling != PoolingMode::kGlobal) fail("unknown pooling mode");
}

std::size_t HyperParams::chunks() const {
  if (pooling == PoolingMode::kGlobal) return 1;
  return (conv_length() + pool - 1) / pool;
}

Parameters Parameters::zeros(const HyperParams& hp) {
  Parameters p;
  p.embeddings.assign(kGridVocabSize * hp.emb_dim, 0.0);
  p.filters.assign(hp.n_filters * hp.window * hp.emb_dim, 0.0);
  p.filter_bias.assign(hp.n_filters, 0.0);
  p.score_weights.assign(hp.feature_width(), 0.0);
  p.score_bias = 0.0;
  return p;
}

bool Parameters::all_finite() const {
  auto finite = [](const std::vector<double>& v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
  };
  return finite(embeddings) && finite(filters) && finite(filter_bias) &&
         finite(score_weights) && std::isfinite(score_bias);
}

GradientAccumulator::GradientAccumulator(const HyperParams& hp)
    : lookup(hp.n_filters * hp.window * kGridVocabSize, 0.0),
      filter_bias(hp.n_filters, 0.0),
      score_weights(hp.feature_width(), 0.0) {}

void GradientAccumulator::clear() {
  std::fill(lookup.begin(), lookup.end(), 0.0);
  std::fill(filter_bias.begin(), filter_bias.end(), 0.0);
  std::fill(score_weights.begin(), score_weights.end(), 0.0);
  score_bias = 0.0;
}

std::vector<double> make_dropout_mask(std::size_t width, double rate, std::uint64_t seed) {
  std::vector<double> mask(width, 1.0);
  if (rate <= 0.0) return mask;
  const double keep_scale = 1.0 / (1.0 - rate);
  SplitMix64 rng(seed);
  for (auto& m : mask) m = rng.uniform() < rate ? 0.0 : keep_scale;
  return mask;
}

// CoherenceModel

CoherenceModel::CoherenceModel(HyperParams hp, Parameters params) : hp_(hp) {
  hp_.validate();
  set_parameters(std::move(params));
}

CoherenceModel CoherenceModel::initialize(const HyperParams& hp, std::uint64_t seed) {
  hp.validate();
  Parameters p = Parameters::zeros(hp);
  SplitMix64 rng(seed);
  auto draw = [&] { return (rng.uniform() * 2.0 - 1.0) * 0.05; };
  for (std::size_t v = 0; v < kGridVocabSize; ++v) {
    if (v == kPad) continue;
    for (std::size_t i = 0; i < hp.emb_dim; ++i) p.embeddings[v * hp.emb_dim + i] = draw();
  }
  for (auto& w : p.filters) w = draw();
  return CoherenceModel(hp, std::move(p));
}

void CoherenceModel::set_parameters(Parameters params) {
  const Parameters shape = Parameters::zeros(hp_);
  if (params.embeddings.size() != shape.embeddings.size() ||
      params.filters.size() != shape.filters.size() ||
      params.filter_bias.size() != shape.filter_bias.size() ||
      params.score_weights.size() != shape.score_weights.size()) {
    throw ValidationError("parameter shapes do not match hyperparameters");
  }
  for (std::size_t i = 0; i < hp_.emb_dim; ++i) {
    if (params.embeddings[kPad * hp_.emb_dim + i] != 0.0) {
      throw ValidationError("PAD embedding must be zero");
    }
  }
  params_ = std::move(params);
  rebuild_lookup();
}

void CoherenceModel::rebuild_lookup() {
  const std::size_t d = hp_.emb_dim;
  lookup_.assign(hp_.n_filters * hp_.window * kGridVocabSize, 0.0);
  for (std::size_t fk = 0; fk < hp_.n_filters * hp_.window; ++fk) {
    const double* w = params_.filters.data() + fk * d;
    for (std::size_t v = 0; v < kGridVocabSize; ++v) {
      if (v == kPad) continue;
      const double* e = params_.embeddings.data() + v * d;
      double acc = 0.0;
      for (std::size_t i = 0; i < d; ++i) acc += w[i] * e[i];
      lookup_[fk * kGridVocabSize + v] = acc;
    }
  }
}

double CoherenceModel::score(std::span<const GridToken> seq) const {
  ForwardState state;
  return forward(seq, {}, state);
}

double CoherenceModel::score(std::span<const GridToken> seq, bool train_mode,
                             std::uint64_t seed) const {
  ForwardState state;
  if (!train_mode || hp_.dropout <= 0.0) return forward(seq, {}, state);
  const auto mask = make_dropout_mask(hp_.feature_width(), hp_.dropout, seed);
  return forward(seq, mask, state);
}

double CoherenceModel::forward(std::span<const GridToken> seq, std::span<const double> mask,
                               ForwardState& state) const {
  if (seq.size() != hp_.seq_len) {
    throw ValidationError("sequence length " + std::to_string(seq.size()) +
                          " does not match model length " + std::to_string(hp_.seq_len));
  }
  const std::size_t width = hp_.feature_width();
  if (!mask.empty() && mask.size() != width) {
    throw ValidationError("dropout mask width does not match the scoring layer");
  }
  const std::size_t positions = hp_.conv_length();
  const std::size_t chunks = hp_.chunks();
  const std::size_t pool = hp_.pooling == PoolingMode::kGlobal ? positions : hp_.pool;
  const std::size_t w = hp_.window;

  // Windows starting at or after `content` contain only PAD.
  std::size_t content = seq.size();
  while (content > 0 && seq[content - 1] == GridToken::kPad) --content;
  const std::size_t live = std::min(positions, content);

  state.features.assign(width, 0.0);
  state.argmax.assign(width, -1);
  state.mask.assign(mask.begin(), mask.end());

  std::vector<double> z(positions);
  for (std::size_t f = 0; f < hp_.n_filters; ++f) {
    const double bias = params_.filter_bias[f];
    const double* table = lookup_.data() + f * w * kGridVocabSize;
    for (std::size_t p = 0; p < live; ++p) {
      double acc = bias;
      for (std::size_t k = 0; k < w; ++k) {
        acc += table[k * kGridVocabSize + static_cast<std::size_t>(seq[p + k])];
      }
      z[p] = acc;
    }
    for (std::size_t c = 0; c < chunks; ++c) {
      const std::size_t begin = c * pool;
      const std::size_t end = std::min(begin + pool, positions);
      double best = 0.0;
      int arg = -1;
      if (begin >= live) {
        if (bias > 0.0) {
          best = bias;
          arg = static_cast<int>(begin);
        }
      } else {
        for (std::size_t p = begin; p < end; ++p) {
          const double v = p < live ? z[p] : bias;
          if (v > best) {
            best = v;
            arg = static_cast<int>(p);
          }
        }
      }
      const std::size_t j = f * chunks + c;
      state.features[j] = mask.empty() ? best : best * mask[j];
      state.argmax[j] = arg;
    }
  }

  double phi = params_.score_bias;
  for (std::size_t j = 0; j < width; ++j) phi += params_.score_weights[j] * state.features[j];
  state.score = phi;
  return phi;
}

void CoherenceModel::backward(std::span<const GridToken> seq, const ForwardState& state,
                              double d_score, GradientAccumulator& grad) const {
  if (d_score == 0.0) return;
  const std::size_t width = hp_.feature_width();
  const std::size_t chunks = hp_.chunks();
  const std::size_t w = hp_.window;
  grad.score_bias += d_score;
  for (std::size_t j = 0; j < width; ++j) {
    grad.score_weights[j] += d_score * state.features[j];
  }
  for (std::size_t j = 0; j < width; ++j) {
    const int p = state.argmax[j];
    if (p < 0) continue;
    double g = d_score * params_.score_weights[j];
    if (!state.mask.empty()) g *= state.mask[j];
    if (g == 0.0) continue;
    const std::size_t f = j / chunks;
    grad.filter_bias[f] += g;
    double* table = grad.lookup.data() + f * w * kGridVocabSize;
    for (std::size_t k = 0; k < w; ++k) {
      table[k * kGridVocabSize + static_cast<std::size_t>(seq[static_cast<std::size_t>(p) + k])] += g;
    }
  }
}

Parameters CoherenceModel::gradient(const GradientAccumulator& grad, double scale) const {
  const std::size_t d = hp_.emb_dim;
  Parameters out = Parameters::zeros(hp_);
  for (std::size_t fk = 0; fk < hp_.n_filters * hp_.window; ++fk) {
    const double* w = params_.filters.data() + fk * d;
    double* dw = out.filters.data() + fk * d;
    for (std::size_t v = 0; v < kGridVocabSize; ++v) {
      if (v == kPad) continue;
      const double g = grad.lookup[fk * kGridVocabSize + v] * scale;
      if (g == 0.0) continue;
      const double* e = params_.embeddings.data() + v * d;
      double* de = out.embeddings.data() + v * d;
      for (std::size_t i = 0; i < d; ++i) {
        dw[i] += g * e[i];
        de[i] += g * w[i];
      }
    }
  }
  for (std::size_t f = 0; f < hp_.n_filters; ++f) out.filter_bias[f] = grad.filter_bias[f] * scale;
  for (std::size_t j = 0; j < out.score_weights.size(); ++j) {
    out.score_weights[j] = grad.score_weights[j] * scale;
  }
  out.score_bias = grad.score_bias * scale;
  return out;
}

double ranking_loss(double score_pos, double score_neg) {
  return std::max(0.0, 1.0 - (score_pos - score_neg));
}

void rmsprop_update(std::span<double> param, std::span<const double> grad,
                    std::span<double> cache, double lr, double decay, double eps) {
  if (param.size() != grad.size() || param.size() != cache.size()) {
    throw ValidationError("rmsprop_update: shape mismatch");
  }
  for (std::size_t i = 0; i < param.size(); ++i) {
    const double g = grad[i];
    cache[i] = decay * cache[i] + (1.0 - decay) * g * g;
    param[i] -= lr * g / (std::sqrt(cache[i]) + eps);
  }
}

// Serialization

namespace {

constexpr char kMagic[8] = {'G', 'R', 'I', 'D', 'C', 'N', 'N', '1'};
constexpr char kVocabulary[] = "S O X - PAD";

void put_u64(std::ostream& out, std::uint64_t v) {
  char buf[8];
  for (int i = 0; i < 8; ++i) buf[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  out.write(buf, 8);
}

void put_f64(std::ostream& out, double v) { put_u64(out, std::bit_cast<std::uint64_t>(v)); }

std::uint64_t get_u64(std::istream& in) {
  unsigned char buf[8];
  if (!in.read(reinterpret_cast<char*>(buf), 8)) {
    throw ValidationError("model file is truncated");
  }
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(buf[i]) << (8 * i);
  return v;
}

double get_f64(std::istream& in) { return std::bit_cast<double>(get_u64(in)); }

std::size_t get_size(std::istream& in, std::uint64_t limit) {
  const std::uint64_t v = get_u64(in);
  if (v > limit) throw ValidationError("model file has an implausible size field");
  return static_cast<std::size_t>(v);
}

void put_tensor(std::ostream& out, const std::vector<double>& t) {
  put_u64(out, t.size());
  for (double v : t) put_f64(out, v);
}

std::vector<double> get_tensor(std::istream& in, std::size_t expected) {
  const std::size_t n = get_size(in, std::uint64_t{1} << 32);
  if (n != expected) throw ValidationError("model tensor size does not match hyperparameters");
  std::vector<double> t(n);
  for (auto& v : t) v = get_f64(in);
  return t;
}

}  // namespace

void save_model(const CoherenceModel& model, std::ostream& out) {
  const HyperParams& hp = model.hyper_params();
  out.write(kMagic, sizeof(kMagic));
  const std::string vocab = kVocabulary;
  put_u64(out, vocab.size());
  out.write(vocab.data(), static_cast<std::streamsize>(vocab.size()));
  for (std::size_t v : {hp.batch, hp.emb_dim, hp.n_filters, hp.window, hp.pool, hp.seq_len,
                        hp.max_epochs, hp.patience, hp.negatives}) {
    put_u64(out, v);
  }
  put_u64(out, static_cast<std::uint64_t>(hp.pooling));
  for (double v : {hp.dropout, hp.learning_rate, hp.rmsprop_decay, hp.rmsprop_epsilon}) {
    put_f64(out, v);
  }
  const Parameters& p = model.parameters();
  put_tensor(out, p.embeddings);
  put_tensor(out, p.filters);
  put_tensor(out, p.filter_bias);
  put_tensor(out, p.score_weights);
  put_f64(out, p.score_bias);
}

void save_model_file(const CoherenceModel& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  save_model(model, out);
  out.flush();
  if (!out) throw IoError("write to '" + path + "' failed");
}

CoherenceModel load_model(std::istream& in) {
  char magic[sizeof(kMagic)];
  if (!in.read(magic, sizeof(magic)) || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw ValidationError("not a GRIDCNN1 model file");
  }
  const std::size_t vocab_size = get_size(in, 64);
  std::string vocab(vocab_size, '\0');
  if (!in.read(vocab.data(), static_cast<std::streamsize>(vocab_size))) {
    throw ValidationError("model file is truncated");
  }
  if (vocab != kVocabulary) throw ValidationError("model vocabulary '" + vocab + "' unsupported");

  constexpr std::uint64_t kLimit = std::uint64_t{1} << 24;
  HyperParams hp;
  hp.batch = get_size(in, kLimit);
  hp.emb_dim = get_size(in, kLimit);
  hp.n_filters = get_size(in, kLimit);
  hp.window = get_size(in, kLimit);
  hp.pool = get_size(in, kLimit);
  hp.seq_len = get_size(in, kLimit);
  hp.max_epochs = get_size(in, kLimit);
  hp.patience = get_size(in, kLimit);
  hp.negatives = get_size(in, kLimit);
  const std::uint64_t pooling = get_u64(in);
  if (pooling > 1) throw ValidationError("model file has an unknown pooling mode");
  hp.pooling = static_cast<PoolingMode>(pooling);
  hp.dropout = get_f64(in);
  hp.learning_rate = get_f64(in);
  hp.rmsprop_decay = get_f64(in);
  hp.rmsprop_epsilon = get_f64(in);
  hp.validate();

  if (hp.n_filters * hp.feature_width() > (std::uint64_t{1} << 32)) {
    throw ValidationError("model file describes an implausibly large model");
  }
  const Parameters shape = Parameters::zeros(hp);
  Parameters p;
  p.embeddings = get_tensor(in, shape.embeddings.size());
  p.filters = get_tensor(in, shape.filters.size());
  p.filter_bias = get_tensor(in, shape.filter_bias.size());
  p.score_weights = get_tensor(in, shape.score_weights.size());
  p.score_bias = get_f64(in);
  if (!p.all_finite()) throw ValidationError("model file contains non-finite parameters");
  return CoherenceModel(hp, std::move(p));
}

CoherenceModel load_model_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  return load_model(in);
}

// Gradient check

namespace {

// Loss of the pair, and whether both forward passes selected the same
// positions as the reference states.
std::pair<double, bool> probe_loss(const CoherenceModel& model, std::span<const GridToken> pos,
                                   std::span<const GridToken> neg, const ForwardState& ref_pos,
                                   const ForwardState& ref_neg) {
  ForwardState sp, sn;
  const double loss = ranking_loss(model.forward(pos, {}, sp), model.forward(neg, {}, sn));
  return {loss, sp.argmax == ref_pos.argmax && sn.argmax == ref_neg.argmax};
}

}  // namespace

GradientCheckResult gradient_check(const CoherenceModel& model,
                                   std::span<const GridToken> pos,
                                   std::span<const GridToken> neg, double epsilon,
                                   std::size_t samples, std::uint64_t seed,
                                   bool corrupt_score_gradient) {
  const HyperParams& hp = model.hyper_params();
  ForwardState sp, sn;
  const double phi_pos = model.forward(pos, {}, sp);
  const double phi_neg = model.forward(neg, {}, sn);
  const double margin = 1.0 - (phi_pos - phi_neg);
  if (std::abs(margin) <= 10.0 * epsilon) {
    throw ValidationError("pair sits on the hinge boundary; choose a different pair");
  }

  GradientAccumulator acc(hp);
  if (margin > 0.0) {
    model.backward(pos, sp, -1.0, acc);
    model.backward(neg, sn, 1.0, acc);
  }
  Parameters analytic = model.gradient(acc);
  if (corrupt_score_gradient) {
    for (auto& g : analytic.score_weights) g = -g;
  }

  // Coordinates as (tensor, index); the PAD embedding row is not trainable.
  struct Coord {
    int tensor;
    std::size_t index;
  };
  std::vector<Coord> all;
  for (std::size_t i = 0; i < analytic.embeddings.size(); ++i) {
    if (i / hp.emb_dim != kPad) all.push_back({0, i});
  }
  for (std::size_t i = 0; i < analytic.filters.size(); ++i) all.push_back({1, i});
  for (std::size_t i = 0; i < analytic.filter_bias.size(); ++i) all.push_back({2, i});
  for (std::size_t i = 0; i < analytic.score_weights.size(); ++i) all.push_back({3, i});
  all.push_back({4, 0});

  SplitMix64 rng(seed);
  shuffle(std::span<Coord>(all), rng);

  auto ref = [](Parameters& p, const Coord& c) -> double& {
    switch (c.tensor) {
      case 0: return p.embeddings[c.index];
      case 1: return p.filters[c.index];
      case 2: return p.filter_bias[c.index];
      case 3: return p.score_weights[c.index];
      default: return p.score_bias;
    }
  };

  GradientCheckResult result;
  result.loss = std::max(0.0, margin);
  CoherenceModel probe = model;
  Parameters params = model.parameters();
  for (const Coord& c : all) {
    if (result.coordinates == samples) break;
    const double original = ref(params, c);
    ref(params, c) = original + epsilon;
    probe.set_parameters(params);
    const auto [up, up_same] = probe_loss(probe, pos, neg, sp, sn);
    ref(params, c) = original - epsilon;
    probe.set_parameters(params);
    const auto [down, down_same] = probe_loss(probe, pos, neg, sp, sn);
    ref(params, c) = original;
    if (!up_same || !down_same) {
      ++result.skipped;
      continue;
    }
    ++result.coordinates;

    const double numeric = (up - down) / (2.0 * epsilon);
    const double a = ref(analytic, c);
    const double rel = std::abs(a - numeric) / std::max(1e-8, std::abs(a) + std::abs(numeric));
    result.max_relative_error = std::max(result.max_relative_error, rel);
  }
  return result;
}

}  // namespace threadrec
