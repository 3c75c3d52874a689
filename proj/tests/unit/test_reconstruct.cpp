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

#include <cmath>
#include <sstream>

#include "doctest.h"
#include "fixtures.hpp"
#include "threadrec/error.hpp"
#include "threadrec/random.hpp"
#include "threadrec/reconstruct.hpp"
#include "threadrec/synthetic.hpp"

using namespace threadrec;

namespace {

std::vector<int> pv(std::initializer_list<int> v) { return v; }

HyperParams small_hp() {
  HyperParams hp;
  hp.emb_dim = 6;
  hp.n_filters = 8;
  hp.seq_len = 120;
  return hp;
}

CoherenceModel random_model(const HyperParams& hp, std::uint64_t seed) {
  Parameters p = CoherenceModel::initialize(hp, seed).parameters();
  SplitMix64 rng(seed + 1);
  for (auto& v : p.score_weights) v = rng.uniform() * 2 - 1;
  for (auto& v : p.filter_bias) v = (rng.uniform() * 2 - 1) * 0.01;
  p.score_bias = 0.3;
  return CoherenceModel(hp, std::move(p));
}

}  // namespace

TEST_CASE("strategy names") {
  for (auto k : {StrategyKind::kGridCnn, StrategyKind::kAllPrevious, StrategyKind::kAllFirst,
                 StrategyKind::kCosSim}) {
    CHECK(parse_strategy(strategy_name(k)) == k);
  }
  CHECK(strategy_name(StrategyKind::kCosSim) == "cos-sim");
  CHECK_THROWS_AS(parse_strategy("random"), ValidationError);
}

TEST_CASE("positional baselines") {
  const auto five = testing::text_thread({"a.", "b.", "c.", "d.", "e."});
  const auto two = testing::text_thread({"a.", "b."});
  const auto one = testing::text_thread({"a."});
  CHECK(predict_all_previous(five).values() == pv({0, 1, 2, 3, 4}));
  CHECK(predict_all_previous(two).values() == pv({0, 1}));
  CHECK(predict_all_previous(one).values() == pv({0}));
  CHECK(predict_all_first(five).values() == pv({0, 1, 1, 1, 1}));
  CHECK(predict_all_first(two) == predict_all_previous(two));
  CHECK(predict_all_first(one) == predict_all_previous(one));

  const Thread reg = testing::registry_thread();
  const auto first = predict_all_first(reg);
  int correct = 0;
  for (std::size_t i = 1; i < 5; ++i) correct += first.parent_of(i) == reg.gold_parents->parent_of(i);
  CHECK(correct == 3);
}

TEST_CASE("cosine") {
  const TermVector u{{"a", 1.0}, {"b", 1.0}};
  const TermVector v{{"a", 1.0}};
  CHECK(cosine(u, u) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(cosine(u, TermVector{{"c", 2.0}}) == 0.0);
  CHECK(cosine(u, v) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-15));
  CHECK(cosine(u, {}) == 0.0);
  CHECK(cosine({}, {}) == 0.0);
  const auto tv = term_vector(testing::text_thread({"The cat. the dog."}).posts[0]);
  CHECK(tv == TermVector{{"cat", 1.0}, {"dog", 1.0}, {"the", 2.0}});
}

TEST_CASE("cos-sim baseline") {
  const auto t = testing::text_thread(
      {"my printer jams paper", "try rebooting the router", "my printer jams paper"});
  CHECK(predict_cos_sim(t).values() == pv({0, 1, 1}));

  const auto same = testing::text_thread({"same words", "same words", "same words", "same words"});
  CHECK(predict_cos_sim(same).values() == pv({0, 1, 2, 3}));

  const auto empty = testing::text_thread({"router reset", "router reset", ""});
  CHECK(predict_cos_sim(empty).values() == pv({0, 1, 2}));

  const auto unrelated = testing::text_thread({"alpha beta", "gamma delta", "epsilon"});
  CHECK(predict_cos_sim(unrelated).values() == pv({0, 1, 2}));
}

TEST_CASE("grid-cnn prediction") {
  const HyperParams hp = small_hp();
  const auto zero = CoherenceModel::initialize(hp, 4);

  const auto two = testing::text_thread({"a b.", "c d."});
  const auto p2 = predict_grid_cnn(zero, two);
  CHECK(p2.parents.values() == pv({0, 1}));
  CHECK_FALSE(p2.score.has_value());

  // Zero score layer: every candidate ties, the smallest wins.
  const Thread reg = testing::registry_thread();
  const auto tie = predict_grid_cnn(zero, reg);
  CHECK(tie.parents.values() == pv({0, 1, 1, 1, 1}));
  REQUIRE(tie.score.has_value());
  CHECK(*tie.score == 0.0);

  Thread nine = testing::text_thread({"a.", "b.", "c.", "d.", "e.", "f.", "g.", "h.", "i."});
  CHECK_THROWS_AS(predict_grid_cnn(zero, nine), ValidationError);
  CHECK_THROWS_AS(predict(StrategyKind::kGridCnn, reg, nullptr), ValidationError);
}

TEST_CASE("grid-cnn is the argmax over all candidates") {
  const HyperParams hp = small_hp();
  const auto model = random_model(hp, 6);
  GeneratorConfig config;
  config.threads = 15;
  for (const auto& t : generate_synthetic_corpus(config, 8)) {
    const auto pred = predict_grid_cnn(model, t);
    if (t.num_posts() < 2) continue;
    const auto tagged = tag_thread(t);
    double best = -1e300;
    ParentVector arg;
    std::size_t scored = 0;
    for (const auto& c : enumerate_candidate_trees(t.num_posts())) {
      const double s = model.score(grid_sequence(t, tagged, c, hp.seq_len));
      ++scored;
      if (s > best) {
        best = s;
        arg = c;
      }
    }
    CHECK(scored == count_candidate_trees(t.num_posts()));
    CHECK(pred.parents == arg);
    if (scored > 1) CHECK(*pred.score == best);
  }
}

TEST_CASE("grid-cnn is invariant under positive affine rescaling") {
  const HyperParams hp = small_hp();
  const auto model = random_model(hp, 10);
  GeneratorConfig config;
  config.threads = 30;
  const auto corpus = generate_synthetic_corpus(config, 12);
  for (double scale : {0.25, 4.0, 3.0}) {
    Parameters p = model.parameters();
    for (auto& w : p.score_weights) w *= scale;
    p.score_bias = p.score_bias * scale + 1.5;
    const CoherenceModel scaled(hp, p);
    for (const auto& t : corpus) {
      CHECK(predict_grid_cnn(scaled, t).parents == predict_grid_cnn(model, t).parents);
    }
  }
}

TEST_CASE("every strategy yields a valid tree") {
  const HyperParams hp = small_hp();
  const auto model = random_model(hp, 2);
  GeneratorConfig config;
  config.threads = 25;
  config.min_posts = 1;
  const auto corpus = generate_synthetic_corpus(config, 14);
  for (auto k : {StrategyKind::kGridCnn, StrategyKind::kAllPrevious, StrategyKind::kAllFirst,
                 StrategyKind::kCosSim}) {
    const auto preds = predict_all(k, corpus, &model);
    REQUIRE(preds.size() == corpus.size());
    for (std::size_t i = 0; i < preds.size(); ++i) {
      CHECK(preds[i].thread_id == corpus[i].thread_id);
      CHECK(preds[i].parents.size() == corpus[i].num_posts());
      CHECK(ParentVector::is_valid(preds[i].parents.values()));
    }
  }
}

TEST_CASE("prediction files round trip") {
  std::vector<Prediction> preds = {{"a", ParentVector({0, 1, 1}), 0.125},
                                   {"b", ParentVector({0}), std::nullopt}};
  std::stringstream io;
  write_predictions(io, preds, "grid-cnn");
  const auto file = read_predictions(io);
  CHECK(file.strategy == "grid-cnn");
  REQUIRE(file.predictions.size() == 2);
  CHECK(file.predictions[0].parents == preds[0].parents);
  CHECK(file.predictions[0].score == preds[0].score);
  CHECK_FALSE(file.predictions[1].score.has_value());

  std::istringstream bad(R"({"thread_id":"a","parents":[null,2]})");
  CHECK_THROWS_AS(read_predictions(bad), ValidationError);
}
