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

#include "threadrec/cli.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "threadrec/coherence_model.hpp"
#include "threadrec/conversation_tree.hpp"
#include "threadrec/corpus.hpp"
#include "threadrec/entity_grid.hpp"
#include "threadrec/error.hpp"
#include "threadrec/evaluation.hpp"
#include "threadrec/random.hpp"
#include "threadrec/reconstruct.hpp"
#include "threadrec/synthetic.hpp"
#include "threadrec/training.hpp"

namespace threadrec::cli {

namespace {

// Streams bound to "-" or a path.
class Input {
 public:
  Input(const std::string& path, std::istream& fallback) {
    if (path.empty() || path == "-") {
      stream_ = &fallback;
      return;
    }
    file_ = std::make_unique<std::ifstream>(path);
    if (!*file_) throw IoError("cannot open '" + path + "' for reading");
    stream_ = file_.get();
  }
  std::istream& get() { return *stream_; }

 private:
  std::unique_ptr<std::ifstream> file_;
  std::istream* stream_ = nullptr;
};

class Output {
 public:
  Output(const std::string& path, std::ostream& fallback) : path_(path) {
    if (path.empty() || path == "-") {
      stream_ = &fallback;
      return;
    }
    file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
    if (!*file_) throw IoError("cannot open '" + path + "' for writing");
    stream_ = file_.get();
  }
  std::ostream& get() { return *stream_; }
  void close() {
    stream_->flush();
    if (!*stream_) throw IoError("write to '" + (path_.empty() ? "stdout" : path_) + "' failed");
  }

 private:
  std::string path_;
  std::unique_ptr<std::ofstream> file_;
  std::ostream* stream_ = nullptr;
};

std::vector<Thread> read_corpus(const std::string& path, std::istream& in) {
  Input input(path, in);
  return load_corpus(input.get());
}

void add_hyperparam_flags(CLI::App& cmd, HyperParams& hp) {
  cmd.add_option("--batch", hp.batch, "mini-batch size in pairs")->capture_default_str();
  cmd.add_option("--emb", hp.emb_dim, "embedding size")->capture_default_str();
  cmd.add_option("--dropout", hp.dropout, "dropout rate on pooled features")
      ->capture_default_str();
  cmd.add_option("--filters", hp.n_filters, "number of convolution filters")
      ->capture_default_str();
  cmd.add_option("--window", hp.window, "convolution window")->capture_default_str();
  cmd.add_option("--pool", hp.pool, "max-pooling length")->capture_default_str();
  cmd.add_option("--seq-len", hp.seq_len, "linearized grid length")->capture_default_str();
  cmd.add_option("--lr", hp.learning_rate, "RMSprop learning rate")->capture_default_str();
  cmd.add_option("--decay", hp.rmsprop_decay, "RMSprop decay")->capture_default_str();
  cmd.add_option("--eps", hp.rmsprop_epsilon, "RMSprop epsilon")->capture_default_str();
  cmd.add_option("--epochs", hp.max_epochs, "maximum epochs")->capture_default_str();
  cmd.add_option("--patience", hp.patience, "early-stopping patience")->capture_default_str();
  cmd.add_option("--negatives", hp.negatives, "false trees per gold tree")
      ->capture_default_str();
}

struct Context {
  std::istream& in;
  std::ostream& out;
  std::ostream& err;
};

int cmd_synth(const Context& ctx, const GeneratorConfig& config, std::uint64_t seed,
              const std::string& out_path) {
  const auto corpus = generate_synthetic_corpus(config, derive_seed(seed, "corpus"));
  Output out(out_path, ctx.out);
  write_corpus(out.get(), corpus);
  out.close();
  ctx.err << "wrote " << corpus.size() << " threads\n";
  return kOk;
}

int cmd_synth_check(const Context& ctx, const std::string& input) {
  Input in(input, ctx.in);
  std::stringstream original;
  original << in.get().rdbuf();
  const std::string text = original.str();
  std::istringstream first(text);
  const auto threads = load_corpus(first);
  std::ostringstream reserialized;
  write_corpus(reserialized, threads);
  std::istringstream second(reserialized.str());
  if (load_corpus(second) != threads) {
    ctx.err << "round trip changed the corpus\n";
    return kValidationError;
  }
  std::size_t posts = 0, sentences = 0;
  for (const auto& t : threads) {
    posts += t.num_posts();
    sentences += t.num_sentences();
  }
  ctx.out << "threads " << threads.size() << " posts " << posts << " sentences " << sentences
          << " round-trip ok\n";
  return kOk;
}

int cmd_split(const Context& ctx, const std::string& input, std::size_t train_count,
              std::size_t dev_count, std::optional<std::size_t> test_count,
              std::uint64_t seed, const std::string& prefix) {
  const auto corpus = read_corpus(input, ctx.in);
  const auto split =
      split_corpus(corpus, train_count, dev_count, test_count, derive_seed(seed, "split"));
  write_corpus_file(prefix + ".train.jsonl", split.train);
  write_corpus_file(prefix + ".dev.jsonl", split.dev);
  write_corpus_file(prefix + ".test.jsonl", split.test);
  ctx.out << "train " << split.train.size() << " dev " << split.dev.size() << " test "
          << split.test.size() << '\n';
  return kOk;
}

int cmd_gridify(const Context& ctx, const std::string& input, const std::string& thread_id,
                const std::string& parents_text) {
  const auto corpus = read_corpus(input, ctx.in);
  const auto it = std::find_if(corpus.begin(), corpus.end(),
                               [&](const Thread& t) { return t.thread_id == thread_id; });
  if (it == corpus.end()) throw ValidationError("no thread with id '" + thread_id + "'");
  ParentVector parents;
  if (!parents_text.empty()) {
    parents = ParentVector::parse(parents_text);
  } else if (it->gold_parents) {
    parents = *it->gold_parents;
  } else {
    throw ValidationError("thread '" + thread_id + "' has no gold tree; pass --parents");
  }
  ctx.out << build_grid(*it, parents).render();
  return kOk;
}

int cmd_enumerate(const Context& ctx, std::size_t posts, bool list) {
  const auto candidates = enumerate_candidate_trees(posts);
  ctx.out << candidates.size() << '\n';
  if (list) {
    for (const auto& c : candidates) ctx.out << c.to_string() << '\n';
  }
  return kOk;
}

int cmd_train(const Context& ctx, const std::string& input, const std::string& dev_path,
              std::size_t dev_size, const std::string& out_path, const std::string& report_path,
              const HyperParams& hp, std::uint64_t seed) {
  auto corpus = read_corpus(input, ctx.in);
  CorpusSplit split;
  if (!dev_path.empty()) {
    split.train = std::move(corpus);
    split.dev = load_corpus_file(dev_path);
  } else {
    if (corpus.size() < 2) throw ValidationError("need at least two threads to carve a dev set");
    const std::size_t dev = std::min(dev_size, corpus.size() / 2);
    split = split_corpus(corpus, corpus.size() - dev, dev, 0, derive_seed(seed, "split"));
  }
  ctx.err << "training on " << split.train.size() << " threads, dev " << split.dev.size()
          << '\n';
  const auto initial = CoherenceModel::initialize(hp, derive_seed(seed, "init"));
  auto result = train(initial, split, hp, derive_seed(seed, "train"), [&](const EpochStats& e) {
    nlohmann::ordered_json rec;
    rec["epoch"] = e.epoch;
    rec["mean_loss"] = e.mean_loss;
    rec["train_pair_accuracy"] = e.train_pair_accuracy;
    rec["dev_pair_accuracy"] = e.dev_pair_accuracy;
    rec["dev_tree_accuracy"] = e.dev_tree_accuracy;
    ctx.out << rec.dump() << std::endl;
  });
  nlohmann::ordered_json summary;
  summary["best_epoch"] = result.report.best_epoch;
  summary["stop_reason"] = stop_reason_name(result.report.stop_reason);
  summary["epochs_run"] = result.report.epochs.size();
  ctx.out << summary.dump() << '\n';
  save_model_file(result.model, out_path);
  if (!report_path.empty()) {
    Output report(report_path, ctx.out);
    report.get() << result.report.to_jsonl();
    report.close();
  }
  return kOk;
}

int cmd_predict(const Context& ctx, const std::string& strategy_text,
                const std::string& model_path, const std::string& input,
                const std::string& out_path) {
  const StrategyKind kind = parse_strategy(strategy_text);
  std::optional<CoherenceModel> model;
  if (kind == StrategyKind::kGridCnn) {
    if (model_path.empty()) throw ValidationError("--model is required for grid-cnn");
    model = load_model_file(model_path);
  }
  const auto threads = read_corpus(input, ctx.in);
  const auto preds = predict_all(kind, threads, model ? &*model : nullptr);
  Output out(out_path, ctx.out);
  write_predictions(out.get(), preds, strategy_name(kind));
  out.close();
  return kOk;
}

int cmd_evaluate(const Context& ctx, const std::string& gold_path,
                 const std::vector<std::string>& pred_paths, const std::string& out_path) {
  const auto gold = read_corpus(gold_path, ctx.in);
  Report report;
  for (const auto& path : pred_paths) {
    auto file = read_predictions_file(path);
    std::string name = file.strategy;
    if (name.empty()) {
      name = path.substr(path.find_last_of('/') == std::string::npos ? 0
                                                                      : path.find_last_of('/') + 1);
    }
    report.rows.push_back({name, evaluate_predictions(file.predictions, gold)});
  }
  ctx.out << report.to_table();
  if (!out_path.empty()) {
    Output out(out_path, ctx.out);
    out.get() << report.to_jsonl();
    out.close();
  }
  return kOk;
}

int cmd_gradcheck(const Context& ctx, const std::string& model_path, const std::string& input,
                  double epsilon, std::size_t samples, std::uint64_t seed) {
  const auto model = load_model_file(model_path);
  const auto threads = read_corpus(input, ctx.in);
  const std::size_t length = model.hyper_params().seq_len;
  for (std::size_t t = 0; t < threads.size(); ++t) {
    const Thread& thread = threads[t];
    if (!thread.gold_parents || thread.num_posts() < 3) continue;
    const TaggedThread tagged = tag_thread(thread);
    const auto gold = grid_sequence(thread, tagged, *thread.gold_parents, length);
    const double gold_score = model.score(gold);
    for (const auto& pair : make_training_pairs(thread, 20, derive_seed(seed, t))) {
      const auto neg = grid_sequence(thread, tagged, pair.negative, length);
      const double margin = 1.0 - (gold_score - model.score(neg));
      if (margin <= 10.0 * epsilon) continue;  // flat or on the kink
      const auto r = gradient_check(model, gold, neg, epsilon, samples,
                                    derive_seed(seed, "gradcheck"));
      ctx.err << "thread " << thread.thread_id << " gold " << thread.gold_parents->to_string()
              << " false " << pair.negative.to_string() << " loss " << r.loss << " over "
              << r.coordinates << " coordinates (" << r.skipped
              << " skipped at a switch)\n";
      ctx.out << r.max_relative_error << '\n';
      return kOk;
    }
  }
  throw ValidationError("no thread yields a pair inside the active region of the hinge");
}

}  // namespace

int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out,
        std::ostream& err) {
  CLI::App app{"Reply-tree reconstruction for forum threads with a Grid-CNN coherence scorer",
               "threadrec"};
  app.require_subcommand(1);
  std::uint64_t seed = 42;
  app.add_option("--seed", seed, "root seed for every stochastic step")->capture_default_str();

  GeneratorConfig gen;
  std::string synth_out;
  auto* synth = app.add_subcommand("synth", "generate a synthetic corpus");
  synth->add_option("--threads", gen.threads)->capture_default_str();
  synth->add_option("--min-posts", gen.min_posts)->capture_default_str();
  synth->add_option("--max-posts", gen.max_posts)->capture_default_str();
  synth->add_option("--min-sentences", gen.min_sentences)->capture_default_str();
  synth->add_option("--max-sentences", gen.max_sentences)->capture_default_str();
  synth->add_option("--entities-per-branch", gen.entities_per_branch)->capture_default_str();
  synth->add_option("--cohesion", gen.branch_cohesion)->capture_default_str();
  synth->add_option("--cross-talk", gen.cross_talk)->capture_default_str();
  synth->add_option("--filler", gen.filler_words)->capture_default_str();
  synth->add_option("--seed", seed)->capture_default_str();
  synth->add_option("--out", synth_out, "output file (default stdout)");

  std::string check_in = "-";
  auto* check = app.add_subcommand("synth-check", "parse a corpus and verify its round trip");
  check->add_option("--input", check_in)->capture_default_str();

  std::string split_in, split_prefix;
  std::size_t split_train = 1500, split_dev = 200;
  std::optional<std::size_t> split_test;
  auto* split = app.add_subcommand("split", "shuffle and partition a corpus");
  split->add_option("--input", split_in)->required();
  split->add_option("--train", split_train)->capture_default_str();
  split->add_option("--dev", split_dev)->capture_default_str();
  split->add_option("--test", split_test, "test size (default: the rest)");
  split->add_option("--seed", seed)->capture_default_str();
  split->add_option("--prefix", split_prefix, "writes PREFIX.{train,dev,test}.jsonl")
      ->required();

  std::string grid_in, grid_thread, grid_parents;
  auto* gridify = app.add_subcommand("gridify", "print the conversational entity grid");
  gridify->add_option("--input", grid_in)->required();
  gridify->add_option("--thread", grid_thread)->required();
  gridify->add_option("--parents", grid_parents, "e.g. 1,1,1,4 (default: gold tree)");

  std::size_t enum_posts = 0;
  bool enum_list = false;
  auto* enumerate = app.add_subcommand("enumerate", "count or list candidate trees");
  enumerate->add_option("--posts", enum_posts)->required();
  enumerate->add_flag("--list", enum_list, "print one parent vector per line");

  HyperParams hp;
  std::string train_in, train_dev, train_out, train_report;
  std::size_t train_dev_size = 200;
  auto* train_cmd = app.add_subcommand("train", "train a Grid-CNN model");
  train_cmd->add_option("--input", train_in)->required();
  train_cmd->add_option("--dev", train_dev, "development corpus (default: carve from input)");
  train_cmd->add_option("--dev-size", train_dev_size)->capture_default_str();
  train_cmd->add_option("--out", train_out)->required();
  train_cmd->add_option("--report", train_report, "also write the epoch log to a file");
  train_cmd->add_option("--seed", seed)->capture_default_str();
  add_hyperparam_flags(*train_cmd, hp);

  std::string pred_strategy, pred_model, pred_in, pred_out;
  auto* predict_cmd = app.add_subcommand("predict", "predict reply trees");
  predict_cmd->add_option("--strategy", pred_strategy)
      ->required()
      ->check(CLI::IsMember({"grid-cnn", "all-previous", "all-first", "cos-sim"}));
  predict_cmd->add_option("--model", pred_model);
  predict_cmd->add_option("--input", pred_in)->required();
  predict_cmd->add_option("--out", pred_out, "output file (default stdout)");

  std::string eval_gold, eval_out;
  std::vector<std::string> eval_preds;
  auto* evaluate_cmd = app.add_subcommand("evaluate", "score predictions against gold trees");
  evaluate_cmd->add_option("--gold", eval_gold)->required();
  evaluate_cmd->add_option("--pred", eval_preds)->required();
  evaluate_cmd->add_option("--out", eval_out, "structured records (JSON lines)");

  std::string gc_model, gc_in;
  double gc_epsilon = 1e-4;
  std::size_t gc_samples = 256;
  auto* gradcheck = app.add_subcommand("gradcheck", "finite-difference gradient check");
  gradcheck->add_option("--model", gc_model)->required();
  gradcheck->add_option("--input", gc_in)->required();
  gradcheck->add_option("--epsilon", gc_epsilon)->capture_default_str();
  gradcheck->add_option("--samples", gc_samples)->capture_default_str();
  gradcheck->add_option("--seed", seed)->capture_default_str();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    if (code == 0) return kOk;
    err << app.help();
    return kValidationError;
  }

  const Context ctx{in, out, err};
  try {
    if (*synth) return cmd_synth(ctx, gen, seed, synth_out);
    if (*check) return cmd_synth_check(ctx, check_in);
    if (*split) {
      return cmd_split(ctx, split_in, split_train, split_dev, split_test, seed, split_prefix);
    }
    if (*gridify) return cmd_gridify(ctx, grid_in, grid_thread, grid_parents);
    if (*enumerate) return cmd_enumerate(ctx, enum_posts, enum_list);
    if (*train_cmd) {
      return cmd_train(ctx, train_in, train_dev, train_dev_size, train_out, train_report, hp,
                       seed);
    }
    if (*predict_cmd) return cmd_predict(ctx, pred_strategy, pred_model, pred_in, pred_out);
    if (*evaluate_cmd) return cmd_evaluate(ctx, eval_gold, eval_preds, eval_out);
    if (*gradcheck) return cmd_gradcheck(ctx, gc_model, gc_in, gc_epsilon, gc_samples, seed);
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kIoError;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return kValidationError;
  } catch (const TrainingError& e) {
    err << "error: " << e.what() << '\n';
    return kValidationError;
  }
  err << app.help();
  return kValidationError;
}

int run(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cin, std::cout, std::cerr);
}

}  // namespace threadrec::cli
