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

#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "fixtures.hpp"
#include "threadrec/cli.hpp"
#include "threadrec/reconstruct.hpp"

using namespace threadrec;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run_cli(const std::vector<std::string>& args, const std::string& input = "") {
  std::istringstream in(input);
  std::ostringstream out, err;
  const int code = cli::run(args, in, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

struct TempDir {
  std::filesystem::path path;
  TempDir() {
    path = std::filesystem::temp_directory_path() /
           ("threadrec-cli-" + std::to_string(std::hash<std::string>{}(
                                   std::to_string(reinterpret_cast<std::uintptr_t>(this)))));
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
  std::string operator/(const std::string& name) const { return (path / name).string(); }
};

}  // namespace

TEST_CASE("enumerate") {
  CHECK(run_cli({"enumerate", "--posts", "5"}).out == "24\n");
  const auto list = run_cli({"enumerate", "--posts", "3", "--list"});
  CHECK(list.code == cli::kOk);
  CHECK(list.out == "2\n0,1,1\n0,1,2\n");
  CHECK(run_cli({"enumerate", "--posts", "9", "--list"}).code == cli::kValidationError);
}

TEST_CASE("usage errors") {
  CHECK(run_cli({}).code == cli::kValidationError);
  CHECK(run_cli({"bogus"}).code == cli::kValidationError);
  CHECK(run_cli({"train", "--input", "x.jsonl"}).code == cli::kValidationError);
  CHECK(run_cli({"synth-check", "--input", "/nonexistent/c.jsonl"}).code == cli::kIoError);
  const auto parse = run_cli({"synth-check"}, "{oops}\n");
  CHECK(parse.code == cli::kValidationError);
  CHECK(parse.err.find("line 1") != std::string::npos);
}

TEST_CASE("synth then synth-check") {
  const auto synth = run_cli({"synth", "--threads", "10", "--seed", "1"});
  REQUIRE(synth.code == cli::kOk);
  CHECK(run_cli({"synth", "--threads", "10", "--seed", "1"}).out == synth.out);
  const auto check = run_cli({"synth-check"}, synth.out);
  CHECK(check.code == cli::kOk);
  CHECK(check.out.find("round-trip ok") != std::string::npos);
}

TEST_CASE("gridify the fixture") {
  const auto r = run_cli({"gridify", "--input", testing::fixture_path("registry_thread.jsonl"), "--thread",
                          "registry-cleanup"});
  REQUIRE(r.code == cli::kOk);
  CHECK(r.out.find("s3 s6 s10") != std::string::npos);
  const auto alt = run_cli({"gridify", "--input", testing::fixture_path("registry_thread.jsonl"),
                            "--thread", "registry-cleanup", "--parents", "1,2,3,4"});
  CHECK(alt.code == cli::kOk);
  CHECK(alt.out != r.out);
  CHECK(run_cli({"gridify", "--input", testing::fixture_path("registry_thread.jsonl"), "--thread", "none"})
            .code == cli::kValidationError);
}

TEST_CASE("full pipeline on 100 threads") {
  TempDir dir;
  REQUIRE(run_cli({"synth", "--threads", "100", "--seed", "3", "--out", dir / "all.jsonl"}).code ==
          cli::kOk);
  REQUIRE(run_cli({"split", "--input", dir / "all.jsonl", "--train", "60", "--dev", "20",
                   "--prefix", dir / "c"})
              .code == cli::kOk);
  const std::vector<std::string> train_args = {
      "train", "--input", dir / "c.train.jsonl", "--dev", dir / "c.dev.jsonl", "--out",
      dir / "model.bin", "--emb", "8", "--filters", "8", "--seq-len", "120", "--epochs", "2",
      "--report", dir / "report.jsonl"};
  const auto train = run_cli(train_args);
  REQUIRE(train.code == cli::kOk);
  CHECK(slurp(dir / "report.jsonl") == train.out);
  const std::string model_bytes = slurp(dir / "model.bin");
  REQUIRE(run_cli(train_args).code == cli::kOk);
  CHECK(slurp(dir / "model.bin") == model_bytes);

  for (const std::string s : {"grid-cnn", "all-previous", "all-first", "cos-sim"}) {
    const auto p = run_cli({"predict", "--strategy", s, "--model", dir / "model.bin", "--input",
                            dir / "c.test.jsonl", "--out", dir / (s + ".jsonl")});
    CHECK(p.code == cli::kOk);
  }
  const auto eval = run_cli({"evaluate", "--gold", dir / "c.test.jsonl", "--pred",
                             dir / "grid-cnn.jsonl", "--pred", dir / "all-first.jsonl", "--out",
                             dir / "metrics.jsonl"});
  REQUIRE(eval.code == cli::kOk);
  CHECK(eval.out.find("grid-cnn") != std::string::npos);
  CHECK(eval.out.find("all-first") != std::string::npos);
  CHECK(slurp(dir / "metrics.jsonl").find("edge_f1") != std::string::npos);

  const auto gc = run_cli({"gradcheck", "--model", dir / "model.bin", "--input",
                           dir / "c.train.jsonl", "--samples", "50"});
  CHECK(gc.code == cli::kOk);

  CHECK(run_cli({"predict", "--strategy", "grid-cnn", "--input", dir / "c.test.jsonl"}).code ==
        cli::kValidationError);
}
