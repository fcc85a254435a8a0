// tests/c_api_test.cc

// Copyright 2026 The labelseq Authors
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

// Exercises the shared library through its C header only; the core library
// is linked solely to write the toy fixture files.
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <thread>

#include <sys/wait.h>

#include "doctest.h"
#include "labelseq/labelseq.h"
#include "toy_task.h"

using labelseq::testing::ToyTask;
using nlohmann::json;

namespace {

const std::string kCli = LABELSEQ_CLI;
const std::string kServer = LABELSEQ_FAKE_SERVER;

struct Str {
  char *p = nullptr;
  ~Str() { lsq_string_free(p); }
  json parse() const { return json::parse(p); }
};

struct Config {
  lsq_config *p = nullptr;
  explicit Config(const std::string &path) { REQUIRE(lsq_config_load(path.c_str(), &p) == LSQ_OK); }
  ~Config() { lsq_config_free(p); }
};

std::string slurp(const std::string &path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct Run {
  int code = -1;
  std::string out, err;
};

// Runs the CLI with `args`, capturing both streams.
Run cli(const ToyTask &toy, const std::string &args) {
  const auto out = toy.path("stdout.txt"), err = toy.path("stderr.txt");
  const std::string cmd = "'" + kCli + "' " + args + " >'" + out + "' 2>'" + err + "'";
  const int status = std::system(cmd.c_str());
  Run r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp(out);
  r.err = slurp(err);
  return r;
}

}  // namespace

TEST_CASE("c api: configuration documents") {
  CHECK(std::string(lsq_version()).size() > 0);
  lsq_config *c = nullptr;
  CHECK(lsq_config_parse("[1, 2]", &c) == LSQ_USAGE);
  CHECK(std::string(lsq_last_error()).find("object") != std::string::npos);
  CHECK(lsq_config_parse("{", &c) == LSQ_USAGE);
  REQUIRE(lsq_config_new(&c) == LSQ_OK);
  CHECK(lsq_config_set(c, "search.beam_width", "12") == LSQ_OK);
  CHECK(lsq_config_set(c, "format", "\"tsv\"") == LSQ_OK);
  CHECK(lsq_config_set(c, "format.x", "1") == LSQ_USAGE);
  CHECK(lsq_config_set(c, "k", "sixteen") == LSQ_USAGE);
  CHECK(lsq_config_set(c, "a..b", "1") == LSQ_USAGE);
  CHECK(lsq_config_set(nullptr, "k", "1") == LSQ_USAGE);
  Str text;
  REQUIRE(lsq_config_to_json(c, &text.p) == LSQ_OK);
  CHECK(text.parse() == json{{"search", {{"beam_width", 12}}}, {"format", "tsv"}});
  lsq_config_free(c);
  lsq_config_free(nullptr);
  lsq_model_free(nullptr);
  lsq_string_free(nullptr);
}

TEST_CASE("c api: search, generate, rerank and eval") {
  ToyTask toy;
  Config config(toy.config_path());
  const auto out = toy.path("out");
  Str report;
  REQUIRE(lsq_search(config.p, out.c_str(), &report.p) == LSQ_OK);
  CHECK(report.parse()["winner"]["mapping"] == json{{"negative", "bad"}, {"positive", "good"}});
  CHECK(json::parse(slurp(out + "/report.json")) == report.parse());

  const auto staged = toy.path("staged");
  Str gen, rr;
  REQUIRE(lsq_generate(config.p, staged.c_str(), &gen.p) == LSQ_OK);
  CHECK(gen.parse()["classes"][0]["top"] == "bad");
  CHECK(slurp(staged + "/candidates.jsonl") == slurp(out + "/candidates.jsonl"));
  REQUIRE(lsq_rerank(config.p, nullptr, staged.c_str(), &rr.p) == LSQ_OK);
  CHECK(rr.parse()["best"] == json{{"negative", "bad"}, {"positive", "good"}});
  CHECK(slurp(staged + "/reranked.jsonl") == slurp(out + "/reranked.jsonl"));

  Str e1, e2, e3;
  const auto winner = out + "/winner_mapping.json";
  REQUIRE(lsq_eval(config.p, winner.c_str(), nullptr, "dev", &e1.p) == LSQ_OK);
  CHECK(e1.parse() == json{{"metric", "accuracy"}, {"value", 1.0}, {"split", "dev"}, {"examples", 8}});
  REQUIRE(lsq_eval(config.p, winner.c_str(), nullptr, "dev", &e2.p) == LSQ_OK);
  CHECK(std::string(e1.p) == e2.p);
  const auto jsonl = out + "/mappings.jsonl";
  REQUIRE(lsq_eval(config.p, jsonl.c_str(), toy.path("model.json").c_str(), "all", &e3.p) == LSQ_OK);
  CHECK(e3.parse()["examples"] == 60);

  std::ofstream(toy.path("short.json")) << R"({"mapping": {"positive": "good"}})";
  CHECK(lsq_eval(config.p, toy.path("short.json").c_str(), nullptr, "dev", nullptr) == LSQ_DATA);
  CHECK(lsq_eval(config.p, winner.c_str(), nullptr, "test", nullptr) == LSQ_USAGE);
}

TEST_CASE("c api: failures carry kind and stage") {
  ToyTask toy;
  Config config(toy.config_path());
  REQUIRE(lsq_config_set(config.p, "data", "\"nowhere.tsv\"") == LSQ_OK);
  CHECK(lsq_search(config.p, toy.path("out").c_str(), nullptr) == LSQ_DATA);
  CHECK(std::string(lsq_last_error_stage()) == "load");
  CHECK(std::string(lsq_last_error()).find("stage 'load'") != std::string::npos);
  // Errors are per thread.
  std::string other = "unset";
  std::thread([&] { other = lsq_last_error(); }).join();
  CHECK(other.empty());
  CHECK(lsq_search(nullptr, "x", nullptr) == LSQ_USAGE);
  CHECK(std::string(lsq_last_error_stage()).empty());
}

TEST_CASE("c api: direct model access") {
  ToyTask toy;
  lsq_model *m = nullptr;
  CHECK(lsq_model_open("tabular", toy.path("missing.json").c_str(), &m) == LSQ_DATA);
  CHECK(lsq_model_open("lstm", toy.path("model.json").c_str(), &m) == LSQ_USAGE);
  REQUIRE(lsq_model_open("tabular", toy.path("model.json").c_str(), &m) == LSQ_OK);
  const size_t v = lsq_model_vocab_size(m);
  CHECK(v == 8);
  int32_t ids[1];
  size_t len = 0;
  REQUIRE(lsq_model_tokenize(m, "ok good", ids, 1, &len) == LSQ_OK);
  CHECK(len == 2);
  int32_t full[2];
  REQUIRE(lsq_model_tokenize(m, "ok good", full, 2, &len) == LSQ_OK);
  CHECK(full[0] == ids[0]);

  std::vector<double> lp(v);
  REQUIRE(lsq_model_next_token_logprobs(m, "it was great [MASK]", nullptr, 0, lp.data(), v) == LSQ_OK);
  double total = 0.0;
  for (double x : lp) total += std::exp(x);
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::exp(lp[static_cast<size_t>(full[1])]) == doctest::Approx(0.5));
  CHECK(lsq_model_next_token_logprobs(m, "x [MASK]", nullptr, 0, lp.data(), v - 1) == LSQ_USAGE);

  std::vector<double> after(v);
  REQUIRE(lsq_model_next_token_logprobs(m, "it was great [MASK]", &full[1], 1, after.data(), v) == LSQ_OK);
  double seq = 0.0;
  REQUIRE(lsq_model_sequence_logprob(m, "it was great [MASK]", &full[1], 1, &seq) == LSQ_OK);
  CHECK(seq == lp[static_cast<size_t>(full[1])] + after[1]);  // id 1 is </s>
  lsq_model_free(m);
}

TEST_CASE("c api: serve-check") {
  Str result;
  const std::string endpoint = "exec:" + kServer + " --uniform 6";
  REQUIRE(lsq_serve_check(endpoint.c_str(), &result.p) == LSQ_OK);
  CHECK(result.parse()["passed"] == true);
  // An unreachable server is a failed verdict, not a failed call.
  Str failed;
  REQUIRE(lsq_serve_check("exec:/nonexistent/server", &failed.p) == LSQ_OK);
  CHECK(failed.parse()["passed"] == false);
}

TEST_CASE("cli: exit codes") {
  ToyTask toy;
  CHECK(cli(toy, "").code == 1);
  CHECK(cli(toy, "search --no-such-flag").code == 1);
  CHECK(cli(toy, "frobnicate").code == 1);
  auto r = cli(toy, "search --config '" + toy.config_path() + "' --data '" + toy.path("nope.tsv") + "'");
  CHECK(r.code == 2);
  CHECK(r.err.find("stage 'load'") != std::string::npos);
  r = cli(toy, "search --config '" + toy.config_path() + "' --backend remote");
  CHECK(r.code == 1);
  CHECK(r.err.find("--remote-endpoint") != std::string::npos);
  r = cli(toy, "search --config '" + toy.config_path() + "' --backend remote --remote-endpoint exec:/nonexistent/server");
  CHECK(r.code == 3);
  CHECK(cli(toy, "serve-check --remote-endpoint tcp:127.0.0.1:1").code == 3);
}

TEST_CASE("cli: search is deterministic and prints the winner") {
  ToyTask toy;
  const std::string base = "search --config '" + toy.config_path() + "' --out-dir '";
  const auto a = cli(toy, base + toy.path("a") + "'");
  REQUIRE(a.code == 0);
  CHECK(a.out.find("winner: negative -> \"bad\"; positive -> \"good\"") != std::string::npos);
  REQUIRE(cli(toy, base + toy.path("b") + "'").code == 0);
  CHECK(slurp(toy.path("a/report.json")) == slurp(toy.path("b/report.json")));
  REQUIRE(cli(toy, base + toy.path("c") + "' --seed 9 --beam-width 3 --n 2").code == 0);
  const auto report = json::parse(slurp(toy.path("c/report.json")));
  CHECK(report["seeds"]["split"] == 9);
  CHECK(report["config"]["search"]["beam_width"] == 3);
  CHECK(report["mappings"].size() == 2);
}

TEST_CASE("cli: baseline mapping, eval and a remote generator") {
  ToyTask toy;
  std::ofstream(toy.path("manual.json")) << R"({"mapping": {"positive": "good", "negative": "bad"}})";
  const std::string config = "--config '" + toy.config_path() + "'";
  auto r = cli(toy, "search " + config + " --baseline-mapping '" + toy.path("manual.json") + "' --out-dir '" +
                        toy.path("base") + "'");
  REQUIRE(r.code == 0);
  CHECK(json::parse(slurp(toy.path("base/report.json")))["baseline"] == true);

  r = cli(toy, "eval " + config + " --mapping '" + toy.path("manual.json") + "'");
  REQUIRE(r.code == 0);
  CHECK(json::parse(r.out)["value"] == 1.0);
  CHECK(cli(toy, "eval " + config + " --mapping '" + toy.path("manual.json") + "'").out == r.out);

  const std::string endpoint = "exec:" + kServer + " --model " + toy.path("model.json");
  r = cli(toy, "search " + config + " --backend remote --remote-endpoint '" + endpoint + "' --out-dir '" +
                   toy.path("remote") + "'");
  REQUIRE(r.code == 0);
  const auto local = json::parse(slurp(toy.path("base/../remote/report.json")));
  CHECK(local["winner"]["mapping"] == json{{"negative", "bad"}, {"positive", "good"}});

  r = cli(toy, "generate " + config + " --autoword --out-dir '" + toy.path("gen") + "'");
  REQUIRE(r.code == 0);
  CHECK(std::filesystem::exists(toy.path("gen/candidates.jsonl")));
  r = cli(toy, "rerank " + config + " --out-dir '" + toy.path("gen") + "'");
  REQUIRE(r.code == 0);
  CHECK(json::parse(r.out)["count"] == 4);
}
