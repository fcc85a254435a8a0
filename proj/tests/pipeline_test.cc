// tests/pipeline_test.cc

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

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <tuple>

#include "doctest.h"
#include "labelseq/error.h"
#include "labelseq/persistence.h"
#include "labelseq/pipeline.h"
#include "toy_task.h"

using namespace labelseq;
using labelseq::testing::ToyTask;
using nlohmann::json;

namespace {

PipelineConfig toy_config(const ToyTask &toy, const json &overrides = json::object()) {
  json doc = ToyTask::config();
  doc.merge_patch(overrides);
  return PipelineConfig::from_json(doc, toy.dir.string());
}

LabelMapping text_mapping(const LanguageModel &m, const std::string &neg, const std::string &pos) {
  return LabelMapping::from_text(m, {{"negative", neg}, {"positive", pos}});
}

template <typename Fn>
std::pair<std::string, ErrorKind> stage_failure(Fn &&fn) {
  try {
    fn();
  } catch (const StageError &e) {
    return {e.stage(), e.kind()};
  }
  return {"", ErrorKind::kInternal};
}

}  // namespace

TEST_CASE("evaluate_mapping on the toy task") {
  ToyTask toy;
  const auto cfg = toy_config(toy);
  const auto p = prepare_task(cfg);
  const auto model = testing::toy_model();
  CHECK(evaluate_mapping(model, p.tmpl, text_mapping(model, "bad", "good"), p.split.dev, p.task) == 1.0);
  CHECK(evaluate_mapping(model, p.tmpl, text_mapping(model, "good", "bad"), p.split.dev, p.task) == 0.0);
  // "ok" beats "fine" under both triggers, so everything is called negative.
  CHECK(evaluate_mapping(model, p.tmpl, text_mapping(model, "ok", "fine"), p.split.dev, p.task) == 0.5);
  CHECK_THROWS_AS(evaluate_mapping(model, p.tmpl, text_mapping(model, "bad", "good"), {}, p.task), DataError);
}

TEST_CASE("toy search finds the trigger words") {
  ToyTask toy;
  const auto result = run_pipeline(toy_config(toy));
  const auto &r = result.report;
  REQUIRE(r.generated.size() == 2);
  CHECK(r.generated[0].candidates.front().text == "bad");
  CHECK(r.generated[1].candidates.front().text == "good");
  // Contrastive order: the trigger word, then "ok" over "fine" by gen_score.
  std::vector<std::string> order;
  for (const auto &c : r.reranked[1].candidates) order.push_back(c.text);
  CHECK(order == std::vector<std::string>{"good", "ok", "fine", "bad"});
  REQUIRE(r.mappings.size() == 4);
  std::vector<std::vector<size_t>> picks;
  for (const auto &m : r.mappings) picks.push_back(m.candidate_index);
  CHECK(picks == std::vector<std::vector<size_t>>{{0, 0}, {0, 1}, {0, 2}, {1, 0}});
  CHECK(r.winner == 0);
  CHECK(r.winning().mapping.at("positive").text == "good");
  CHECK(*r.winning().dev_metric == 1.0);
  CHECK(r.seeds == Seeds{5, 6, 7});
}

TEST_CASE("the report survives a save and load") {
  ToyTask toy;
  const auto result = run_pipeline(toy_config(toy));
  const auto out = toy.path("out");
  write_outputs(result, out);
  for (const char *f : {"candidates.jsonl", "reranked.jsonl", "mappings.jsonl", "report.json",
                        "winner_mapping.json", "timings.json", "winner_model.json"})
    CHECK_MESSAGE(std::filesystem::exists(std::filesystem::path(out) / f), f);
  const auto loaded = SearchReport::from_json(json::parse(read_text_file(out + "/report.json")));
  CHECK(loaded == result.report);
  CHECK(mappings_from_jsonl(read_text_file(out + "/mappings.jsonl")) == result.report.mappings);
  CHECK(candidates_from_jsonl(read_text_file(out + "/reranked.jsonl")) == result.report.reranked);
  const auto winner = json::parse(read_text_file(out + "/winner_mapping.json"));
  CHECK(winner["mapping"]["negative"] == "bad");
}

TEST_CASE("two runs with one seed give identical reports") {
  ToyTask toy;
  const auto cfg = toy_config(toy, {{"classifier", {{"backend", "tiny-neural"}, {"path", "scratch"},
                                                    {"width", 8}, {"ffn", 8}}},
                                    {"finetune", {{"steps", 20}, {"validate_every", 10},
                                                  {"learning_rate", 0.01}, {"batch_size", 4}}}});
  const auto a = run_pipeline(cfg).report.to_json().dump(2);
  const auto b = run_pipeline(cfg).report.to_json().dump(2);
  CHECK(a == b);
  const auto c = run_pipeline(toy_config(toy, {{"seed", 6}})).report.to_json().dump(2);
  CHECK(a != c);
}

TEST_CASE("finetune_rerank leaves the base model alone") {
  ToyTask toy;
  const auto cfg = toy_config(toy);
  const auto p = prepare_task(cfg);
  auto base = TinyNeuralModel(Vocab::with_specials({"item", "was", "great", "awful", "good", "bad", "ok",
                                                    "fine"}),
                              TinyNeuralConfig{8, 8, 3, 1.0});
  const auto input = render(p.tmpl, p.split.dev.front());
  const auto before = base.next_token_logprobs(input, {});
  std::vector<ScoredMapping> mappings(2);
  mappings[0].mapping = text_mapping(base, "bad", "good");
  mappings[0].combo_score = 1.0;
  mappings[1].mapping = text_mapping(base, "ok", "fine");
  mappings[1].combo_score = 2.0;
  FineTuneConfig ft{200, 4, 1e-2, 50, 7};
  const auto r = finetune_rerank(base, p.tmpl, p.split, mappings, ft, p.task);
  CHECK(base.next_token_logprobs(input, {}) == before);
  REQUIRE(r.mappings.size() == 2);
  CHECK(*r.mappings[0].dev_metric == 1.0);
  // Evaluating the returned winner again reproduces its dev metric.
  const auto &w = r.mappings[r.winner];
  CHECK(evaluate_mapping(*r.winner_model, p.tmpl, w.mapping, p.split.dev, p.task) == *w.dev_metric);
  CHECK(r.best_steps[0] % 50 == 0);
}

TEST_CASE("zero fine-tuning steps scores the prior") {
  ToyTask toy;
  const auto p = prepare_task(toy_config(toy));
  const auto model = testing::toy_model();
  std::vector<ScoredMapping> mappings(2);
  mappings[0].mapping = text_mapping(model, "ok", "fine");
  mappings[1].mapping = text_mapping(model, "bad", "good");
  FineTuneConfig ft{0, 8, 6e-5, 100, 0};
  const auto r = finetune_rerank(model, p.tmpl, p.split, mappings, ft, p.task);
  CHECK(*r.mappings[0].dev_metric == 0.5);
  CHECK(*r.mappings[1].dev_metric == 1.0);
  CHECK(r.winner == 1);
  CHECK(r.best_steps == std::vector<size_t>{0, 0});
}

TEST_CASE("ties in dev metric go to the higher combo score, then the earlier mapping") {
  ToyTask toy;
  const auto p = prepare_task(toy_config(toy));
  const auto model = testing::toy_model();
  std::vector<ScoredMapping> mappings(3);
  mappings[0].mapping = text_mapping(model, "bad", "ok");
  mappings[1].mapping = text_mapping(model, "bad", "good");
  mappings[2].mapping = text_mapping(model, "ok", "good");
  mappings[0].combo_score = 1.0;
  mappings[1].combo_score = 3.0;
  mappings[2].combo_score = 3.0;
  const auto r = finetune_rerank(model, p.tmpl, p.split, mappings, FineTuneConfig{0, 8, 6e-5, 100, 0}, p.task);
  CHECK(r.winner == 1);
}

TEST_CASE("baseline mapping bypasses generation") {
  ToyTask toy;
  std::ofstream(toy.path("manual.json")) << R"({"mapping": {"positive": "good", "negative": "bad"}})";
  const auto r = run_pipeline(toy_config(toy, {{"baseline_mapping", "manual.json"}})).report;
  CHECK(r.baseline);
  CHECK(r.generated.empty());
  CHECK(r.reranked.empty());
  REQUIRE(r.mappings.size() == 1);
  CHECK(r.mappings[0].mapping.entries()[0].label == "negative");
  CHECK(*r.mappings[0].dev_metric == 1.0);

  std::ofstream(toy.path("short.json")) << R"({"mapping": {"positive": "good"}})";
  CHECK(stage_failure([&] { run_pipeline(toy_config(toy, {{"baseline_mapping", "short.json"}})); }) ==
        std::pair<std::string, ErrorKind>{"combine", ErrorKind::kData});
  std::ofstream(toy.path("extra.json"))
      << R"({"mapping": {"positive": "good", "negative": "bad", "neutral": "ok"}})";
  CHECK(stage_failure([&] { run_pipeline(toy_config(toy, {{"baseline_mapping", "extra.json"}})); }).second ==
        ErrorKind::kData);
}

TEST_CASE("failures name their stage") {
  ToyTask toy;
  CHECK(stage_failure([&] { run_pipeline(toy_config(toy, {{"data", "nowhere.tsv"}})); }) ==
        std::pair<std::string, ErrorKind>{"load", ErrorKind::kData});
  CHECK(stage_failure([&] { run_pipeline(toy_config(toy, {{"generator", {{"path", "nowhere.json"}}}})); }) ==
        std::pair<std::string, ErrorKind>{"backend", ErrorKind::kData});
  CHECK(stage_failure([&] { run_pipeline(toy_config(toy, {{"k", 0}})); }) ==
        std::pair<std::string, ErrorKind>{"config", ErrorKind::kUsage});
  CHECK(stage_failure([&] { run_pipeline(toy_config(toy, {{"k", 40}})); }).first == "split");
  // The tabular classifier cannot be trained.
  CHECK(stage_failure([&] { run_pipeline(toy_config(toy, {{"finetune", {{"steps", 5}}}})); }) ==
        std::pair<std::string, ErrorKind>{"finetune", ErrorKind::kUsage});
  CHECK_THROWS_AS(toy_config(toy, {{"bogus", 1}}), UsageError);
  CHECK_THROWS_AS(toy_config(toy, {{"search", {{"beam", 3}}}}), UsageError);
}

TEST_CASE("config round trips through json") {
  ToyTask toy;
  const auto cfg = PipelineConfig::load(toy.config_path());
  const auto again = PipelineConfig::from_json(cfg.to_json());
  CHECK(again.to_json() == cfg.to_json());
  CHECK(cfg.data == toy.path("data.tsv"));
  CHECK(cfg.effective_search().beam_width == 8);
  CHECK(toy_config(toy, {{"autoword", true}}).effective_search().max_len == 1);
}

TEST_CASE("autoword search emits single tokens only") {
  ToyTask toy;
  const auto r = run_pipeline(toy_config(toy, {{"autoword", true}})).report;
  for (const auto &cls : r.generated)
    for (const auto &c : cls.candidates) CHECK(c.seq.size() == 1);
}
