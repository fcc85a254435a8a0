// tests/synthetic_test.cc

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
#include <set>

#include "doctest.h"
#include "labelseq/beam_search.h"
#include "labelseq/pipeline.h"
#include "labelseq/synthetic.h"
#include "toy_task.h"

using namespace labelseq;

namespace {

SyntheticOptions small_options() {
  SyntheticOptions o;
  o.cues_per_class = 20;
  o.fillers = 10;
  o.examples_per_class = 40;
  o.pretrain_sentences = 200;
  o.pretrain_steps = 30;
  return o;
}

}  // namespace

TEST_CASE("synthetic word lists are disjoint") {
  const auto w = synthetic_words(SyntheticOptions{});
  CHECK(w.positive_cues.size() == 200);
  CHECK(w.negative_cues.size() == 200);
  std::set<std::string> seen;
  for (const auto *list : {&w.phrase_words, &w.positive_cues, &w.negative_cues, &w.fillers})
    for (const auto &word : *list) CHECK_MESSAGE(seen.insert(word).second, word);
  CHECK(synthetic_words(SyntheticOptions{}).all() == w.all());
}

TEST_CASE("every synthetic sentence carries at most one cue, of its own class") {
  const auto o = small_options();
  const auto w = synthetic_words(o);
  const std::set<std::string> pos(w.positive_cues.begin(), w.positive_cues.end());
  const std::set<std::string> neg(w.negative_cues.begin(), w.negative_cues.end());
  const auto data = synthetic_examples(w, o.examples_per_class, 0.0, 3);
  REQUIRE(data.size() == 2 * o.examples_per_class);
  for (const auto &e : data) {
    size_t own = 0, other = 0;
    for (const auto &word : split_words(e.fields[0])) {
      const bool p = pos.count(word) > 0, n = neg.count(word) > 0;
      if (p || n) ((p == (*e.label == "positive")) ? own : other)++;
    }
    CHECK(own == 1);
    CHECK(other == 0);
  }
}

TEST_CASE("raw beam search proposes the same phrase for both classes") {
  const auto o = small_options();
  const auto w = synthetic_words(o);
  const auto gen = synthetic_generator(w);
  const auto data = synthetic_examples(w, o.examples_per_class, o.no_cue_rate, 4);
  const auto split = sample_few_shot(data, 16, 13);
  SearchConfig search;
  search.beam_width = 50;
  search.max_len = 20;
  const auto tmpl = builtin_template(TaskKind::kSingleSentence);
  const auto cands = generate_all(gen, tmpl, split, search);
  REQUIRE(cands.size() == 2);
  CHECK(cands[0].candidates.front().text == "thank you");
  CHECK(cands[1].candidates.front().text == "thank you");
}

TEST_CASE("synthetic bundle is self-contained") {
  testing::ToyTask scratch(1);
  const auto dir = scratch.path("bundle");
  write_synthetic_bundle(dir, small_options());
  auto cfg = PipelineConfig::load(dir + "/config.json");
  CHECK(cfg.k == 16);
  CHECK(cfg.search.beam_width == 50);
  CHECK(cfg.n == 20);
  CHECK(cfg.finetune.steps == 1000);
  cfg.n = 2;
  cfg.finetune.steps = 10;
  cfg.finetune.validate_every = 5;
  const auto r = run_pipeline(cfg).report;
  CHECK(r.mappings.size() == 2);
}
