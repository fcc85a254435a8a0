// tests/beam_search_test.cc

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

#include <cmath>
#include <map>

#include "doctest.h"
#include "labelseq/beam_search.h"
#include "labelseq/error.h"
#include "support.h"

using namespace labelseq;
using namespace labelseq::testing;

namespace {

const Template kSingle = Template::parse("{0} [MASK]");

void check_matches_oracle(const std::vector<Candidate> &got,
                          const std::vector<Candidate> &want) {
  REQUIRE(got.size() == want.size());
  std::map<TokenSeq, double> oracle;
  for (const auto &c : want) oracle[c.seq] = c.gen_score;
  for (size_t i = 0; i < got.size(); ++i) {
    REQUIRE(oracle.count(got[i].seq) == 1);
    CHECK(std::abs(got[i].gen_score - oracle[got[i].seq]) < 1e-9);
    if (i > 0) CHECK(got[i - 1].gen_score >= got[i].gen_score);
  }
}

}  // namespace

TEST_CASE("exhaustive when the beam is wide enough: V=3, L=2, width 9") {
  auto m = random_tabular(11, 3, 2);
  auto examples = cue_examples(4, "cue0", "a");
  auto got = generate_candidates(m, kSingle, examples, {9, 2, 0.0});
  check_matches_oracle(got, enumerate_candidates(m, kSingle, examples, 2));
  CHECK(got.size() == 9);
}

TEST_CASE("uniform model ties come out in token-id order") {
  auto m = uniform_model(3);
  auto got = generate_candidates(m, kSingle, {ex("x", "a")}, {9, 2, 0.0});
  REQUIRE(got.size() == 9);
  for (size_t i = 1; i < got.size(); ++i) {
    CHECK(got[i].gen_score == got[0].gen_score);
    CHECK(got[i - 1].seq < got[i].seq);
  }
  CHECK(got[0].gen_score == doctest::Approx(2 * std::log(1.0 / 3)));
}

TEST_CASE("closed-form top candidate: 16 examples, P(a)=0.9") {
  TabularModel m(Vocab::with_specials({"a", "b", "good"}));
  const TokenId a = *m.vocab().find("a"), b = *m.vocab().find("b");
  m.add_trigger("good", "pos");
  m.set_row("pos", {}, {{a, 0.9}, {b, 0.1}});
  auto got = generate_candidates(m, kSingle, cue_examples(16, "good", "pos"),
                                 {50, 1, 0.0});
  REQUIRE(got.size() == 2);
  CHECK(got[0].seq == TokenSeq{a});
  CHECK(got[0].text == "a");
  CHECK(std::abs(got[0].gen_score - 16 * std::log(0.9)) < 1e-9);
}

TEST_CASE("EOS terminates hypotheses; wide beam still equals enumeration") {
  for (uint64_t seed = 0; seed < 10; ++seed) {
    auto m = random_tabular(seed, 4, 2, 0.15);
    std::vector<Example> examples = cue_examples(3, "cue1", "b");
    auto got = generate_candidates(m, kSingle, examples, {4 + 16 + 64, 3, 0.0});
    check_matches_oracle(got, enumerate_candidates(m, kSingle, examples, 3));
  }
}

TEST_CASE("gen_score re-verifies against per-example sums") {
  for (uint64_t seed = 0; seed < 10; ++seed) {
    auto m = random_tabular(seed + 50, 6, 2, 0.1);
    std::vector<Example> examples = cue_examples(5, seed % 2 ? "cue0" : "cue1", "y");
    examples.push_back(ex("no cue at all", "y"));
    auto got = generate_candidates(m, kSingle, examples, {7, 4, 0.0});
    CHECK(got.size() <= 7);
    for (const auto &c : got) {
      double total = 0.0;
      for (const auto &e : examples) total += m.sequence_logprob(render(kSingle, e), c.seq);
      CHECK(std::abs(c.gen_score - total) < 1e-9);
    }
  }
}

TEST_CASE("autoword mode yields single tokens") {
  auto m = random_tabular(2, 8, 2, 0.2);
  auto got = generate_candidates(m, kSingle, cue_examples(4, "cue0", "z"),
                                 SearchConfig::autoword());
  CHECK(got.size() == 8);
  for (const auto &c : got) CHECK(c.seq.size() == 1);
}

TEST_CASE("length penalty reorders completed candidates only") {
  auto m = random_tabular(4, 4, 2, 0.3);
  auto examples = cue_examples(2, "cue0", "z");
  auto raw = generate_candidates(m, kSingle, examples, {200, 3, 0.0});
  auto pen = generate_candidates(m, kSingle, examples, {200, 3, 1.0});
  CHECK(raw.size() == pen.size());
  for (size_t i = 1; i < pen.size(); ++i)
    CHECK(pen[i - 1].gen_score / pen[i - 1].seq.size() >=
          pen[i].gen_score / pen[i].seq.size());
}

TEST_CASE("generation errors and determinism") {
  auto m = uniform_model(3);
  CHECK_THROWS_AS(generate_candidates(m, kSingle, {}, {}), DataError);
  CHECK_THROWS_AS(generate_candidates(m, kSingle, {ex("a", "x"), ex("b", "y")}, {}),
                  DataError);
  CHECK_THROWS_AS(generate_candidates(m, kSingle, {ex("a", "x")}, {0, 2, 0.0}),
                  UsageError);
  auto r = random_tabular(9, 5, 2, 0.1);
  auto e = cue_examples(3, "cue0", "q");
  CHECK(generate_candidates(r, kSingle, e, {5, 4, 0.0}) ==
        generate_candidates(r, kSingle, e, {5, 4, 0.0}));
}

TEST_CASE("generate_all per class") {
  auto m = random_tabular(21, 5, 2, 0.1);
  FewShotSplit split;
  split.labels = {"p", "n"};
  split.train = cue_examples(3, "cue0", "p");
  for (auto &e : cue_examples(3, "cue1", "n")) split.train.push_back(e);
  auto all = generate_all(m, kSingle, split, {6, 3, 0.0}, 2);
  REQUIRE(all.size() == 2);
  CHECK(all[0].label == "p");
  CHECK(all[0].candidates.size() <= 6);
  CHECK(all[1].candidates.size() <= 6);
  CHECK(all[0].candidates == generate_candidates(m, kSingle, split.train_of("p"), {6, 3, 0.0}));
}

TEST_CASE("single-example classes score like a single sequence_logprob") {
  auto m = random_tabular(22, 4, 2, 0.2);
  FewShotSplit split;
  split.labels = {"p", "n"};
  split.train = {ex("cue0", "p"), ex("cue1", "n")};
  auto all = generate_all(m, kSingle, split, {5, 3, 0.0});
  for (size_t c = 0; c < 2; ++c)
    for (const auto &cand : all[c].candidates)
      CHECK(std::abs(cand.gen_score - m.sequence_logprob(render(kSingle, split.train[c]),
                                                         cand.seq)) < 1e-12);
}

TEST_CASE("identical class distributions give identical candidate lists") {
  auto m = random_tabular(23, 5, 2, 0.1);
  FewShotSplit split;
  split.labels = {"p", "n"};
  split.train = {ex("cue0 a", "p"), ex("cue0 b", "n"), ex("cue0 c", "p"), ex("cue0 d", "n")};
  auto all = generate_all(m, kSingle, split, {10, 3, 0.0});
  CHECK(all[0].candidates == all[1].candidates);
}
