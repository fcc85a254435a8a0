// tests/persistence_test.cc

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
#include <filesystem>
#include <fstream>
#include <limits>

#include "doctest.h"
#include "labelseq/error.h"
#include "labelseq/persistence.h"
#include "toy_task.h"

using namespace labelseq;
using nlohmann::json;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<ClassCandidates> sample_candidates() {
  return {{"negative",
           {Candidate{{5, 6}, "not bad", -3.25, 1.5},
            Candidate{{7}, "meh", -kInf, std::nullopt},
            Candidate{{8, 9, 10}, "a b c", -0.1, -kInf}}},
          {"positive", {Candidate{{4}, "good", -1.0 / 3.0, 0.0}}},
          {"neutral", {}}};
}

ScoredMapping sample_mapping(std::optional<double> dev) {
  ScoredMapping m;
  m.mapping = LabelMapping({{"positive", "good", {4}}, {"negative", "not bad", {5, 6}}});
  m.combo_score = 0.1 + 0.2;
  m.dev_metric = dev;
  m.candidate_index = {3, 0};
  return m;
}

}  // namespace

TEST_CASE("reals keep infinities through json") {
  for (double v : {0.0, -0.0, 1e-300, -2.5, 1.0 / 3.0, kInf, -kInf})
    CHECK(real_from_json(json::parse(real_to_json(v).dump())) == v);
  CHECK(std::isnan(real_from_json(real_to_json(std::nan("")))));
  CHECK_THROWS_AS(real_from_json(json("infinity")), DataError);
}

TEST_CASE("candidates round trip field for field") {
  const auto original = sample_candidates();
  const auto text = candidates_to_jsonl(original);
  auto back = candidates_from_jsonl(text);
  // A class with no candidates leaves no lines behind.
  REQUIRE(back.size() == 2);
  CHECK(back[0] == original[0]);
  CHECK(back[1] == original[1]);
  CHECK(candidates_to_jsonl(back) == text);
}

TEST_CASE("mappings round trip with and without dev metric") {
  const std::vector<ScoredMapping> original{sample_mapping(std::nullopt), sample_mapping(0.8125)};
  const auto text = mappings_to_jsonl(original);
  CHECK(mappings_from_jsonl(text) == original);
  const auto first = json::parse(text.substr(0, text.find('\n')));
  CHECK(first["dev_metric"].is_null());
  CHECK(first["labels"] == json({"positive", "negative"}));
}

TEST_CASE("malformed lines are reported with their line number") {
  const auto text = candidates_to_jsonl(sample_candidates()) + "{\"class\": 3}\n";
  try {
    candidates_from_jsonl(text);
    FAIL("expected a DataError");
  } catch (const DataError &e) {
    CHECK(std::string(e.what()).find("line 5") != std::string::npos);
  }
  CHECK_THROWS_AS(mappings_from_jsonl("{\"mapping\": {}}\nnot json\n"), DataError);
}

TEST_CASE("baseline mapping files load with optional template") {
  testing::ToyTask toy;
  const auto path = toy.path("manual.json");
  std::ofstream(path) << R"({"template": "{0} It was [MASK].", "mapping": {"positive": "good", "negative": "bad"}})";
  const auto b = load_baseline_mapping(path);
  REQUIRE(b.template_pattern);
  CHECK(*b.template_pattern == "{0} It was [MASK].");
  REQUIRE(b.label_text.size() == 2);
  CHECK(b.label_text[0] == std::pair<std::string, std::string>{"negative", "bad"});
  CHECK(b.label_text[1] == std::pair<std::string, std::string>{"positive", "good"});

  std::ofstream(path) << R"({"mapping": {"positive": 3}})";
  CHECK_THROWS_AS(load_baseline_mapping(path), DataError);
  CHECK_THROWS_AS(load_baseline_mapping(toy.path("missing.json")), DataError);
}
