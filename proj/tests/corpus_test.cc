// tests/corpus_test.cc

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

#include "doctest.h"
#include "labelseq/corpus.h"
#include "labelseq/error.h"

using namespace labelseq;

namespace {

std::vector<Example> balanced(size_t per_class) {
  std::vector<Example> out;
  for (size_t i = 0; i < per_class; ++i) {
    out.push_back({{"pos text " + std::to_string(i)}, "positive"});
    out.push_back({{"neg text " + std::to_string(i)}, "negative"});
  }
  return out;
}

}  // namespace

TEST_CASE("tsv records parse with the label in the last column") {
  auto data = parse_dataset("good\tpositive\nbad\tnegative\n", DataFormat::kTsv);
  REQUIRE(data.size() == 2);
  CHECK(data[0].fields == std::vector<std::string>{"good"});
  CHECK(data[0].label == "positive");
  CHECK(data[1].label == "negative");
}

TEST_CASE("empty input is rejected") {
  CHECK_THROWS_WITH_AS(parse_dataset("", DataFormat::kTsv), "no records", DataError);
  CHECK_THROWS_AS(parse_dataset("\n\n", DataFormat::kJsonLines), DataError);
}

TEST_CASE("json-lines sentence pair") {
  auto data = parse_dataset(
      R"({"fields": ["premise", "hypothesis"], "label": "entailment"})" "\n"
      R"({"fields": ["a", "b"], "label": null})",
      DataFormat::kJsonLines);
  REQUIRE(data.size() == 2);
  CHECK(data[0].fields.size() == 2);
  CHECK(data[0].label == "entailment");
  CHECK_FALSE(data[1].label.has_value());
  CHECK(labels_in_order(data) == std::vector<std::string>{"entailment"});
  auto task = make_task_spec(TaskKind::kSentencePair, data, MetricKind::kAccuracy,
                             {"entailment", "contradiction"});
  CHECK(task.kind == TaskKind::kSentencePair);
}

TEST_CASE("parse errors name the line") {
  CHECK_THROWS_WITH(parse_dataset("{\"fields\": [\"a\"]}\n{oops\n", DataFormat::kJsonLines),
                    doctest::Contains("line 2"));
  CHECK_THROWS_WITH(parse_dataset("a\tb\tx\nc\ty\n", DataFormat::kTsv),
                    doctest::Contains("ragged"));
  CHECK_THROWS_WITH(parse_dataset("onlyone\n", DataFormat::kTsv),
                    doctest::Contains("line 1"));
}

TEST_CASE("fields are right-trimmed and must stay non-empty") {
  auto data = parse_dataset("hello  \tpos\r\n", DataFormat::kTsv);
  CHECK(data[0].fields[0] == "hello");
  CHECK_THROWS_AS(parse_dataset("   \tpos\n", DataFormat::kTsv), DataError);
}

TEST_CASE("missing data file") {
  CHECK_THROWS_AS(load_dataset("/nonexistent/file.tsv", DataFormat::kTsv), DataError);
}

TEST_CASE("task spec validation") {
  auto data = balanced(2);
  auto task = make_task_spec(TaskKind::kSingleSentence, data);
  CHECK(task.labels == std::vector<std::string>{"positive", "negative"});
  CHECK(task.class_index("negative") == 1);
  CHECK_THROWS_AS(make_task_spec(TaskKind::kSentencePair, data), DataError);
  std::vector<Example> one_class{{{"x"}, "a"}, {{"y"}, "a"}};
  CHECK_THROWS_AS(make_task_spec(TaskKind::kSingleSentence, one_class), DataError);
  CHECK_THROWS_AS(parse_task_kind("regression"), UsageError);
}

TEST_CASE("few-shot split sizes and disjointness") {
  auto data = balanced(100);
  auto split = sample_few_shot(data, 16, 13);
  CHECK(split.train.size() == 32);
  CHECK(split.dev.size() == 32);
  for (const auto &label : split.labels) {
    CHECK(split.train_of(label).size() == 16);
    CHECK(split.dev_of(label).size() == 16);
    CHECK(split.train_of(label).size() + split.train_except(label).size() ==
          split.train.size());
  }
  for (const auto &t : split.train)
    for (const auto &d : split.dev) CHECK(t.fields != d.fields);
}

TEST_CASE("k=1 with two examples per class uses each example once") {
  std::vector<Example> data{{{"a"}, "x"}, {{"b"}, "x"}, {{"c"}, "y"}, {{"d"}, "y"}};
  auto split = sample_few_shot(data, 1, 7);
  std::vector<std::string> used;
  for (const auto &e : split.train) used.push_back(e.fields[0]);
  for (const auto &e : split.dev) used.push_back(e.fields[0]);
  std::sort(used.begin(), used.end());
  CHECK(used == std::vector<std::string>{"a", "b", "c", "d"});
}

TEST_CASE("sampling is a pure function of data, k and seed") {
  auto data = balanced(40);
  auto a = sample_few_shot(data, 8, 42);
  auto b = sample_few_shot(data, 8, 42);
  CHECK(a.train == b.train);
  CHECK(a.dev == b.dev);
  auto c = sample_few_shot(data, 8, 43);
  CHECK_FALSE(a.train == c.train);
}

TEST_CASE("too few examples names the class") {
  auto data = balanced(5);
  CHECK_THROWS_WITH_AS(sample_few_shot(data, 3, 1), doctest::Contains("positive"),
                       DataError);
}

TEST_CASE("complement views partition train for every class (property)") {
  for (uint64_t seed = 0; seed < 20; ++seed) {
    std::vector<Example> data;
    for (size_t c = 0; c < 2 + seed % 3; ++c)
      for (size_t i = 0; i < 10; ++i)
        data.push_back({{"x" + std::to_string(c) + "_" + std::to_string(i)},
                        "c" + std::to_string(c)});
    auto split = sample_few_shot(data, 1 + seed % 5, seed);
    for (const auto &label : split.labels) {
      auto in = split.train_of(label);
      auto out = split.train_except(label);
      CHECK(in.size() + out.size() == split.train.size());
      for (const auto &e : in) CHECK(e.label == label);
      for (const auto &e : out) CHECK(e.label != label);
    }
  }
}
