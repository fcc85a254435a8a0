// tests/metrics_test.cc

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

#include "doctest.h"
#include "labelseq/error.h"
#include "labelseq/metrics.h"
#include "oracles.h"

using namespace labelseq;
using namespace labelseq::testing;

TEST_CASE("accuracy") {
  std::vector<std::string> g{"a", "b", "a", "b"};
  CHECK(accuracy(g, g) == 1.0);
  std::vector<std::string> none{"b", "a", "b", "a"};
  CHECK(accuracy(none, g) == 0.0);
  std::vector<std::string> three{"a", "b", "a", "a"};
  CHECK(accuracy(three, g) == 0.75);
  std::vector<std::string> short_preds{"a"};
  CHECK_THROWS_AS(accuracy(short_preds, g), DataError);
  CHECK_THROWS_AS(accuracy({}, {}), DataError);
}

TEST_CASE("f1 worked examples") {
  CHECK(f1(BinaryCounts{2, 0, 1, 1}) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(f1(BinaryCounts{3, 3, 0, 0}) == 1.0);
  CHECK(f1(BinaryCounts{0, 4, 0, 0}) == 0.0);
  auto l = from_counts(1, 1, 0, 0);
  CHECK_THROWS_AS(f1(l.preds, l.gold, "other"), DataError);
}

TEST_CASE("matthews worked examples") {
  CHECK(matthews(BinaryCounts{3, 3, 0, 0}) == doctest::Approx(1.0));
  CHECK(matthews(BinaryCounts{1, 1, 1, 1}) == 0.0);
  // 6 / sqrt(4 * 3 * 3 * 2)
  CHECK(std::abs(matthews(BinaryCounts{3, 2, 1, 0}) - 0.70710678118654752) < 1e-12);
  auto l = from_counts(3, 2, 1, 0);
  CHECK(std::abs(pearson_oracle(l) - 0.70710678118654752) < 1e-12);
  CHECK(matthews(BinaryCounts{0, 5, 0, 0}) == 0.0);
}

TEST_CASE("f1 and matthews against brute-force formulas, all 2x2 matrices up to 5") {
  for (size_t tp = 0; tp <= 5; ++tp)
    for (size_t tn = 0; tn <= 5; ++tn)
      for (size_t fp = 0; fp <= 5; ++fp)
        for (size_t fn = 0; fn <= 5; ++fn) {
          if (tp + tn + fp + fn == 0) continue;
          auto l = from_counts(tp, tn, fp, fn);
          CHECK(std::abs(matthews(l.preds, l.gold) - pearson_oracle(l)) < 1e-12);
          CHECK(std::abs(f1(l.preds, l.gold, "pos") - f1_oracle(tp, fp, fn)) < 1e-12);
          // swapping class roles leaves MCC unchanged
          CHECK(std::abs(matthews(BinaryCounts{tn, tp, fn, fp}) -
                         matthews(BinaryCounts{tp, tn, fp, fn})) < 1e-12);
        }
}

TEST_CASE("accuracy is invariant under consistent relabeling (property)") {
  auto l = from_counts(4, 3, 2, 1);
  auto relabel = [](std::vector<std::string> v) {
    for (auto &s : v) s = s == "pos" ? "Z" : "Y";
    return v;
  };
  CHECK(accuracy(l.preds, l.gold) == accuracy(relabel(l.preds), relabel(l.gold)));
}
