// tests/oracles.h

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

// Brute-force oracles shared by the unit and acceptance tests: metric
// formulas straight from their definitions and full enumeration of the
// mapping lattice.
#ifndef LABELSEQ_TESTS_ORACLES_H_
#define LABELSEQ_TESTS_ORACLES_H_

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "labelseq/rerank.h"

namespace labelseq::testing {

struct Labels {
  std::vector<std::string> preds, gold;
};

inline Labels from_counts(size_t tp, size_t tn, size_t fp, size_t fn) {
  Labels l;
  auto add = [&](size_t n, const char *p, const char *g) {
    for (size_t i = 0; i < n; ++i) {
      l.preds.push_back(p);
      l.gold.push_back(g);
    }
  };
  add(tp, "pos", "pos");
  add(tn, "neg", "neg");
  add(fp, "pos", "neg");
  add(fn, "neg", "pos");
  return l;
}

// Pearson correlation of the 0/1 indicator vectors, straight from the
// definition; zero when either vector is constant.
inline double pearson_oracle(const Labels &l) {
  const size_t n = l.gold.size();
  std::vector<double> x, y;
  for (size_t i = 0; i < n; ++i) {
    x.push_back(l.preds[i] == "pos" ? 1.0 : 0.0);
    y.push_back(l.gold[i] == "pos" ? 1.0 : 0.0);
  }
  double mx = 0, my = 0;
  for (size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0, sxx = 0, syy = 0;
  for (size_t i = 0; i < n; ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0 || syy == 0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

inline double f1_oracle(size_t tp, size_t fp, size_t fn) {
  if (tp + fp == 0 || tp + fn == 0) return 0.0;
  const double p = double(tp) / double(tp + fp);
  const double r = double(tp) / double(tp + fn);
  if (p + r == 0) return 0.0;
  return 2 * p * r / (p + r);
}


// Full cartesian product, injectivity-filtered, sorted by (sum desc, index
// tuple asc).
inline void enumerate_combinations(const std::vector<ClassCandidates> &cls, std::vector<size_t> &idx,
               size_t c, std::vector<Combination> &out) {
  if (c == cls.size()) {
    for (size_t a = 0; a < cls.size(); ++a)
      for (size_t b = a + 1; b < cls.size(); ++b)
        if (cls[a].candidates[idx[a]].seq == cls[b].candidates[idx[b]].seq) return;
    double s = 0.0;
    for (size_t k = 0; k < cls.size(); ++k) s += *cls[k].candidates[idx[k]].contrastive_score;
    out.push_back({idx, s});
    return;
  }
  for (idx[c] = 0; idx[c] < cls[c].candidates.size(); ++idx[c]) enumerate_combinations(cls, idx, c + 1, out);
}

inline std::vector<Combination> brute_force(const std::vector<ClassCandidates> &cls, size_t n) {
  std::vector<Combination> all;
  std::vector<size_t> idx(cls.size(), 0);
  enumerate_combinations(cls, idx, 0, all);
  std::sort(all.begin(), all.end(), [](const Combination &a, const Combination &b) {
    if (a.score != b.score) return a.score > b.score;
    return a.index < b.index;
  });
  if (all.size() > n) all.resize(n);
  return all;
}

}  // namespace labelseq::testing

#endif  // LABELSEQ_TESTS_ORACLES_H_
