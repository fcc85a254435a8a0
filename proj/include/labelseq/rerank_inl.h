// include/labelseq/rerank_inl.h

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

#ifndef LABELSEQ_RERANK_INL_H_
#define LABELSEQ_RERANK_INL_H_

#include <queue>
#include <set>

#include "labelseq/error.h"

namespace labelseq {

namespace internal {

inline double combination_sum(const std::vector<std::vector<double>> &scores,
                              const std::vector<size_t> &index) {
  double s = 0.0;
  for (size_t c = 0; c < scores.size(); ++c) s += scores[c][index[c]];
  return s;
}

// Heap order: larger sum first, then smaller index tuple.
struct WorseCombination {
  bool operator()(const Combination &a, const Combination &b) const {
    if (a.score != b.score) return a.score < b.score;
    return a.index > b.index;
  }
};

}  // namespace internal

template <typename Distinct>
std::vector<Combination> k_best_combinations(
    const std::vector<std::vector<double>> &scores, size_t n,
    Distinct &&distinct) {
  std::vector<Combination> out;
  if (n == 0 || scores.empty()) return out;
  for (const auto &list : scores) {
    if (list.empty()) throw DataError("a class has no candidates");
    for (size_t i = 1; i < list.size(); ++i)
      if (list[i] > list[i - 1])
        throw UsageError("candidate scores must be sorted non-increasing");
  }

  // Every successor of a tuple has a sum no larger and a lexicographically
  // larger index, so popping in heap order yields the exact global order.
  std::priority_queue<Combination, std::vector<Combination>,
                      internal::WorseCombination>
      heap;
  std::set<std::vector<size_t>> seen;
  Combination start{std::vector<size_t>(scores.size(), 0), 0.0};
  start.score = internal::combination_sum(scores, start.index);
  seen.insert(start.index);
  heap.push(std::move(start));

  while (!heap.empty() && out.size() < n) {
    Combination top = heap.top();
    heap.pop();
    for (size_t c = 0; c < scores.size(); ++c) {
      if (top.index[c] + 1 >= scores[c].size()) continue;
      Combination next{top.index, 0.0};
      ++next.index[c];
      if (!seen.insert(next.index).second) continue;
      next.score = internal::combination_sum(scores, next.index);
      heap.push(std::move(next));
    }
    bool ok = true;
    for (size_t a = 0; a < scores.size() && ok; ++a)
      for (size_t b = a + 1; b < scores.size() && ok; ++b)
        ok = distinct(a, top.index[a], b, top.index[b]);
    if (ok) out.push_back(std::move(top));
  }
  return out;
}

}  // namespace labelseq

#endif  // LABELSEQ_RERANK_INL_H_
