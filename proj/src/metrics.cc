// src/metrics.cc

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

#include "labelseq/metrics.h"

#include <cmath>
#include <set>

#include "labelseq/error.h"

namespace labelseq {

namespace {

void check_lengths(std::span<const std::string> preds,
                   std::span<const std::string> gold) {
  if (preds.size() != gold.size())
    throw DataError("prediction/gold length mismatch: " +
                    std::to_string(preds.size()) + " vs " +
                    std::to_string(gold.size()));
  if (gold.empty()) throw DataError("metric over an empty set");
}

}  // namespace

double accuracy(std::span<const std::string> preds,
                std::span<const std::string> gold) {
  check_lengths(preds, gold);
  size_t hits = 0;
  for (size_t i = 0; i < gold.size(); ++i) hits += preds[i] == gold[i];
  return static_cast<double>(hits) / static_cast<double>(gold.size());
}

BinaryCounts binary_counts(std::span<const std::string> preds,
                           std::span<const std::string> gold,
                           const std::string &positive) {
  check_lengths(preds, gold);
  std::set<std::string> classes(gold.begin(), gold.end());
  classes.insert(preds.begin(), preds.end());
  classes.insert(positive);
  if (classes.size() > 2)
    throw DataError("binary metric over " + std::to_string(classes.size()) +
                    " classes");
  BinaryCounts c;
  for (size_t i = 0; i < gold.size(); ++i) {
    const bool p = preds[i] == positive;
    const bool g = gold[i] == positive;
    if (p && g) ++c.tp;
    else if (p) ++c.fp;
    else if (g) ++c.fn;
    else ++c.tn;
  }
  return c;
}

double f1(const BinaryCounts &c) {
  const double denom = 2.0 * c.tp + c.fp + c.fn;
  if (c.tp == 0 || denom == 0.0) return 0.0;
  return 2.0 * c.tp / denom;
}

double f1(std::span<const std::string> preds, std::span<const std::string> gold,
          const std::string &positive) {
  return f1(binary_counts(preds, gold, positive));
}

double matthews(const BinaryCounts &c) {
  const double tp = c.tp, tn = c.tn, fp = c.fp, fn = c.fn;
  const double denom = (tp + fp) * (tp + fn) * (tn + fp) * (tn + fn);
  if (denom == 0.0) return 0.0;
  return (tp * tn - fp * fn) / std::sqrt(denom);
}

double matthews(std::span<const std::string> preds,
                std::span<const std::string> gold) {
  check_lengths(preds, gold);
  // MCC is symmetric in which class is called positive; pick one.
  std::set<std::string> classes(gold.begin(), gold.end());
  classes.insert(preds.begin(), preds.end());
  return matthews(binary_counts(preds, gold, *classes.begin()));
}

double compute_metric(MetricKind metric, const TaskSpec &task,
                      std::span<const std::string> preds,
                      std::span<const std::string> gold) {
  switch (metric) {
    case MetricKind::kAccuracy: return accuracy(preds, gold);
    case MetricKind::kF1: return f1(preds, gold, task.f1_positive());
    case MetricKind::kMatthews: return matthews(preds, gold);
  }
  throw InternalError("unhandled metric");
}

}  // namespace labelseq
