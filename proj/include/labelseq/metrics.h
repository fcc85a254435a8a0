// include/labelseq/metrics.h

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

#ifndef LABELSEQ_METRICS_H_
#define LABELSEQ_METRICS_H_

#include <span>
#include <string>

#include "labelseq/corpus.h"

namespace labelseq {

struct BinaryCounts {
  size_t tp = 0, tn = 0, fp = 0, fn = 0;
};

// Throws DataError on length mismatch or empty input.
double accuracy(std::span<const std::string> preds,
                std::span<const std::string> gold);

// Counts with respect to `positive`; throws DataError if a label other than
// `positive` / the single other class shows up.
BinaryCounts binary_counts(std::span<const std::string> preds,
                           std::span<const std::string> gold,
                           const std::string &positive);

// Zero when precision and recall are both undefined.
double f1(std::span<const std::string> preds, std::span<const std::string> gold,
          const std::string &positive);
double f1(const BinaryCounts &c);

// Matthews correlation; zero when any marginal is zero.
double matthews(std::span<const std::string> preds,
                std::span<const std::string> gold);
double matthews(const BinaryCounts &c);

double compute_metric(MetricKind metric, const TaskSpec &task,
                      std::span<const std::string> preds,
                      std::span<const std::string> gold);

}  // namespace labelseq

#endif  // LABELSEQ_METRICS_H_
