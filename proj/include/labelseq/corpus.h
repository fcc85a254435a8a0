// include/labelseq/corpus.h

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

#ifndef LABELSEQ_CORPUS_H_
#define LABELSEQ_CORPUS_H_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace labelseq {

struct Example {
  std::vector<std::string> fields;
  std::optional<std::string> label;  // absent for unlabeled test data

  bool operator==(const Example &) const = default;
};

enum class TaskKind {
  kSingleSentence,
  kSentencePair,
  kBoolQ,
  kCopa,
  kMultiRC,
  kWiC,
};

enum class MetricKind { kAccuracy, kF1, kMatthews };

enum class DataFormat { kTsv, kJsonLines };

TaskKind parse_task_kind(std::string_view name);
std::string_view to_string(TaskKind kind);
MetricKind parse_metric(std::string_view name);
std::string_view to_string(MetricKind metric);
DataFormat parse_data_format(std::string_view name);
std::string_view to_string(DataFormat format);

// Number of input fields each task kind expects.
size_t field_arity(TaskKind kind);

struct TaskSpec {
  TaskKind kind = TaskKind::kSingleSentence;
  std::vector<std::string> labels;  // class order; index = class id
  MetricKind metric = MetricKind::kAccuracy;
  std::string positive_label;       // used by F1; empty = labels[1]

  // Throws DataError when the invariants do not hold for `data`.
  void validate(const std::vector<Example> &data) const;
  size_t class_index(std::string_view label) const;  // throws DataError
  const std::string &f1_positive() const;
};

// Labels in order of first appearance.
std::vector<std::string> labels_in_order(const std::vector<Example> &data);

// Builds a TaskSpec, taking labels from `data` unless `labels` is non-empty.
TaskSpec make_task_spec(TaskKind kind, const std::vector<Example> &data,
                        MetricKind metric = MetricKind::kAccuracy,
                        std::vector<std::string> labels = {});

struct FewShotSplit {
  std::vector<Example> train;
  std::vector<Example> dev;
  uint64_t seed = 0;
  size_t k_per_class = 0;
  std::vector<std::string> labels;

  // Training examples whose label is `label`.
  std::vector<Example> train_of(std::string_view label) const;
  // Complement of train_of(label) within train.
  std::vector<Example> train_except(std::string_view label) const;
  std::vector<Example> dev_of(std::string_view label) const;
};

std::vector<Example> load_dataset(const std::string &path, DataFormat format);
std::vector<Example> parse_dataset(std::string_view text, DataFormat format);

// Shuffles each class's indices with a stream derived from (seed, class
// index); the first k go to train and the next k to dev. Output is grouped
// by class in `labels` order.
FewShotSplit sample_few_shot(const std::vector<Example> &data, size_t k,
                             uint64_t seed);
FewShotSplit sample_few_shot(const std::vector<Example> &data, size_t k,
                             uint64_t seed,
                             const std::vector<std::string> &labels);

}  // namespace labelseq

#endif  // LABELSEQ_CORPUS_H_
