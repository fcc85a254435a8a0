// include/labelseq/scoring.h

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

#ifndef LABELSEQ_SCORING_H_
#define LABELSEQ_SCORING_H_

#include <string>
#include <vector>

#include "labelseq/corpus.h"
#include "labelseq/model.h"
#include "labelseq/templating.h"

namespace labelseq {

struct MappingEntry {
  std::string label;
  std::string text;  // display form
  TokenSeq tokens;   // ids in the vocabulary of the model it is scored with

  bool operator==(const MappingEntry &) const = default;
};

// Injective class -> label sequence map, in class order.
class LabelMapping {
 public:
  LabelMapping() = default;
  // Throws DataError on empty or duplicate sequences or repeated labels.
  explicit LabelMapping(std::vector<MappingEntry> entries);

  // Builds a mapping from display text, tokenized by `model`.
  static LabelMapping from_text(
      const LanguageModel &model,
      const std::vector<std::pair<std::string, std::string>> &label_text);

  // Re-tokenizes every entry's text for another model.
  LabelMapping retokenized(const LanguageModel &model) const;

  // Throws DataError unless the labels are exactly the task's labels.
  void check_covers(const TaskSpec &task) const;

  const std::vector<MappingEntry> &entries() const { return entries_; }
  const MappingEntry &at(const std::string &label) const;
  size_t size() const { return entries_.size(); }

  bool operator==(const LabelMapping &) const = default;

 private:
  std::vector<MappingEntry> entries_;
};

struct ClassScore {
  std::string label;
  double score = 0.0;  // sum of token log-probs (no length normalization)
  double per_token = 0.0;  // diagnostic only
};

// One score per mapping entry, in mapping order.
std::vector<ClassScore> class_scores(const LanguageModel &model,
                                     const Template &tmpl,
                                     const Example &example,
                                     const LabelMapping &mapping);

// Argmax of class_scores; ties go to the earliest entry in mapping order
// (mapping order follows TaskSpec order when built by the pipeline).
std::string predict(const LanguageModel &model, const Template &tmpl,
                    const Example &example, const LabelMapping &mapping);

// Same tie rule, on precomputed scores.
size_t argmax_first(const std::vector<ClassScore> &scores);

}  // namespace labelseq

#endif  // LABELSEQ_SCORING_H_
