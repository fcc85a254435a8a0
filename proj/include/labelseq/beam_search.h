// include/labelseq/beam_search.h

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

#ifndef LABELSEQ_BEAM_SEARCH_H_
#define LABELSEQ_BEAM_SEARCH_H_

#include <optional>
#include <string>
#include <vector>

#include "labelseq/corpus.h"
#include "labelseq/model.h"
#include "labelseq/templating.h"

namespace labelseq {

struct SearchConfig {
  size_t beam_width = 50;
  size_t max_len = 20;
  // Completed candidates are ranked by gen_score / len^length_penalty. Zero
  // keeps raw sums.
  double length_penalty = 0.0;

  static SearchConfig autoword() { return {50, 1, 0.0}; }
  void validate() const;  // throws UsageError
};

struct Candidate {
  TokenSeq seq;
  std::string text;
  double gen_score = 0.0;  // sum over class examples of sequence log-prob
  std::optional<double> contrastive_score;

  bool operator==(const Candidate &) const = default;
};

struct ClassCandidates {
  std::string label;
  std::vector<Candidate> candidates;

  bool operator==(const ClassCandidates &) const = default;
};

// Beam search over next-token log-probs summed across `class_examples`,
// each conditioned independently. A hypothesis completes on EOS or at
// max_len. Returns up to beam_width candidates ordered by gen_score
// (descending), ties by token ids (ascending lexicographic).
std::vector<Candidate> generate_candidates(
    const LanguageModel &model, const Template &tmpl,
    const std::vector<Example> &class_examples, const SearchConfig &config);

// generate_candidates for every class of the split, over its training examples.
std::vector<ClassCandidates> generate_all(const LanguageModel &model,
                                          const Template &tmpl,
                                          const FewShotSplit &split,
                                          const SearchConfig &config,
                                          size_t workers = 1);

}  // namespace labelseq

#endif  // LABELSEQ_BEAM_SEARCH_H_
