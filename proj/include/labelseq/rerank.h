// include/labelseq/rerank.h

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

#ifndef LABELSEQ_RERANK_H_
#define LABELSEQ_RERANK_H_

#include <optional>
#include <string>
#include <vector>

#include "labelseq/beam_search.h"
#include "labelseq/scoring.h"

namespace labelseq {

// Mean sequence log-prob over the class's training examples minus the mean
// over the other classes' training examples.
// Throws DataError when either side is empty.
double contrastive_score(const LanguageModel &model, const Template &tmpl,
                         const FewShotSplit &split, const std::string &label,
                         const Candidate &candidate);

// Same quantity from precomputed per-example scores aligned with
// `train_labels`. Every score is shifted by scores[0] before averaging, which
// leaves the difference unchanged and makes a class-invariant sequence come
// out as exactly zero.
double contrastive_from_scores(const std::vector<double> &scores,
                               const std::vector<std::string> &train_labels,
                               const std::string &label);

// Fills contrastive_score on every candidate and stable-sorts each class
// list by it (descending), ties by gen_score (descending), then token ids.
std::vector<ClassCandidates> rerank_candidates(
    const LanguageModel &model, const Template &tmpl,
    const FewShotSplit &split, std::vector<ClassCandidates> candidates_by_class,
    size_t workers = 1);

struct ScoredMapping {
  LabelMapping mapping;
  double combo_score = 0.0;  // sum of the chosen candidates' contrastive scores
  std::optional<double> dev_metric;
  std::vector<size_t> candidate_index;  // per class, into the ranked lists

  bool operator==(const ScoredMapping &) const = default;
};

// A selection of one index per class.
struct Combination {
  std::vector<size_t> index;
  double score = 0.0;

  bool operator==(const Combination &) const = default;
};

// The n best selections from the cartesian product of per-class score lists,
// by summed score (descending), ties by index tuple (ascending
// lexicographic). `distinct(c1, i1, c2, i2)` vetoes selections in which two
// classes would share a sequence. Lists must be sorted non-increasing.
// Best-first expansion over the product lattice; never materializes it.
template <typename Distinct>
std::vector<Combination> k_best_combinations(
    const std::vector<std::vector<double>> &scores, size_t n,
    Distinct &&distinct);

// top-n label mappings from re-ranked candidate lists (contrastive scores
// must be set). Throws DataError when no injective combination exists.
std::vector<ScoredMapping> top_n_mappings(
    const std::vector<ClassCandidates> &ranked_by_class, size_t n);

}  // namespace labelseq

#include "labelseq/rerank_inl.h"

#endif  // LABELSEQ_RERANK_H_
