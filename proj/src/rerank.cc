// src/rerank.cc

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

#include "labelseq/rerank.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "labelseq/error.h"
#include "labelseq/parallel.h"

namespace labelseq {

double contrastive_from_scores(const std::vector<double> &scores,
                               const std::vector<std::string> &train_labels,
                               const std::string &label) {
  if (scores.size() != train_labels.size() || scores.empty())
    throw InternalError("contrastive scores misaligned with training labels");
  // Shift by the first finite score; -inf entries (zero-probability
  // sequences) pass through and drive their side's mean to -inf.
  double ref = 0.0;
  for (double v : scores)
    if (std::isfinite(v)) {
      ref = v;
      break;
    }
  double in_sum = 0.0, out_sum = 0.0;
  size_t in_n = 0, out_n = 0;
  for (size_t i = 0; i < scores.size(); ++i) {
    if (train_labels[i] == label) {
      in_sum += scores[i] - ref;
      ++in_n;
    } else {
      out_sum += scores[i] - ref;
      ++out_n;
    }
  }
  if (in_n == 0)
    throw DataError("class '" + label + "' has no training examples");
  if (out_n == 0)
    throw DataError("contrastive score needs examples outside class '" + label +
                    "'");
  const double q =
      in_sum / static_cast<double>(in_n) - out_sum / static_cast<double>(out_n);
  // Impossible on both sides carries no class information; rank it last.
  if (std::isnan(q)) return -std::numeric_limits<double>::infinity();
  return q;
}

namespace {

std::vector<std::string> train_labels(const FewShotSplit &split) {
  std::vector<std::string> out;
  for (const auto &ex : split.train) out.push_back(ex.label.value_or(""));
  return out;
}

std::vector<double> per_example_scores(const LanguageModel &model,
                                       const std::vector<RenderedInput> &inputs,
                                       const TokenSeq &seq) {
  std::vector<double> out;
  out.reserve(inputs.size());
  for (const auto &in : inputs) out.push_back(model.sequence_logprob(in, seq));
  return out;
}

}  // namespace

double contrastive_score(const LanguageModel &model, const Template &tmpl,
                         const FewShotSplit &split, const std::string &label,
                         const Candidate &candidate) {
  if (candidate.seq.empty()) throw DataError("label sequence must be non-empty");
  std::vector<RenderedInput> inputs;
  for (const auto &ex : split.train) inputs.push_back(render(tmpl, ex));
  return contrastive_from_scores(per_example_scores(model, inputs, candidate.seq),
                                 train_labels(split), label);
}

std::vector<ClassCandidates> rerank_candidates(
    const LanguageModel &model, const Template &tmpl,
    const FewShotSplit &split, std::vector<ClassCandidates> candidates_by_class,
    size_t workers) {
  std::vector<RenderedInput> inputs;
  for (const auto &ex : split.train) inputs.push_back(render(tmpl, ex));
  const auto labels = train_labels(split);

  // Score each distinct sequence once; classes often share candidates.
  std::map<TokenSeq, size_t> slot;
  std::vector<const TokenSeq *> unique;
  for (const auto &cc : candidates_by_class)
    for (const auto &c : cc.candidates)
      if (slot.emplace(c.seq, unique.size()).second) unique.push_back(&c.seq);
  std::vector<std::vector<double>> scores(unique.size());
  parallel_for(unique.size(), workers, [&](size_t i) {
    scores[i] = per_example_scores(model, inputs, *unique[i]);
  });

  for (auto &cc : candidates_by_class) {
    for (auto &c : cc.candidates)
      c.contrastive_score =
          contrastive_from_scores(scores[slot.at(c.seq)], labels, cc.label);
    std::stable_sort(cc.candidates.begin(), cc.candidates.end(),
                     [](const Candidate &a, const Candidate &b) {
                       if (*a.contrastive_score != *b.contrastive_score)
                         return *a.contrastive_score > *b.contrastive_score;
                       if (a.gen_score != b.gen_score)
                         return a.gen_score > b.gen_score;
                       return a.seq < b.seq;
                     });
  }
  return candidates_by_class;
}

std::vector<ScoredMapping> top_n_mappings(
    const std::vector<ClassCandidates> &ranked_by_class, size_t n) {
  if (ranked_by_class.empty()) throw DataError("no classes to combine");
  std::vector<std::vector<double>> scores;
  for (const auto &cc : ranked_by_class) {
    if (cc.candidates.empty())
      throw DataError("class '" + cc.label + "' has no candidates");
    std::vector<double> s;
    for (const auto &c : cc.candidates) {
      if (!c.contrastive_score)
        throw UsageError("candidates must be re-ranked before combination");
      s.push_back(*c.contrastive_score);
    }
    scores.push_back(std::move(s));
  }
  auto distinct = [&](size_t a, size_t ia, size_t b, size_t ib) {
    return ranked_by_class[a].candidates[ia].seq !=
           ranked_by_class[b].candidates[ib].seq;
  };
  const auto combos = k_best_combinations(scores, n, distinct);
  if (combos.empty() && n > 0)
    throw DataError("no label mapping with distinct sequences per class");

  std::vector<ScoredMapping> out;
  for (const auto &combo : combos) {
    std::vector<MappingEntry> entries;
    for (size_t c = 0; c < ranked_by_class.size(); ++c) {
      const auto &cand = ranked_by_class[c].candidates[combo.index[c]];
      entries.push_back({ranked_by_class[c].label, cand.text, cand.seq});
    }
    out.push_back({LabelMapping(std::move(entries)), combo.score, std::nullopt,
                   combo.index});
  }
  return out;
}

}  // namespace labelseq
