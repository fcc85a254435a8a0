// src/scoring.cc

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

#include "labelseq/scoring.h"

#include "labelseq/error.h"

namespace labelseq {

LabelMapping::LabelMapping(std::vector<MappingEntry> entries)
    : entries_(std::move(entries)) {
  if (entries_.empty()) throw DataError("label mapping is empty");
  for (size_t i = 0; i < entries_.size(); ++i) {
    if (entries_[i].tokens.empty())
      throw DataError("label sequence for '" + entries_[i].label +
                      "' must be non-empty");
    for (size_t j = 0; j < i; ++j) {
      if (entries_[j].label == entries_[i].label)
        throw DataError("label '" + entries_[i].label + "' mapped twice");
      if (entries_[j].tokens == entries_[i].tokens)
        throw DataError("labels '" + entries_[j].label + "' and '" +
                        entries_[i].label + "' share a label sequence");
    }
  }
}

LabelMapping LabelMapping::from_text(
    const LanguageModel &model,
    const std::vector<std::pair<std::string, std::string>> &label_text) {
  std::vector<MappingEntry> entries;
  for (const auto &[label, text] : label_text)
    entries.push_back({label, text, model.encode(text)});
  return LabelMapping(std::move(entries));
}

LabelMapping LabelMapping::retokenized(const LanguageModel &model) const {
  std::vector<MappingEntry> entries = entries_;
  for (auto &e : entries) e.tokens = model.encode(e.text);
  return LabelMapping(std::move(entries));
}

void LabelMapping::check_covers(const TaskSpec &task) const {
  if (entries_.size() != task.labels.size())
    throw DataError("mapping has " + std::to_string(entries_.size()) +
                    " classes, task has " + std::to_string(task.labels.size()));
  for (const auto &label : task.labels) at(label);
}

const MappingEntry &LabelMapping::at(const std::string &label) const {
  for (const auto &e : entries_)
    if (e.label == label) return e;
  throw DataError("mapping has no entry for class '" + label + "'");
}

std::vector<ClassScore> class_scores(const LanguageModel &model,
                                     const Template &tmpl,
                                     const Example &example,
                                     const LabelMapping &mapping) {
  const RenderedInput input = render(tmpl, example);
  std::vector<ClassScore> out;
  out.reserve(mapping.size());
  for (const auto &e : mapping.entries()) {
    const double s = model.sequence_logprob(input, e.tokens);
    out.push_back({e.label, s, s / static_cast<double>(e.tokens.size())});
  }
  return out;
}

size_t argmax_first(const std::vector<ClassScore> &scores) {
  if (scores.empty()) throw DataError("no class scores");
  size_t best = 0;
  for (size_t i = 1; i < scores.size(); ++i)
    if (scores[i].score > scores[best].score) best = i;
  return best;
}

std::string predict(const LanguageModel &model, const Template &tmpl,
                    const Example &example, const LabelMapping &mapping) {
  const auto scores = class_scores(model, tmpl, example, mapping);
  return scores[argmax_first(scores)].label;
}

}  // namespace labelseq
