// src/corpus.cc

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

#include "labelseq/corpus.h"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "labelseq/error.h"
#include "labelseq/rng.h"

namespace labelseq {

namespace {

struct TaskKindName {
  TaskKind kind;
  std::string_view name;
  size_t arity;
};

constexpr TaskKindName kTaskKinds[] = {
    {TaskKind::kSingleSentence, "single-sentence", 1},
    {TaskKind::kSentencePair, "sentence-pair", 2},
    {TaskKind::kBoolQ, "boolq-style", 2},
    {TaskKind::kCopa, "copa-style", 4},
    {TaskKind::kMultiRC, "multirc-style", 3},
    {TaskKind::kWiC, "wic-style", 3},
};

std::string rtrim(std::string s) {
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' ||
                        s.back() == '\r' || s.back() == '\n'))
    s.pop_back();
  return s;
}

std::string at_line(size_t line) { return "line " + std::to_string(line) + ": "; }

}  // namespace

TaskKind parse_task_kind(std::string_view name) {
  for (const auto &k : kTaskKinds)
    if (k.name == name) return k.kind;
  if (name == "nli" || name == "pair") return TaskKind::kSentencePair;
  if (name == "single") return TaskKind::kSingleSentence;
  throw UsageError("unsupported task kind '" + std::string(name) + "'");
}

std::string_view to_string(TaskKind kind) {
  for (const auto &k : kTaskKinds)
    if (k.kind == kind) return k.name;
  return "unknown";
}

size_t field_arity(TaskKind kind) {
  for (const auto &k : kTaskKinds)
    if (k.kind == kind) return k.arity;
  throw UsageError("unsupported task kind");
}

MetricKind parse_metric(std::string_view name) {
  if (name == "accuracy" || name == "acc") return MetricKind::kAccuracy;
  if (name == "f1") return MetricKind::kF1;
  if (name == "matthews" || name == "mcc") return MetricKind::kMatthews;
  throw UsageError("unknown metric '" + std::string(name) + "'");
}

std::string_view to_string(MetricKind metric) {
  switch (metric) {
    case MetricKind::kAccuracy: return "accuracy";
    case MetricKind::kF1: return "f1";
    case MetricKind::kMatthews: return "matthews";
  }
  return "unknown";
}

DataFormat parse_data_format(std::string_view name) {
  if (name == "tsv") return DataFormat::kTsv;
  if (name == "json-lines" || name == "jsonl") return DataFormat::kJsonLines;
  throw UsageError("unknown data format '" + std::string(name) + "'");
}

std::string_view to_string(DataFormat format) {
  return format == DataFormat::kTsv ? "tsv" : "json-lines";
}

void TaskSpec::validate(const std::vector<Example> &data) const {
  if (labels.size() < 2)
    throw DataError("task needs at least 2 labels, got " +
                    std::to_string(labels.size()));
  for (size_t i = 0; i < labels.size(); ++i)
    for (size_t j = i + 1; j < labels.size(); ++j)
      if (labels[i] == labels[j])
        throw DataError("duplicate label '" + labels[i] + "'");
  const size_t arity = field_arity(kind);
  for (size_t i = 0; i < data.size(); ++i) {
    if (data[i].fields.size() != arity)
      throw DataError("example " + std::to_string(i) + " has " +
                      std::to_string(data[i].fields.size()) +
                      " fields but task '" + std::string(to_string(kind)) +
                      "' expects " + std::to_string(arity));
    if (data[i].label) class_index(*data[i].label);
  }
  if (metric == MetricKind::kF1) class_index(f1_positive());
}

size_t TaskSpec::class_index(std::string_view label) const {
  for (size_t i = 0; i < labels.size(); ++i)
    if (labels[i] == label) return i;
  throw DataError("unknown class '" + std::string(label) + "'");
}

const std::string &TaskSpec::f1_positive() const {
  if (!positive_label.empty()) return positive_label;
  if (labels.size() < 2) throw DataError("F1 needs a binary task");
  return labels[1];
}

std::vector<std::string> labels_in_order(const std::vector<Example> &data) {
  std::vector<std::string> out;
  for (const auto &ex : data) {
    if (!ex.label) continue;
    if (std::find(out.begin(), out.end(), *ex.label) == out.end())
      out.push_back(*ex.label);
  }
  return out;
}

TaskSpec make_task_spec(TaskKind kind, const std::vector<Example> &data,
                        MetricKind metric, std::vector<std::string> labels) {
  TaskSpec spec;
  spec.kind = kind;
  spec.metric = metric;
  spec.labels = labels.empty() ? labels_in_order(data) : std::move(labels);
  spec.validate(data);
  return spec;
}

namespace {

std::vector<Example> filter_label(const std::vector<Example> &items,
                                  std::string_view label, bool keep) {
  std::vector<Example> out;
  for (const auto &ex : items)
    if ((ex.label && *ex.label == label) == keep) out.push_back(ex);
  return out;
}

}  // namespace

std::vector<Example> FewShotSplit::train_of(std::string_view label) const {
  return filter_label(train, label, true);
}

std::vector<Example> FewShotSplit::train_except(std::string_view label) const {
  return filter_label(train, label, false);
}

std::vector<Example> FewShotSplit::dev_of(std::string_view label) const {
  return filter_label(dev, label, true);
}

std::vector<Example> parse_dataset(std::string_view text, DataFormat format) {
  std::vector<Example> out;
  size_t line_no = 0;
  size_t arity = 0;
  size_t pos = 0;
  while (pos < text.size()) {
    size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string line(text.substr(pos, end - pos));
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (rtrim(line).empty()) continue;

    Example ex;
    if (format == DataFormat::kTsv) {
      std::vector<std::string> cols;
      size_t start = 0;
      while (true) {
        const size_t tab = line.find('\t', start);
        cols.push_back(line.substr(start, tab - start));
        if (tab == std::string::npos) break;
        start = tab + 1;
      }
      if (cols.size() < 2)
        throw DataError(at_line(line_no) +
                        "expected at least one field and a label column");
      ex.label = rtrim(cols.back());
      cols.pop_back();
      ex.fields = std::move(cols);
    } else {
      nlohmann::json record;
      try {
        record = nlohmann::json::parse(line);
      } catch (const nlohmann::json::parse_error &e) {
        throw DataError(at_line(line_no) + "invalid JSON: " + e.what());
      }
      if (!record.is_object() || !record.contains("fields") ||
          !record["fields"].is_array())
        throw DataError(at_line(line_no) + "missing \"fields\" array");
      for (const auto &f : record["fields"]) {
        if (!f.is_string())
          throw DataError(at_line(line_no) + "fields must be strings");
        ex.fields.push_back(f.get<std::string>());
      }
      if (record.contains("label") && !record["label"].is_null()) {
        if (!record["label"].is_string())
          throw DataError(at_line(line_no) + "label must be a string or null");
        ex.label = record["label"].get<std::string>();
      }
    }
    if (ex.fields.empty())
      throw DataError(at_line(line_no) + "record has no fields");
    for (auto &f : ex.fields) {
      f = rtrim(f);
      if (f.empty()) throw DataError(at_line(line_no) + "empty field");
    }
    if (ex.label && ex.label->empty())
      throw DataError(at_line(line_no) + "empty label");
    if (out.empty()) {
      arity = ex.fields.size();
    } else if (ex.fields.size() != arity) {
      throw DataError(at_line(line_no) + "ragged record: " +
                      std::to_string(ex.fields.size()) + " fields, expected " +
                      std::to_string(arity));
    }
    out.push_back(std::move(ex));
  }
  if (out.empty()) throw DataError("no records");
  return out;
}

std::vector<Example> load_dataset(const std::string &path, DataFormat format) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open data file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_dataset(buf.str(), format);
  } catch (const DataError &e) {
    throw DataError(path + ": " + e.what());
  }
}

FewShotSplit sample_few_shot(const std::vector<Example> &data, size_t k,
                             uint64_t seed) {
  return sample_few_shot(data, k, seed, labels_in_order(data));
}

FewShotSplit sample_few_shot(const std::vector<Example> &data, size_t k,
                             uint64_t seed,
                             const std::vector<std::string> &labels) {
  if (k == 0) throw UsageError("k must be at least 1");
  FewShotSplit split;
  split.seed = seed;
  split.k_per_class = k;
  split.labels = labels;
  for (size_t c = 0; c < labels.size(); ++c) {
    std::vector<size_t> idx;
    for (size_t i = 0; i < data.size(); ++i)
      if (data[i].label && *data[i].label == labels[c]) idx.push_back(i);
    if (idx.size() < 2 * k)
      throw DataError("class '" + labels[c] + "' has " +
                      std::to_string(idx.size()) + " examples, needs " +
                      std::to_string(2 * k));
    auto rng = SplitMix64::derive(seed, c);
    shuffle(std::span<size_t>(idx), rng);
    for (size_t i = 0; i < k; ++i) split.train.push_back(data[idx[i]]);
    for (size_t i = k; i < 2 * k; ++i) split.dev.push_back(data[idx[i]]);
  }
  return split;
}

}  // namespace labelseq
