// src/persistence.cc

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

#include "labelseq/persistence.h"

#include <cmath>
#include <algorithm>
#include <fstream>
#include <limits>
#include <sstream>

#include "labelseq/error.h"

namespace labelseq {

using nlohmann::json;

json real_to_json(double value) {
  if (std::isfinite(value)) return value;
  if (std::isnan(value)) return "nan";
  return value > 0 ? "inf" : "-inf";
}

double real_from_json(const json &value) {
  if (value.is_number()) return value.get<double>();
  if (value.is_string()) {
    const auto s = value.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  }
  throw DataError("expected a number, got " + value.dump());
}

namespace {

template <typename Fn>
void for_each_line(std::string_view text, Fn &&fn) {
  size_t line_no = 0, start = 0;
  while (start <= text.size()) {
    size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    ++line_no;
    const auto line = text.substr(start, end - start);
    if (line.find_first_not_of(" \t\r") != std::string_view::npos) {
      try {
        fn(json::parse(line));
      } catch (const json::exception &e) {
        throw DataError("line " + std::to_string(line_no) + ": " + e.what());
      } catch (const DataError &e) {
        throw DataError("line " + std::to_string(line_no) + ": " + e.what());
      }
    }
    start = end + 1;
  }
}

}  // namespace

json candidate_to_json(const std::string &label, const Candidate &c) {
  json out = {{"class", label}, {"tokens", c.seq}, {"text", c.text},
              {"gen_score", real_to_json(c.gen_score)}};
  if (c.contrastive_score) out["contrastive_score"] = real_to_json(*c.contrastive_score);
  return out;
}

std::string candidates_to_jsonl(const std::vector<ClassCandidates> &by_class) {
  std::string out;
  for (const auto &cls : by_class)
    for (const auto &c : cls.candidates) out += candidate_to_json(cls.label, c).dump() + "\n";
  return out;
}

std::vector<ClassCandidates> candidates_from_jsonl(std::string_view text) {
  std::vector<ClassCandidates> out;
  for_each_line(text, [&](const json &j) {
    const auto label = j.at("class").get<std::string>();
    Candidate c;
    c.seq = j.at("tokens").get<TokenSeq>();
    c.text = j.at("text").get<std::string>();
    c.gen_score = real_from_json(j.at("gen_score"));
    if (j.contains("contrastive_score")) c.contrastive_score = real_from_json(j["contrastive_score"]);
    auto it = std::find_if(out.begin(), out.end(),
                           [&](const ClassCandidates &cc) { return cc.label == label; });
    if (it == out.end()) {
      out.push_back({label, {}});
      it = out.end() - 1;
    }
    it->candidates.push_back(std::move(c));
  });
  return out;
}

json mapping_to_json(const ScoredMapping &m) {
  json text = json::object(), tokens = json::object(), labels = json::array();
  for (const auto &e : m.mapping.entries()) {
    text[e.label] = e.text;
    tokens[e.label] = e.tokens;
    labels.push_back(e.label);
  }
  return {{"mapping", text},
          {"labels", labels},
          {"tokens", tokens},
          {"combo_score", real_to_json(m.combo_score)},
          {"dev_metric", m.dev_metric ? real_to_json(*m.dev_metric) : json()},
          {"candidate_index", m.candidate_index}};
}

ScoredMapping mapping_from_json(const json &j) {
  try {
    ScoredMapping m;
    std::vector<MappingEntry> entries;
    const auto &text = j.at("mapping");
    std::vector<std::string> labels;
    if (j.contains("labels")) {
      labels = j["labels"].get<std::vector<std::string>>();
    } else {
      for (const auto &[k, v] : text.items()) labels.push_back(k);
    }
    for (const auto &label : labels) {
      MappingEntry e{label, text.at(label).get<std::string>(), {}};
      if (j.contains("tokens")) e.tokens = j["tokens"].at(label).get<TokenSeq>();
      entries.push_back(std::move(e));
    }
    m.mapping = LabelMapping(std::move(entries));
    m.combo_score = j.contains("combo_score") ? real_from_json(j["combo_score"]) : 0.0;
    if (j.contains("dev_metric") && !j["dev_metric"].is_null())
      m.dev_metric = real_from_json(j["dev_metric"]);
    if (j.contains("candidate_index"))
      m.candidate_index = j["candidate_index"].get<std::vector<size_t>>();
    return m;
  } catch (const json::exception &e) {
    throw DataError(std::string("malformed mapping: ") + e.what());
  }
}

std::string mappings_to_jsonl(const std::vector<ScoredMapping> &mappings) {
  std::string out;
  for (const auto &m : mappings) out += mapping_to_json(m).dump() + "\n";
  return out;
}

std::vector<ScoredMapping> mappings_from_jsonl(std::string_view text) {
  std::vector<ScoredMapping> out;
  for_each_line(text, [&](const json &j) { out.push_back(mapping_from_json(j)); });
  return out;
}

BaselineMapping load_baseline_mapping(const std::string &path) {
  BaselineMapping out;
  json doc;
  try {
    doc = json::parse(read_text_file(path));
  } catch (const json::exception &e) {
    throw DataError(path + ": " + e.what());
  }
  if (!doc.is_object() || !doc.contains("mapping") || !doc["mapping"].is_object() ||
      doc["mapping"].empty())
    throw DataError(path + ": expected an object with a non-empty \"mapping\" object");
  if (doc.contains("template")) {
    if (!doc["template"].is_string()) throw DataError(path + ": \"template\" must be a string");
    out.template_pattern = doc["template"].get<std::string>();
  }
  // Keys come back sorted; the pipeline reorders them by task label order.
  for (const auto &[label, text] : doc["mapping"].items()) {
    if (!text.is_string()) throw DataError(path + ": mapping for '" + label + "' must be a string");
    out.label_text.emplace_back(label, text.get<std::string>());
  }
  return out;
}

std::string read_text_file(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string &path, const std::string &text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write '" + path + "'");
  out << text;
  out.flush();
  if (!out) throw DataError("failed writing '" + path + "'");
}

}  // namespace labelseq
