// include/labelseq/persistence.h

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

#ifndef LABELSEQ_PERSISTENCE_H_
#define LABELSEQ_PERSISTENCE_H_

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "labelseq/beam_search.h"
#include "labelseq/rerank.h"

namespace labelseq {

// Reals that may be infinite are written as numbers when finite and as the
// strings "inf" / "-inf" / "nan" otherwise.
nlohmann::json real_to_json(double value);
double real_from_json(const nlohmann::json &value);

// Candidates: one line per candidate,
//   {"class", "tokens", "text", "gen_score", "contrastive_score"?}
// grouped by class in list order.
nlohmann::json candidate_to_json(const std::string &label, const Candidate &candidate);
std::string candidates_to_jsonl(const std::vector<ClassCandidates> &by_class);
std::vector<ClassCandidates> candidates_from_jsonl(std::string_view text);

// Mappings: one line per mapping,
//   {"mapping": {label: text}, "labels": [...], "tokens": {label: [...]},
//    "combo_score", "dev_metric" (null when unset), "candidate_index"}
// "labels" keeps class order, which the object keys do not.
nlohmann::json mapping_to_json(const ScoredMapping &mapping);
ScoredMapping mapping_from_json(const nlohmann::json &doc);
std::string mappings_to_jsonl(const std::vector<ScoredMapping> &mappings);
std::vector<ScoredMapping> mappings_from_jsonl(std::string_view text);

// Hand-written mapping for the bypass mode:
//   {"template": "{0} [MASK]" (optional), "mapping": {label: text, ...}}
struct BaselineMapping {
  std::optional<std::string> template_pattern;
  std::vector<std::pair<std::string, std::string>> label_text;  // sorted by label
};
BaselineMapping load_baseline_mapping(const std::string &path);

std::string read_text_file(const std::string &path);  // DataError on failure
void write_text_file(const std::string &path, const std::string &text);

}  // namespace labelseq

#endif  // LABELSEQ_PERSISTENCE_H_
