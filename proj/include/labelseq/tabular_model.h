// include/labelseq/tabular_model.h

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

#ifndef LABELSEQ_TABULAR_MODEL_H_
#define LABELSEQ_TABULAR_MODEL_H_

#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "labelseq/model.h"

namespace labelseq {

inline constexpr std::string_view kAnySignature = "*";

// Exactly computable conditional table P(next | signature(input), last <= 2
// prefix tokens).
//
// The signature of an input is the signature of the first trigger word found
// in it, or "*" when none occurs. Lookup tries the longest prefix context
// first (order 2, 1, 0); at each order a row for the input's signature beats
// a "*" row. When nothing matches the distribution is uniform over content
// tokens.
class TabularModel final : public LanguageModel {
 public:
  explicit TabularModel(Vocab vocab, std::string identifier = "tabular");

  void add_trigger(const std::string &word, const std::string &signature);
  // Probabilities keyed by token id; must sum to 1 within 1e-6 and are then
  // renormalized. Context longer than 2 tokens is rejected.
  void set_row(const std::string &signature, const TokenSeq &context,
               const std::map<TokenId, double> &probs);

  std::string signature_of(const RenderedInput &input) const;

  static TabularModel from_json(const nlohmann::json &doc);
  static TabularModel load(const std::string &path);
  nlohmann::json to_json() const;

  Backend backend() const override { return Backend::kTabular; }
  std::string identifier() const override { return identifier_; }
  const Vocab &vocab() const override { return vocab_; }
  std::vector<double> next_token_logprobs(
      const RenderedInput &input,
      std::span<const TokenId> prefix) const override;
  std::unique_ptr<LanguageModel> clone() const override;
  void save(const std::string &path) const override;

 private:
  using RowKey = std::pair<std::string, TokenSeq>;

  const std::vector<double> &lookup(const std::string &signature,
                                    std::span<const TokenId> prefix) const;

  Vocab vocab_;
  std::string identifier_;
  std::map<std::string, std::string> triggers_;
  std::map<RowKey, std::vector<double>> rows_;
  std::vector<double> uniform_;
};

}  // namespace labelseq

#endif  // LABELSEQ_TABULAR_MODEL_H_
