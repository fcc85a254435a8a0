// src/tabular_model.cc

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

#include "labelseq/tabular_model.h"

#include <cmath>
#include <fstream>
#include <limits>

#include "labelseq/error.h"

namespace labelseq {

namespace {

constexpr std::string_view kTabularFormat = "labelseq-tabular/1";
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

}  // namespace

TabularModel::TabularModel(Vocab vocab, std::string identifier)
    : vocab_(std::move(vocab)), identifier_(std::move(identifier)) {
  uniform_.assign(vocab_.size(), kNegInf);
  const double lp = -std::log(static_cast<double>(vocab_.content_ids().size()));
  for (TokenId id : vocab_.content_ids()) uniform_[static_cast<size_t>(id)] = lp;
}

void TabularModel::add_trigger(const std::string &word,
                               const std::string &signature) {
  auto words = split_words(word);
  if (words.size() != 1)
    throw UsageError("trigger '" + word + "' must be a single word");
  triggers_[words.front()] = signature;
}

void TabularModel::set_row(const std::string &signature,
                           const TokenSeq &context,
                           const std::map<TokenId, double> &probs) {
  if (context.size() > 2)
    throw UsageError("tabular contexts hold at most 2 tokens");
  vocab_.check_ids(context);
  double sum = 0.0;
  for (const auto &[id, p] : probs) {
    vocab_.check_ids(std::span<const TokenId>(&id, 1));
    if (!(p >= 0.0)) throw UsageError("negative probability in tabular row");
    if (p > 0.0 && (id == vocab_.specials().pad || id == vocab_.specials().mask ||
                    id == vocab_.specials().unk))
      throw UsageError("tabular rows may not give mass to pad/mask/unk");
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-6)
    throw UsageError("tabular row probabilities sum to " + std::to_string(sum));
  // Sums within rounding of 1 are taken as given so that equal
  // probabilities give bit-identical log-probs across rows.
  const double norm = std::abs(sum - 1.0) <= 1e-12 ? 1.0 : sum;
  std::vector<double> row(vocab_.size(), kNegInf);
  for (const auto &[id, p] : probs)
    if (p > 0.0) row[static_cast<size_t>(id)] = std::log(p / norm);
  rows_[{signature, context}] = std::move(row);
}

std::string TabularModel::signature_of(const RenderedInput &input) const {
  for (const auto &w : split_words(input.text)) {
    auto it = triggers_.find(w);
    if (it != triggers_.end()) return it->second;
  }
  return std::string(kAnySignature);
}

const std::vector<double> &TabularModel::lookup(
    const std::string &signature, std::span<const TokenId> prefix) const {
  const size_t max_order = std::min<size_t>(2, prefix.size());
  for (size_t order = max_order + 1; order-- > 0;) {
    TokenSeq ctx(prefix.end() - static_cast<std::ptrdiff_t>(order), prefix.end());
    auto it = rows_.find({signature, ctx});
    if (it != rows_.end()) return it->second;
    it = rows_.find({std::string(kAnySignature), ctx});
    if (it != rows_.end()) return it->second;
  }
  return uniform_;
}

std::vector<double> TabularModel::next_token_logprobs(
    const RenderedInput &input, std::span<const TokenId> prefix) const {
  vocab_.check_ids(prefix);
  return lookup(signature_of(input), prefix);
}

std::unique_ptr<LanguageModel> TabularModel::clone() const {
  return std::make_unique<TabularModel>(*this);
}

TabularModel TabularModel::from_json(const nlohmann::json &doc) {
  try {
    if (doc.value("format", std::string()) != kTabularFormat)
      throw DataError("not a tabular model file (expected format '" +
                      std::string(kTabularFormat) + "')");
    SpecialIds sp;
    const auto &s = doc.at("specials");
    sp.pad = s.at("pad").get<TokenId>();
    sp.eos = s.at("eos").get<TokenId>();
    sp.mask = s.at("mask").get<TokenId>();
    sp.unk = s.value("unk", -1);
    TabularModel model(Vocab(doc.at("tokens").get<std::vector<std::string>>(), sp),
                       doc.value("identifier", std::string("tabular")));
    const nlohmann::json triggers = doc.value("triggers", nlohmann::json::object());
    for (const auto &[word, sig] : triggers.items())
      model.add_trigger(word, sig.get<std::string>());
    auto id_of = [&](const std::string &tok) {
      auto id = model.vocab_.find(tok);
      if (!id) throw DataError("unknown token '" + tok + "' in tabular row");
      return *id;
    };
    const nlohmann::json rows = doc.value("rows", nlohmann::json::array());
    for (const auto &row : rows) {
      TokenSeq ctx;
      for (const auto &t : row.at("context")) ctx.push_back(id_of(t.get<std::string>()));
      std::map<TokenId, double> probs;
      for (const auto &[tok, p] : row.at("probs").items())
        probs[id_of(tok)] = p.get<double>();
      model.set_row(row.at("signature").get<std::string>(), ctx, probs);
    }
    return model;
  } catch (const nlohmann::json::exception &e) {
    throw DataError(std::string("malformed tabular model: ") + e.what());
  }
}

TabularModel TabularModel::load(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open tabular model '" + path + "'");
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception &e) {
    throw DataError(path + ": " + e.what());
  }
  return from_json(doc);
}

nlohmann::json TabularModel::to_json() const {
  nlohmann::json doc;
  doc["format"] = kTabularFormat;
  doc["identifier"] = identifier_;
  doc["tokens"] = vocab_.tokens();
  doc["specials"] = {{"pad", vocab_.specials().pad},
                     {"eos", vocab_.specials().eos},
                     {"mask", vocab_.specials().mask},
                     {"unk", vocab_.specials().unk}};
  doc["triggers"] = triggers_;
  auto rows = nlohmann::json::array();
  for (const auto &[key, lp] : rows_) {
    nlohmann::json probs = nlohmann::json::object();
    for (size_t i = 0; i < lp.size(); ++i)
      if (std::isfinite(lp[i])) probs[vocab_.token(static_cast<TokenId>(i))] = std::exp(lp[i]);
    nlohmann::json ctx = nlohmann::json::array();
    for (TokenId id : key.second) ctx.push_back(vocab_.token(id));
    rows.push_back({{"signature", key.first}, {"context", ctx}, {"probs", probs}});
  }
  doc["rows"] = rows;
  return doc;
}

void TabularModel::save(const std::string &path) const {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write '" + path + "'");
  out << to_json().dump(2) << '\n';
}

}  // namespace labelseq
