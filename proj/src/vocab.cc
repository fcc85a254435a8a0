// src/vocab.cc

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

#include "labelseq/vocab.h"

#include <cctype>

#include "labelseq/error.h"
#include "labelseq/templating.h"

namespace labelseq {

Vocab::Vocab(std::vector<std::string> tokens, SpecialIds specials)
    : tokens_(std::move(tokens)), specials_(specials) {
  for (size_t i = 0; i < tokens_.size(); ++i) {
    if (!index_.emplace(tokens_[i], static_cast<TokenId>(i)).second)
      throw UsageError("duplicate vocabulary token '" + tokens_[i] + "'");
  }
  const auto n = static_cast<TokenId>(tokens_.size());
  for (TokenId id : {specials_.pad, specials_.eos, specials_.mask})
    if (id < 0 || id >= n) throw UsageError("special token id out of range");
  if (specials_.unk >= n) throw UsageError("unk token id out of range");
  for (TokenId id = 0; id < n; ++id)
    if (!is_special(id)) content_.push_back(id);
  if (content_.size() < 2)
    throw UsageError("vocabulary needs at least 2 non-special tokens");
}

Vocab Vocab::with_specials(const std::vector<std::string> &content) {
  std::vector<std::string> tokens{std::string(kPadToken), std::string(kEosToken),
                                  std::string(kMaskPlaceholder),
                                  std::string(kUnkToken)};
  std::unordered_map<std::string, bool> seen;
  for (const auto &t : tokens) seen[t] = true;
  for (const auto &t : content)
    if (seen.emplace(t, true).second) tokens.push_back(t);
  return Vocab(std::move(tokens), SpecialIds{});
}

const std::string &Vocab::token(TokenId id) const {
  if (id < 0 || static_cast<size_t>(id) >= tokens_.size())
    throw DataError("token id " + std::to_string(id) + " out of range");
  return tokens_[static_cast<size_t>(id)];
}

std::optional<TokenId> Vocab::find(std::string_view token) const {
  auto it = index_.find(std::string(token));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

bool Vocab::is_special(TokenId id) const {
  return id == specials_.pad || id == specials_.eos || id == specials_.mask ||
         (specials_.unk >= 0 && id == specials_.unk);
}

void Vocab::check_ids(std::span<const TokenId> ids) const {
  for (TokenId id : ids)
    if (id < 0 || static_cast<size_t>(id) >= tokens_.size())
      throw DataError("token id " + std::to_string(id) +
                      " out of range for vocabulary of size " +
                      std::to_string(tokens_.size()));
}

std::vector<std::string> split_words(std::string_view text) {
  std::vector<std::string> out;
  std::string word;
  auto flush = [&] {
    if (!word.empty()) out.push_back(std::move(word));
    word.clear();
  };
  size_t i = 0;
  while (i < text.size()) {
    const auto c = static_cast<unsigned char>(text[i]);
    if (text.compare(i, kMaskPlaceholder.size(), kMaskPlaceholder) == 0) {
      flush();
      out.emplace_back(kMaskPlaceholder);
      i += kMaskPlaceholder.size();
    } else if (std::isspace(c)) {
      flush();
      ++i;
    } else if (c < 0x80 && std::ispunct(c)) {
      flush();
      out.emplace_back(1, static_cast<char>(c));
      ++i;
    } else {
      word += c < 0x80 ? static_cast<char>(std::tolower(c)) : static_cast<char>(c);
      ++i;
    }
  }
  flush();
  return out;
}

std::string join_words(std::span<const std::string> words) {
  std::string out;
  for (const auto &w : words) {
    const bool closing = w.size() == 1 && std::string_view(".,?!;:)").find(w[0]) !=
                                              std::string_view::npos;
    if (!out.empty() && !closing) out += ' ';
    out += w;
  }
  return out;
}

TokenSeq encode_label(const Vocab &vocab, std::string_view text) {
  TokenSeq ids;
  for (const auto &w : split_words(text)) {
    auto id = vocab.find(w);
    if (!id || (vocab.specials().unk >= 0 && *id == vocab.specials().unk))
      throw DataError("label word '" + w + "' is not in the model vocabulary");
    if (vocab.is_special(*id))
      throw DataError("label text may not contain special token '" + w + "'");
    ids.push_back(*id);
  }
  if (ids.empty()) throw DataError("label sequence must be non-empty");
  return ids;
}

std::string decode_label(const Vocab &vocab, std::span<const TokenId> ids) {
  std::vector<std::string> words;
  for (TokenId id : ids) words.push_back(vocab.token(id));
  return join_words(words);
}

}  // namespace labelseq
