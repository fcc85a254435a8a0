// include/labelseq/vocab.h

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

#ifndef LABELSEQ_VOCAB_H_
#define LABELSEQ_VOCAB_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace labelseq {

using TokenId = int32_t;
using TokenSeq = std::vector<TokenId>;

inline constexpr std::string_view kPadToken = "<pad>";
inline constexpr std::string_view kEosToken = "</s>";
inline constexpr std::string_view kUnkToken = "<unk>";

struct SpecialIds {
  TokenId pad = 0;
  TokenId eos = 1;
  TokenId mask = 2;
  TokenId unk = 3;  // -1 when the vocabulary has no unknown token

  bool operator==(const SpecialIds &) const = default;
};

class Vocab {
 public:
  Vocab() = default;
  // Throws UsageError on duplicate tokens, bad special ids, or fewer than two
  // content (non-special) tokens.
  Vocab(std::vector<std::string> tokens, SpecialIds specials);

  // Standard layout: <pad>, </s>, [MASK], <unk>, then `content` in order with
  // duplicates dropped.
  static Vocab with_specials(const std::vector<std::string> &content);

  size_t size() const { return tokens_.size(); }
  const std::string &token(TokenId id) const;
  std::optional<TokenId> find(std::string_view token) const;
  const SpecialIds &specials() const { return specials_; }
  const std::vector<std::string> &tokens() const { return tokens_; }

  bool is_special(TokenId id) const;
  // Ids usable inside a label sequence (everything but the specials).
  const std::vector<TokenId> &content_ids() const { return content_; }

  // Throws DataError if any id is out of range.
  void check_ids(std::span<const TokenId> ids) const;

  bool operator==(const Vocab &other) const {
    return tokens_ == other.tokens_ && specials_ == other.specials_;
  }

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, TokenId> index_;
  SpecialIds specials_;
  std::vector<TokenId> content_;
};

// Word tokenizer used by the local backends: splits on whitespace, breaks
// ASCII punctuation into single-character tokens, lowercases ASCII letters,
// and keeps "[MASK]" intact.
std::vector<std::string> split_words(std::string_view text);

// Inverse of split_words up to whitespace: joins with single spaces and drops
// the space before closing punctuation.
std::string join_words(std::span<const std::string> words);

// Tokenizes label text against `vocab`; throws DataError on out-of-vocabulary
// words, special tokens, or empty text.
TokenSeq encode_label(const Vocab &vocab, std::string_view text);
std::string decode_label(const Vocab &vocab, std::span<const TokenId> ids);

}  // namespace labelseq

#endif  // LABELSEQ_VOCAB_H_
