// tests/support.h

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

// Shared fixtures and brute-force oracles for the test suites. Oracles here
// go through LanguageModel::next_token_logprobs only, never through the code
// paths they check.
#ifndef LABELSEQ_TESTS_SUPPORT_H_
#define LABELSEQ_TESTS_SUPPORT_H_

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "labelseq/beam_search.h"
#include "labelseq/corpus.h"
#include "labelseq/rng.h"
#include "labelseq/tabular_model.h"

namespace labelseq::testing {

inline std::vector<std::string> token_names(size_t n, const std::string &stem = "t") {
  std::vector<std::string> out;
  for (size_t i = 0; i < n; ++i) out.push_back(stem + std::to_string(i));
  return out;
}

inline TabularModel uniform_model(size_t content_tokens) {
  return TabularModel(Vocab::with_specials(token_names(content_tokens)));
}

inline Example ex(std::string text, std::string label) {
  return Example{{std::move(text)}, std::move(label)};
}

// Random distribution over `ids` (plus EOS with probability eos_mass when
// positive).
inline std::map<TokenId, double> random_row(SplitMix64 &rng,
                                            const std::vector<TokenId> &ids,
                                            TokenId eos, double eos_mass) {
  std::map<TokenId, double> row;
  double total = 0.0;
  for (TokenId id : ids) {
    const double w = 0.05 + rng.uniform();
    row[id] = w;
    total += w;
  }
  const double scale = (1.0 - std::max(0.0, eos_mass)) / total;
  for (auto &[id, p] : row) p *= scale;
  if (eos_mass > 0.0) row[eos] = eos_mass;
  return row;
}

// Random table over `v` content tokens with two trigger-word signatures and
// rows for every context of length <= depth under each signature.
inline TabularModel random_tabular(uint64_t seed, size_t v, size_t depth,
                                   double eos_mass = 0.0) {
  SplitMix64 rng(seed);
  auto names = token_names(v);
  names.push_back("cue0");
  names.push_back("cue1");
  TabularModel model(Vocab::with_specials(names), "random");
  const Vocab &vocab = model.vocab();
  std::vector<TokenId> content;
  for (size_t i = 0; i < v; ++i) content.push_back(*vocab.find(names[i]));
  model.add_trigger("cue0", "s0");
  model.add_trigger("cue1", "s1");
  std::vector<TokenSeq> contexts{{}};
  for (size_t d = 0; d < depth; ++d) {
    std::vector<TokenSeq> next;
    for (const auto &c : contexts)
      if (c.size() == d)
        for (TokenId t : content) {
          TokenSeq e = c;
          e.push_back(t);
          if (e.size() > 2) e.erase(e.begin());
          next.push_back(e);
        }
    for (auto &e : next)
      if (std::find(contexts.begin(), contexts.end(), e) == contexts.end())
        contexts.push_back(e);
  }
  for (const std::string sig : {"s0", "s1", "*"})
    for (const auto &c : contexts)
      model.set_row(sig, c, random_row(rng, content, vocab.specials().eos,
                                       c.empty() ? 0.0 : eos_mass));
  return model;
}

inline std::vector<Example> cue_examples(size_t n, const std::string &cue,
                                         const std::string &label) {
  std::vector<Example> out;
  for (size_t i = 0; i < n; ++i)
    out.push_back(ex("item " + std::to_string(i) + " " + cue, label));
  return out;
}

// Every label sequence of length 1..max_len that the search could emit: a
// sequence shorter than max_len qualifies only when EOS may follow it
// under every example. The
// score is recomputed per example as a chain of next-token lookups.
inline std::vector<Candidate> enumerate_candidates(
    const LanguageModel &model, const Template &tmpl,
    const std::vector<Example> &examples, size_t max_len) {
  std::vector<RenderedInput> inputs;
  for (const auto &e : examples) inputs.push_back(render(tmpl, e));
  const Vocab &vocab = model.vocab();
  const auto eos = static_cast<size_t>(vocab.specials().eos);
  std::vector<Candidate> out;
  std::vector<TokenSeq> frontier{{}};
  for (size_t len = 1; len <= max_len; ++len) {
    std::vector<TokenSeq> next;
    for (const auto &p : frontier)
      for (TokenId t : vocab.content_ids()) {
        TokenSeq s = p;
        s.push_back(t);
        next.push_back(s);
      }
    for (const auto &s : next) {
      double total = 0.0;
      bool eos_everywhere = true;
      bool reachable = true;
      for (const auto &in : inputs) {
        for (size_t j = 0; j < s.size(); ++j) {
          const auto lp = model.next_token_logprobs(
              in, std::span<const TokenId>(s.data(), j));
          total += lp[static_cast<size_t>(s[j])];
        }
        if (len < max_len && !std::isfinite(model.next_token_logprobs(in, s)[eos]))
          eos_everywhere = false;
      }
      if (!std::isfinite(total)) reachable = false;
      if (reachable && (len == max_len || eos_everywhere)) out.push_back(Candidate{s, "", total, std::nullopt});
    }
    frontier = std::move(next);
  }
  std::sort(out.begin(), out.end(), [](const Candidate &a, const Candidate &b) {
    if (a.gen_score != b.gen_score) return a.gen_score > b.gen_score;
    return a.seq < b.seq;
  });
  return out;
}

}  // namespace labelseq::testing

#endif  // LABELSEQ_TESTS_SUPPORT_H_
