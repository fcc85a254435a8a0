// src/beam_search.cc

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

#include "labelseq/beam_search.h"

#include <algorithm>
#include <cmath>

#include "labelseq/error.h"
#include "labelseq/parallel.h"

namespace labelseq {

void SearchConfig::validate() const {
  if (beam_width < 1) throw UsageError("beam_width must be at least 1");
  if (max_len < 1) throw UsageError("max_len must be at least 1");
  if (!std::isfinite(length_penalty))
    throw UsageError("length_penalty must be finite");
}

namespace {

struct Hypothesis {
  TokenSeq seq;
  double score = 0.0;
};

struct Expansion {
  size_t parent = 0;
  TokenId token = -1;  // -1: EOS, completes the parent
  double score = 0.0;  // gen_score of the resulting sequence
  double rank = 0.0;   // ordering key inside the step
  TokenSeq seq;
};

double completed_rank(double gen_score, size_t len, double penalty) {
  if (penalty == 0.0) return gen_score;
  return gen_score / std::pow(static_cast<double>(len), penalty);
}

bool better(double a_rank, const TokenSeq &a_seq, double b_rank,
            const TokenSeq &b_seq) {
  if (a_rank != b_rank) return a_rank > b_rank;
  return a_seq < b_seq;
}

void merge_completed(std::vector<Candidate> &pool,
                     std::vector<Candidate> &fresh, size_t cap,
                     double penalty) {
  if (fresh.empty()) return;
  for (auto &c : fresh) pool.push_back(std::move(c));
  fresh.clear();
  std::sort(pool.begin(), pool.end(), [&](const Candidate &a, const Candidate &b) {
    return better(completed_rank(a.gen_score, a.seq.size(), penalty), a.seq,
                  completed_rank(b.gen_score, b.seq.size(), penalty), b.seq);
  });
  if (pool.size() > cap) pool.resize(cap);
}

}  // namespace

std::vector<Candidate> generate_candidates(
    const LanguageModel &model, const Template &tmpl,
    const std::vector<Example> &class_examples, const SearchConfig &config) {
  config.validate();
  if (class_examples.empty())
    throw DataError("candidate generation needs at least one example");
  for (const auto &ex : class_examples)
    if (ex.label != class_examples.front().label)
      throw DataError("candidate generation examples must share one class");

  std::vector<RenderedInput> inputs;
  for (const auto &ex : class_examples) inputs.push_back(render(tmpl, ex));

  const Vocab &vocab = model.vocab();
  const size_t vsize = vocab.size();
  const auto eos = static_cast<size_t>(vocab.specials().eos);

  std::vector<Hypothesis> live{Hypothesis{}};
  std::vector<Candidate> pool;

  for (size_t step = 1; step <= config.max_len && !live.empty(); ++step) {
    std::vector<TokenSeq> prefixes;
    prefixes.reserve(live.size());
    for (const auto &h : live) prefixes.push_back(h.seq);

    // agg[h][t] = sum over examples of log P(t | h, x)
    std::vector<std::vector<double>> agg(live.size(),
                                         std::vector<double>(vsize, 0.0));
    for (const auto &input : inputs) {
      const auto rows = model.next_token_logprobs_batch(input, prefixes);
      if (rows.size() != live.size())
        throw BackendError("model returned the wrong number of distributions");
      for (size_t h = 0; h < live.size(); ++h) {
        if (rows[h].size() != vsize)
          throw BackendError("model returned a distribution of the wrong size");
        for (size_t t = 0; t < vsize; ++t) agg[h][t] += rows[h][t];
      }
    }

    const bool last = step == config.max_len;
    std::vector<Expansion> expansions;
    for (size_t h = 0; h < live.size(); ++h) {
      for (TokenId t : vocab.content_ids()) {
        const double lp = agg[h][static_cast<size_t>(t)];
        if (!std::isfinite(lp)) continue;
        Expansion e{h, t, live[h].score + lp, 0.0, live[h].seq};
        e.seq.push_back(t);
        e.rank = last ? completed_rank(e.score, e.seq.size(), config.length_penalty)
                      : e.score;
        expansions.push_back(std::move(e));
      }
      if (!live[h].seq.empty() && std::isfinite(agg[h][eos])) {
        Expansion e{h, -1, live[h].score, live[h].score + agg[h][eos],
                    live[h].seq};
        expansions.push_back(std::move(e));
      }
    }
    std::sort(expansions.begin(), expansions.end(),
              [](const Expansion &a, const Expansion &b) {
                if (a.rank != b.rank) return a.rank > b.rank;
                if (a.seq != b.seq) return a.seq < b.seq;
                return a.token > b.token;  // a live extension before an EOS
              });

    std::vector<Hypothesis> next;
    std::vector<Candidate> fresh;
    for (size_t i = 0; i < expansions.size(); ++i) {
      auto &e = expansions[i];
      const bool completes = e.token < 0 || last;
      if (completes) {
        if (i < config.beam_width)
          fresh.push_back(Candidate{std::move(e.seq), {}, e.score, std::nullopt});
      } else if (next.size() < config.beam_width) {
        next.push_back(Hypothesis{std::move(e.seq), e.score});
      }
      if (next.size() >= config.beam_width && i + 1 >= config.beam_width) break;
    }
    live = std::move(next);
    merge_completed(pool, fresh, config.beam_width, config.length_penalty);

    // Scores only decrease along a hypothesis, so once the pool is full and
    // no live hypothesis can beat its worst entry the search is done.
    if (config.length_penalty == 0.0 && pool.size() == config.beam_width &&
        !live.empty()) {
      double best_live = live.front().score;
      for (const auto &h : live) best_live = std::max(best_live, h.score);
      if (best_live < pool.back().gen_score) break;
    }
  }

  for (auto &c : pool) c.text = model.decode(c.seq);
  return pool;
}

std::vector<ClassCandidates> generate_all(const LanguageModel &model,
                                          const Template &tmpl,
                                          const FewShotSplit &split,
                                          const SearchConfig &config,
                                          size_t workers) {
  std::vector<ClassCandidates> out(split.labels.size());
  parallel_for(split.labels.size(), workers, [&](size_t c) {
    out[c].label = split.labels[c];
    out[c].candidates =
        generate_candidates(model, tmpl, split.train_of(split.labels[c]), config);
  });
  return out;
}

}  // namespace labelseq
