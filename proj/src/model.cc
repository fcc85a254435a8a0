// src/model.cc

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

#include "labelseq/model.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "labelseq/error.h"
#include "labelseq/rng.h"

namespace labelseq {

Backend parse_backend(std::string_view name) {
  if (name == "tabular") return Backend::kTabular;
  if (name == "tiny-neural") return Backend::kTinyNeural;
  if (name == "remote") return Backend::kRemote;
  throw UsageError("unknown backend '" + std::string(name) + "'");
}

std::string_view to_string(Backend backend) {
  switch (backend) {
    case Backend::kTabular: return "tabular";
    case Backend::kTinyNeural: return "tiny-neural";
    case Backend::kRemote: return "remote";
  }
  return "unknown";
}

void FineTuneConfig::validate() const {
  if (batch_size < 1) throw UsageError("batch_size must be at least 1");
  if (validate_every < 1) throw UsageError("validate_every must be at least 1");
  if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate))
    throw UsageError("learning_rate must be a non-negative number");
}

double logsumexp(std::span<const double> values) {
  double hi = -std::numeric_limits<double>::infinity();
  for (double v : values) hi = std::max(hi, v);
  if (!std::isfinite(hi)) return hi;
  double sum = 0.0;
  for (double v : values) sum += std::exp(v - hi);
  return hi + std::log(sum);
}

std::vector<std::vector<double>> LanguageModel::next_token_logprobs_batch(
    const RenderedInput &input, std::span<const TokenSeq> prefixes) const {
  std::vector<std::vector<double>> out;
  out.reserve(prefixes.size());
  for (const auto &p : prefixes) out.push_back(next_token_logprobs(input, p));
  return out;
}

void LanguageModel::check_target(std::span<const TokenId> target) const {
  if (target.empty()) throw DataError("label sequence must be non-empty");
  vocab().check_ids(target);
}

double LanguageModel::sequence_logprob(const RenderedInput &input,
                                       std::span<const TokenId> target) const {
  check_target(target);
  double total = 0.0;
  for (size_t j = 0; j < target.size(); ++j) {
    const auto lp = next_token_logprobs(input, target.first(j));
    total += lp[static_cast<size_t>(target[j])];
  }
  return total;
}

TokenSeq LanguageModel::encode(std::string_view text) const {
  return encode_label(vocab(), text);
}

std::string LanguageModel::decode(std::span<const TokenId> ids) const {
  return decode_label(vocab(), ids);
}

double LanguageModel::train_step(std::span<const TrainingPair>, double) {
  throw UsageError("backend '" + std::string(to_string(backend())) +
                   "' is not trainable");
}

double LanguageModel::loss(std::span<const TrainingPair> pairs) const {
  if (pairs.empty()) throw UsageError("loss over an empty set of pairs");
  const TokenId eos = vocab().specials().eos;
  double total = 0.0;
  size_t tokens = 0;
  for (const auto &p : pairs) {
    TokenSeq full = p.target;
    full.push_back(eos);
    total -= sequence_logprob(p.input, p.target);
    total -= next_token_logprobs(p.input, p.target)[static_cast<size_t>(eos)];
    tokens += full.size();
  }
  return total / static_cast<double>(tokens);
}

void LanguageModel::save(const std::string &) const {
  throw UsageError("backend '" + std::string(to_string(backend())) +
                   "' cannot be saved");
}

FineTuneResult fine_tune(const LanguageModel &model,
                         std::span<const TrainingPair> pairs,
                         const FineTuneConfig &config,
                         const DevEval &dev_eval) {
  config.validate();
  if (pairs.empty()) throw UsageError("fine-tuning needs at least one pair");

  FineTuneResult result;
  auto work = model.clone();
  if (config.steps == 0) {
    result.best_dev = dev_eval(*work);
    result.dev_curve.emplace_back(0, result.best_dev);
    result.model = std::move(work);
    return result;
  }
  if (!model.trainable())
    throw UsageError("backend '" + std::string(to_string(model.backend())) +
                     "' is not trainable");

  SplitMix64 rng(config.seed);
  std::vector<size_t> order(pairs.size());
  size_t cursor = order.size();
  std::vector<TrainingPair> batch;
  bool have_best = false;

  for (size_t step = 1; step <= config.steps; ++step) {
    batch.clear();
    while (batch.size() < config.batch_size) {
      if (cursor == order.size()) {
        for (size_t i = 0; i < order.size(); ++i) order[i] = i;
        shuffle(std::span<size_t>(order), rng);
        cursor = 0;
      }
      batch.push_back(pairs[order[cursor++]]);
    }
    result.train_loss.push_back(work->train_step(batch, config.learning_rate));

    if (step % config.validate_every == 0 || step == config.steps) {
      const double score = dev_eval(*work);
      result.dev_curve.emplace_back(step, score);
      if (!have_best || score > result.best_dev) {
        have_best = true;
        result.best_dev = score;
        result.best_step = step;
        result.model = work->clone();
      }
    }
  }
  return result;
}

}  // namespace labelseq
