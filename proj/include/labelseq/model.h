// include/labelseq/model.h

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

#ifndef LABELSEQ_MODEL_H_
#define LABELSEQ_MODEL_H_

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "labelseq/templating.h"
#include "labelseq/vocab.h"

namespace labelseq {

enum class Backend { kTabular, kTinyNeural, kRemote };

Backend parse_backend(std::string_view name);
std::string_view to_string(Backend backend);

struct TrainingPair {
  RenderedInput input;
  TokenSeq target;  // label tokens, without EOS
};

struct FineTuneConfig {
  size_t steps = 1000;
  size_t batch_size = 8;
  double learning_rate = 6e-5;
  size_t validate_every = 100;
  uint64_t seed = 0;

  void validate() const;  // throws UsageError
};

// A conditional sequence model: next-token distributions given a rendered
// input and a label-sequence prefix. All values are natural logs.
//
// Scoring is const and safe to call concurrently. Training mutates the
// instance, so callers clone first.
class LanguageModel {
 public:
  virtual ~LanguageModel() = default;

  virtual Backend backend() const = 0;
  virtual std::string identifier() const = 0;
  virtual const Vocab &vocab() const = 0;
  virtual bool trainable() const { return false; }

  // Log-probabilities over the whole vocabulary for the token following
  // `prefix`. Excluded tokens carry -infinity.
  virtual std::vector<double> next_token_logprobs(
      const RenderedInput &input, std::span<const TokenId> prefix) const = 0;

  // One distribution per prefix, all conditioned on `input`.
  virtual std::vector<std::vector<double>> next_token_logprobs_batch(
      const RenderedInput &input,
      std::span<const TokenSeq> prefixes) const;

  // Sum over j of log P(target[j] | target[0..j), input). The default walks
  // next_token_logprobs; backends may override with a single pass.
  virtual double sequence_logprob(const RenderedInput &input,
                                  std::span<const TokenId> target) const;

  // Label text <-> ids in this model's vocabulary.
  virtual TokenSeq encode(std::string_view text) const;
  virtual std::string decode(std::span<const TokenId> ids) const;

  virtual std::unique_ptr<LanguageModel> clone() const = 0;

  // One optimizer step of cross-entropy on the batch; returns the mean
  // per-token loss before the update.
  virtual double train_step(std::span<const TrainingPair> batch,
                            double learning_rate);

  // Mean per-token cross-entropy over `pairs` without updating anything.
  virtual double loss(std::span<const TrainingPair> pairs) const;

  // Writes a checkpoint that open_model() can load.
  virtual void save(const std::string &path) const;

 protected:
  void check_target(std::span<const TokenId> target) const;
};

using DevEval = std::function<double(const LanguageModel &)>;

struct FineTuneResult {
  std::unique_ptr<LanguageModel> model;  // best checkpoint
  double best_dev = 0.0;
  size_t best_step = 0;
  std::vector<std::pair<size_t, double>> dev_curve;  // (step, dev score)
  std::vector<double> train_loss;                    // per step
};

// Trains a clone of `model`; `model` itself is never touched. Dev evaluation
// runs every `validate_every` steps and after the last step; the earliest
// best-scoring checkpoint wins. With steps == 0 the result is a plain clone
// scored once, which also works for backends that cannot train.
FineTuneResult fine_tune(const LanguageModel &model,
                         std::span<const TrainingPair> pairs,
                         const FineTuneConfig &config, const DevEval &dev_eval);

double logsumexp(std::span<const double> values);

// Loads a model from disk or connects to one.
//   tabular:     path to a tabular JSON table
//   tiny-neural: path to a checkpoint
//   remote:      endpoint, "exec:<command>" or "tcp:<host>:<port>"
std::unique_ptr<LanguageModel> open_model(Backend backend,
                                          const std::string &location);

}  // namespace labelseq

#endif  // LABELSEQ_MODEL_H_
