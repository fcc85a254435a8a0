// include/labelseq/tiny_neural.h

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

#ifndef LABELSEQ_TINY_NEURAL_H_
#define LABELSEQ_TINY_NEURAL_H_

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "labelseq/model.h"

namespace labelseq {

struct TinyNeuralConfig {
  size_t width = 32;  // model width, at most 64
  size_t ffn = 64;    // feed-forward hidden size
  uint64_t seed = 0;  // parameter initialization
  double init_scale = 1.0;
};

// One-layer encoder and one-layer decoder, single attention head each, plus
// cross-attention; tanh feed-forward blocks with residual connections and
// sinusoidal positions. Trained with Adam on token cross-entropy.
//
// Input text is tokenized with split_words; unknown words map to <unk>. The
// decoder starts from <pad>. Pad, mask and unk never receive probability
// mass; EOS does.
class TinyNeuralModel final : public LanguageModel {
 public:
  TinyNeuralModel(Vocab vocab, const TinyNeuralConfig &config,
                  std::string identifier = "tiny-neural");

  static TinyNeuralModel load(const std::string &path);

  Backend backend() const override { return Backend::kTinyNeural; }
  std::string identifier() const override { return identifier_; }
  const Vocab &vocab() const override { return vocab_; }
  bool trainable() const override { return true; }

  std::vector<double> next_token_logprobs(
      const RenderedInput &input,
      std::span<const TokenId> prefix) const override;
  std::vector<std::vector<double>> next_token_logprobs_batch(
      const RenderedInput &input,
      std::span<const TokenSeq> prefixes) const override;
  // Teacher-forced single pass.
  double sequence_logprob(const RenderedInput &input,
                          std::span<const TokenId> target) const override;

  std::unique_ptr<LanguageModel> clone() const override;
  double train_step(std::span<const TrainingPair> batch,
                    double learning_rate) override;
  double loss(std::span<const TrainingPair> pairs) const override;
  void save(const std::string &path) const override;

  // Flattened parameters in a fixed order, for gradient checks.
  std::vector<double> parameters() const;
  void set_parameters(const std::vector<double> &flat);
  // Mean per-token cross-entropy (targets followed by EOS) and its gradient
  // with respect to parameters().
  double loss_and_gradient(std::span<const TrainingPair> pairs,
                           std::vector<double> *gradient) const;

  size_t width() const { return config_.width; }
  size_t steps_taken() const { return adam_step_; }

 private:
  struct Weights;
  std::vector<int> encode_input(const RenderedInput &input) const;

  Vocab vocab_;
  TinyNeuralConfig config_;
  std::string identifier_;
  std::shared_ptr<Weights> weights_;  // copy-on-write across clones
  std::shared_ptr<Weights> adam_m_, adam_v_;
  size_t adam_step_ = 0;
  std::vector<bool> excluded_;

  friend struct TinyNeuralAccess;
};

// Vocabulary from the words of `texts` (via split_words), plus specials.
Vocab build_word_vocab(const std::vector<std::string> &texts);

}  // namespace labelseq

#endif  // LABELSEQ_TINY_NEURAL_H_
