// include/labelseq/synthetic.h

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

#ifndef LABELSEQ_SYNTHETIC_H_
#define LABELSEQ_SYNTHETIC_H_

#include <cstdint>
#include <string>
#include <vector>

#include "labelseq/corpus.h"
#include "labelseq/rng.h"
#include "labelseq/tabular_model.h"
#include "labelseq/tiny_neural.h"

namespace labelseq {

// A two-class task whose label is carried by a single cue word per sentence.
// Each class owns its own cue words; filler words are shared. A few
// sentences carry no cue at all and get a random label.
//
// The generator table continues a sentence with short phrases. "thank you"
// is the most likely phrase under both classes, so raw beam search proposes
// it for both; "highly recommended" / "not for me" and friends are the
// class-specific ones.
struct SyntheticOptions {
  uint64_t seed = 2024;
  size_t cues_per_class = 200;
  size_t fillers = 60;
  size_t examples_per_class = 150;
  double no_cue_rate = 0.03;
  // Classifier pretraining on sentences drawn independently of the task data
  // with continuations sampled from the generator table.
  size_t pretrain_sentences = 6000;
  size_t pretrain_steps = 2500;
  size_t pretrain_batch = 32;
  double pretrain_learning_rate = 3e-3;
  // Kept narrow: at width 32 a thousand fine-tuning steps are enough to
  // teach arbitrary label tokens, and the prior stops mattering.
  TinyNeuralConfig classifier{8, 8, 0, 1.0};
};

inline const std::vector<std::string> kSyntheticLabels = {"negative", "positive"};

struct SyntheticWords {
  std::vector<std::string> positive_cues, negative_cues, fillers, phrase_words;
  std::vector<std::string> all() const;
};

SyntheticWords synthetic_words(const SyntheticOptions &options);

// Labeled sentences, classes interleaved.
std::vector<Example> synthetic_examples(const SyntheticWords &words, size_t per_class,
                                        double no_cue_rate, uint64_t seed);

TabularModel synthetic_generator(const SyntheticWords &words);

// Samples one continuation (label tokens, EOS dropped) from the generator.
TokenSeq sample_continuation(const LanguageModel &model, const RenderedInput &input,
                             SplitMix64 &rng, size_t max_len = 6);

// A tiny-neural model trained to imitate the generator on fresh sentences.
TinyNeuralModel synthetic_classifier(const SyntheticWords &words, const TabularModel &generator,
                                     const SyntheticOptions &options);

// Writes data.tsv, generator.json, classifier.json and config.json into
// `dir`. The config points at the other three files.
void write_synthetic_bundle(const std::string &dir, const SyntheticOptions &options);

}  // namespace labelseq

#endif  // LABELSEQ_SYNTHETIC_H_
