// src/synthetic.cc

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

#include "labelseq/synthetic.h"

#include <cmath>
#include <filesystem>
#include <set>

#include "labelseq/error.h"
#include "labelseq/persistence.h"
#include "labelseq/rng.h"

namespace labelseq {

namespace {

constexpr const char *kPhraseWords[] = {"thank", "you",  "highly", "recommended", "not",
                                        "for",   "me",   "a",      "must",        "see",
                                        "waste", "of",   "time",   "truly",       "great",
                                        "so",    "bad",  "the",    "end"};

std::string pseudo_word(SplitMix64 &rng) {
  static const char *onsets[] = {"b", "d", "f", "g", "k", "l", "m", "n", "p", "r", "s", "t", "v", "z"};
  static const char *vowels[] = {"a", "e", "i", "o", "u"};
  std::string w;
  const size_t syllables = 2 + rng.below(2);
  for (size_t i = 0; i < syllables; ++i) {
    w += onsets[rng.below(std::size(onsets))];
    w += vowels[rng.below(std::size(vowels))];
  }
  return w;
}

std::vector<std::string> distinct_words(SplitMix64 &rng, size_t n, std::set<std::string> &taken) {
  std::vector<std::string> out;
  while (out.size() < n) {
    auto w = pseudo_word(rng);
    if (taken.insert(w).second) out.push_back(std::move(w));
  }
  return out;
}

std::string sentence(const SyntheticWords &words, const std::string *cue, SplitMix64 &rng) {
  const size_t len = 4 + rng.below(4);
  const size_t cue_at = rng.below(len);
  std::string out;
  for (size_t i = 0; i < len; ++i) {
    if (!out.empty()) out += ' ';
    out += (cue && i == cue_at) ? *cue : words.fillers[rng.below(words.fillers.size())];
  }
  return out + ".";
}

}  // namespace

std::vector<std::string> SyntheticWords::all() const {
  std::vector<std::string> out;
  for (const auto *list : {&phrase_words, &positive_cues, &negative_cues, &fillers})
    out.insert(out.end(), list->begin(), list->end());
  out.push_back(".");
  return out;
}

SyntheticWords synthetic_words(const SyntheticOptions &options) {
  SplitMix64 rng = SplitMix64::derive(options.seed, 0);
  SyntheticWords w;
  w.phrase_words.assign(std::begin(kPhraseWords), std::end(kPhraseWords));
  std::set<std::string> taken(w.phrase_words.begin(), w.phrase_words.end());
  w.positive_cues = distinct_words(rng, options.cues_per_class, taken);
  w.negative_cues = distinct_words(rng, options.cues_per_class, taken);
  w.fillers = distinct_words(rng, options.fillers, taken);
  return w;
}

std::vector<Example> synthetic_examples(const SyntheticWords &words, size_t per_class,
                                        double no_cue_rate, uint64_t seed) {
  SplitMix64 rng(seed);
  std::vector<Example> out;
  for (size_t i = 0; i < per_class; ++i)
    for (size_t c = 0; c < 2; ++c) {
      const auto &cues = c == 1 ? words.positive_cues : words.negative_cues;
      const std::string cue = cues[rng.below(cues.size())];
      const bool blank = rng.uniform() < no_cue_rate;
      out.push_back({{sentence(words, blank ? nullptr : &cue, rng)}, kSyntheticLabels[c]});
    }
  return out;
}

TabularModel synthetic_generator(const SyntheticWords &words) {
  TabularModel m(Vocab::with_specials(words.all()), "synthetic-generator");
  for (const auto &w : words.positive_cues) m.add_trigger(w, "pos");
  for (const auto &w : words.negative_cues) m.add_trigger(w, "neg");
  const Vocab &v = m.vocab();
  auto id = [&](const char *w) { return *v.find(w); };
  const TokenId eos = v.specials().eos;

  m.set_row("pos", {}, {{id("thank"), 0.40}, {id("highly"), 0.25}, {id("a"), 0.10},
                        {id("truly"), 0.08}, {id("the"), 0.10}, {id("so"), 0.02},
                        {id("not"), 0.02}, {id("waste"), 0.03}});
  m.set_row("neg", {}, {{id("thank"), 0.40}, {id("not"), 0.25}, {id("waste"), 0.10},
                        {id("so"), 0.08}, {id("the"), 0.10}, {id("highly"), 0.02},
                        {id("a"), 0.02}, {id("truly"), 0.03}});
  m.set_row("*", {}, {{id("thank"), 0.40}, {id("the"), 0.20}, {id("highly"), 0.10},
                      {id("not"), 0.10}, {id("a"), 0.05}, {id("waste"), 0.05},
                      {id("truly"), 0.05}, {id("so"), 0.05}});
  const std::vector<std::vector<const char *>> phrases = {
      {"thank", "you"}, {"highly", "recommended"}, {"a", "must", "see"}, {"truly", "great"},
      {"the", "end"},   {"not", "for", "me"},      {"waste", "of", "time"}, {"so", "bad"}};
  for (const auto &p : phrases) {
    for (size_t j = 1; j <= p.size(); ++j) {
      TokenSeq ctx;
      for (size_t i = (j >= 2 ? j - 2 : 0); i < j; ++i) ctx.push_back(id(p[i]));
      if (j < p.size()) m.set_row("*", ctx, {{id(p[j]), 1.0}});
      else m.set_row("*", ctx, {{eos, 1.0}});
    }
  }
  // "not" also opens "not bad".
  m.set_row("*", {id("not")}, {{id("for"), 0.9}, {id("bad"), 0.1}});
  m.set_row("*", {id("not"), id("bad")}, {{eos, 1.0}});
  return m;
}

TokenSeq sample_continuation(const LanguageModel &model, const RenderedInput &input,
                             SplitMix64 &rng, size_t max_len) {
  TokenSeq out;
  const TokenId eos = model.vocab().specials().eos;
  while (out.size() < max_len) {
    const auto lp = model.next_token_logprobs(input, out);
    double u = rng.uniform();
    TokenId pick = eos;
    for (size_t i = 0; i < lp.size(); ++i) {
      if (!std::isfinite(lp[i])) continue;
      u -= std::exp(lp[i]);
      pick = static_cast<TokenId>(i);
      if (u < 0) break;
    }
    if (pick == eos) break;
    out.push_back(pick);
  }
  return out;
}

TinyNeuralModel synthetic_classifier(const SyntheticWords &words, const TabularModel &generator,
                                     const SyntheticOptions &options) {
  TinyNeuralConfig cfg = options.classifier;
  cfg.seed = SplitMix64::derive(options.seed, 3).next();
  TinyNeuralModel model(generator.vocab(), cfg, "synthetic-classifier");
  const auto tmpl = builtin_template(TaskKind::kSingleSentence);
  SplitMix64 rng = SplitMix64::derive(options.seed, 4);
  const auto sentences = synthetic_examples(words, options.pretrain_sentences / 2,
                                            options.no_cue_rate, SplitMix64::derive(options.seed, 5).next());
  std::vector<TrainingPair> corpus;
  for (const auto &e : sentences) {
    const auto input = render(tmpl, e);
    auto target = sample_continuation(generator, input, rng);
    if (!target.empty()) corpus.push_back({input, std::move(target)});
  }
  std::vector<size_t> order(corpus.size());
  size_t cursor = order.size();
  std::vector<TrainingPair> batch;
  for (size_t step = 0; step < options.pretrain_steps; ++step) {
    batch.clear();
    while (batch.size() < options.pretrain_batch) {
      if (cursor == order.size()) {
        for (size_t i = 0; i < order.size(); ++i) order[i] = i;
        shuffle(std::span<size_t>(order), rng);
        cursor = 0;
      }
      batch.push_back(corpus[order[cursor++]]);
    }
    model.train_step(batch, options.pretrain_learning_rate);
  }
  return model;
}

void write_synthetic_bundle(const std::string &dir, const SyntheticOptions &options) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  const auto words = synthetic_words(options);
  const auto examples = synthetic_examples(words, options.examples_per_class, options.no_cue_rate,
                                           SplitMix64::derive(options.seed, 1).next());
  std::string tsv;
  for (const auto &e : examples) tsv += e.fields[0] + "\t" + *e.label + "\n";
  write_text_file((fs::path(dir) / "data.tsv").string(), tsv);
  const auto generator = synthetic_generator(words);
  generator.save((fs::path(dir) / "generator.json").string());
  synthetic_classifier(words, generator, options).save((fs::path(dir) / "classifier.json").string());
  const nlohmann::json config = {
      {"task", {{"kind", "single-sentence"}, {"labels", kSyntheticLabels}, {"metric", "accuracy"}}},
      {"data", "data.tsv"},
      {"format", "tsv"},
      {"k", 16},
      {"seed", 13},
      {"search", {{"beam_width", 50}, {"max_len", 20}}},
      {"n", 20},
      {"finetune", {{"steps", 1000}, {"batch_size", 8}, {"learning_rate", 6e-5}, {"validate_every", 100}}},
      {"generator", {{"backend", "tabular"}, {"path", "generator.json"}}},
      {"classifier", {{"backend", "tiny-neural"}, {"path", "classifier.json"}}},
      {"workers", 4}};
  write_text_file((fs::path(dir) / "config.json").string(), config.dump(2) + "\n");
}

}  // namespace labelseq
