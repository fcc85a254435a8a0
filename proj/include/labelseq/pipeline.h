// include/labelseq/pipeline.h

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

#ifndef LABELSEQ_PIPELINE_H_
#define LABELSEQ_PIPELINE_H_

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "labelseq/beam_search.h"
#include "labelseq/corpus.h"
#include "labelseq/model.h"
#include "labelseq/rerank.h"
#include "labelseq/tiny_neural.h"

namespace labelseq {

struct ModelSpec {
  Backend backend = Backend::kTabular;
  // Checkpoint path, remote endpoint, or "scratch" for a freshly initialized
  // tiny-neural model (vocabulary: dataset words plus the generator's
  // content tokens).
  std::string location;
  TinyNeuralConfig scratch;  // width/ffn for "scratch"; seed comes from the run
};

// Optional sweep used to train the winning mapping once more; the default
// keeps the single fine-tune configuration.
struct FineTuneGrid {
  std::vector<size_t> batch_sizes;
  std::vector<double> learning_rates;
};

// Everything a run depends on. Serialized verbatim into the report.
struct PipelineConfig {
  TaskSpec task;  // empty labels: order of first appearance in the data
  std::string data;
  DataFormat format = DataFormat::kTsv;
  std::string template_pattern;  // empty: the task kind's built-in template
  uint64_t seed = 13;
  size_t k = 16;
  SearchConfig search;
  bool autoword = false;  // forces max_len = 1
  size_t n = 20;
  FineTuneConfig finetune;  // its seed is replaced by the derived shuffle seed
  std::optional<FineTuneGrid> grid;
  ModelSpec generator;
  ModelSpec classifier;
  size_t workers = 1;
  std::string baseline_mapping;  // non-empty: skip generation and re-ranking

  // Relative paths are resolved against `base_dir`. Unknown keys are usage
  // errors.
  static PipelineConfig from_json(const nlohmann::json &doc,
                                  const std::string &base_dir = "");
  static PipelineConfig load(const std::string &path);
  nlohmann::json to_json() const;
  void validate() const;  // throws UsageError

  SearchConfig effective_search() const;
};

// One master seed fans out to fixed offsets.
struct Seeds {
  uint64_t split = 0;    // few-shot sampling
  uint64_t init = 0;     // scratch model initialization
  uint64_t shuffle = 0;  // fine-tuning batch order

  static Seeds from_master(uint64_t seed) { return {seed, seed + 1, seed + 2}; }
  bool operator==(const Seeds &) const = default;
};

// Task, data and split for a config (stages "load" and "split").
struct PreparedTask {
  TaskSpec task;
  Template tmpl = builtin_template(TaskKind::kSingleSentence);
  std::vector<Example> data;
  FewShotSplit split;
  Seeds seeds;
};
PreparedTask prepare_task(const PipelineConfig &config);

std::unique_ptr<LanguageModel> open_generator(const PipelineConfig &config);
// `generator` supplies extra vocabulary for a scratch classifier; may be null.
std::unique_ptr<LanguageModel> open_classifier(const PipelineConfig &config,
                                               const PreparedTask &prepared,
                                               const LanguageModel *generator);

// Task metric of the mapping's predictions on `examples` (all labeled).
double evaluate_mapping(const LanguageModel &model, const Template &tmpl,
                        const LabelMapping &mapping,
                        const std::vector<Example> &examples,
                        const TaskSpec &task);

struct FinetuneRerankResult {
  std::vector<ScoredMapping> mappings;  // input order, dev_metric filled
  std::vector<size_t> best_steps;
  size_t winner = 0;
  std::unique_ptr<LanguageModel> winner_model;
};

// Fine-tunes a clone of `base` per mapping on (template(x), mapping(label))
// pairs from split.train and scores each best checkpoint on split.dev. The
// winner has the highest dev metric, then the highest combo_score, then the
// earliest position. Mappings must already be tokenized for `base`.
FinetuneRerankResult finetune_rerank(const LanguageModel &base,
                                     const Template &tmpl,
                                     const FewShotSplit &split,
                                     const std::vector<ScoredMapping> &mappings,
                                     const FineTuneConfig &config,
                                     const TaskSpec &task, size_t workers = 1);

struct GridResult {
  size_t batch_size = 0;
  double learning_rate = 0.0;
  double dev_metric = 0.0;
  size_t best_step = 0;
  bool operator==(const GridResult &) const = default;
};

struct SearchReport {
  nlohmann::json config;
  Seeds seeds;
  std::string template_pattern;  // the template actually used
  bool baseline = false;
  std::vector<ClassCandidates> generated;  // before re-ranking
  std::vector<ClassCandidates> reranked;
  std::vector<ScoredMapping> mappings;     // top-n with dev metrics
  std::vector<size_t> best_steps;
  size_t winner = 0;
  std::vector<GridResult> grid;  // empty unless a grid was configured

  const ScoredMapping &winning() const { return mappings.at(winner); }

  // Adds derived tables (top-1 before/after per class, winner) for readers;
  // from_json ignores them.
  nlohmann::json to_json() const;
  static SearchReport from_json(const nlohmann::json &doc);
  bool operator==(const SearchReport &) const = default;
};

struct StageTiming {
  std::string stage;
  double seconds = 0.0;
};

struct PipelineResult {
  SearchReport report;
  std::vector<StageTiming> timings;
  std::unique_ptr<LanguageModel> winner_model;
};

// Generate, re-rank, combine, fine-tune and select. Errors are rethrown as
// StageError naming the stage.
PipelineResult run_pipeline(const PipelineConfig &config);

// Writes candidates.jsonl, reranked.jsonl, mappings.jsonl, report.json,
// winner_mapping.json, timings.json and the winner checkpoint
// (winner_model.json) into out_dir, creating it if needed.
void write_outputs(const PipelineResult &result, const std::string &out_dir);

// Runs `fn` as stage `name`: errors become StageError, elapsed time is
// appended to `timings` when given.
template <typename Fn>
auto run_stage(const std::string &name, std::vector<StageTiming> *timings, Fn &&fn)
    -> decltype(fn());

}  // namespace labelseq

#include "labelseq/pipeline_inl.h"

#endif  // LABELSEQ_PIPELINE_H_
