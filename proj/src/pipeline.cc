// src/pipeline.cc

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

#include "labelseq/pipeline.h"

#include <filesystem>
#include <set>

#include "labelseq/error.h"
#include "labelseq/metrics.h"
#include "labelseq/parallel.h"
#include "labelseq/persistence.h"
#include "labelseq/scoring.h"

namespace labelseq {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr std::string_view kReportFormat = "labelseq-report/1";
constexpr std::string_view kScratch = "scratch";

void check_keys(const json &obj, const std::string &where,
                std::initializer_list<const char *> allowed) {
  if (!obj.is_object()) throw UsageError(where + " must be an object");
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto &[key, value] : obj.items())
    if (!ok.count(key)) throw UsageError("unknown key '" + key + "' in " + where);
}

template <typename T>
void read(const json &obj, const char *key, T &out, const std::string &where) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return;
  try {
    out = it->get<T>();
  } catch (const json::exception &) {
    throw UsageError(where + "." + key + " has the wrong type: " + it->dump());
  }
}

std::string resolve(const std::string &path, const std::string &base_dir) {
  if (path.empty() || base_dir.empty() || path == kScratch || fs::path(path).is_absolute())
    return path;
  return (fs::path(base_dir) / path).lexically_normal().string();
}

ModelSpec model_from_json(const json &obj, const std::string &where, const std::string &base_dir) {
  check_keys(obj, where, {"backend", "path", "width", "ffn"});
  ModelSpec m;
  std::string backend = "tabular";
  read(obj, "backend", backend, where);
  m.backend = parse_backend(backend);
  read(obj, "path", m.location, where);
  if (m.backend != Backend::kRemote) m.location = resolve(m.location, base_dir);
  read(obj, "width", m.scratch.width, where);
  read(obj, "ffn", m.scratch.ffn, where);
  return m;
}

json model_to_json(const ModelSpec &m) {
  json out = {{"backend", to_string(m.backend)}, {"path", m.location}};
  if (m.location == kScratch) {
    out["width"] = m.scratch.width;
    out["ffn"] = m.scratch.ffn;
  }
  return out;
}

std::vector<std::string> rendered_texts(const Template &tmpl, const std::vector<Example> &data) {
  std::vector<std::string> out;
  out.reserve(data.size());
  for (const auto &e : data) out.push_back(render(tmpl, e).text);
  return out;
}

PreparedTask load_task(const PipelineConfig &config, const std::optional<std::string> &tmpl_override) {
  PreparedTask p;
  p.seeds = Seeds::from_master(config.seed);
  p.data = load_dataset(config.data, config.format);
  p.task = make_task_spec(config.task.kind, p.data, config.task.metric, config.task.labels);
  p.task.positive_label = config.task.positive_label;
  p.task.validate(p.data);
  const std::string pattern = tmpl_override ? *tmpl_override : config.template_pattern;
  p.tmpl = pattern.empty() ? builtin_template(config.task.kind) : Template::parse(pattern);
  if (p.tmpl.arity() != field_arity(config.task.kind))
    throw UsageError("template '" + p.tmpl.pattern() + "' uses " + std::to_string(p.tmpl.arity()) +
                     " fields but task kind '" + std::string(to_string(config.task.kind)) +
                     "' has " + std::to_string(field_arity(config.task.kind)));
  return p;
}

void split_task(const PipelineConfig &config, PreparedTask &p) {
  p.split = sample_few_shot(p.data, config.k, p.seeds.split, p.task.labels);
}

json candidates_table(const std::vector<ClassCandidates> &by_class) {
  json out = json::array();
  for (const auto &cls : by_class) {
    json rows = json::array();
    for (const auto &c : cls.candidates) {
      json row = candidate_to_json(cls.label, c);
      row.erase("class");
      rows.push_back(std::move(row));
    }
    out.push_back({{"class", cls.label}, {"candidates", rows}});
  }
  return out;
}

std::vector<ClassCandidates> candidates_from_table(const json &table) {
  std::vector<ClassCandidates> out;
  for (const auto &cls : table) {
    ClassCandidates cc{cls.at("class").get<std::string>(), {}};
    for (const auto &row : cls.at("candidates")) {
      Candidate c;
      c.seq = row.at("tokens").get<TokenSeq>();
      c.text = row.at("text").get<std::string>();
      c.gen_score = real_from_json(row.at("gen_score"));
      if (row.contains("contrastive_score")) c.contrastive_score = real_from_json(row["contrastive_score"]);
      cc.candidates.push_back(std::move(c));
    }
    out.push_back(std::move(cc));
  }
  return out;
}

}  // namespace

PipelineConfig PipelineConfig::from_json(const json &doc, const std::string &base_dir) {
  check_keys(doc, "config",
             {"task", "data", "format", "template", "seed", "k", "search", "autoword", "n",
              "finetune", "generator", "classifier", "workers", "baseline_mapping"});
  PipelineConfig c;
  if (doc.contains("task")) {
    const auto &t = doc["task"];
    check_keys(t, "task", {"kind", "labels", "metric", "positive_label"});
    std::string kind = "single-sentence", metric = "accuracy";
    read(t, "kind", kind, "task");
    read(t, "metric", metric, "task");
    c.task.kind = parse_task_kind(kind);
    c.task.metric = parse_metric(metric);
    read(t, "labels", c.task.labels, "task");
    read(t, "positive_label", c.task.positive_label, "task");
  }
  read(doc, "data", c.data, "config");
  c.data = resolve(c.data, base_dir);
  std::string format = "tsv";
  read(doc, "format", format, "config");
  c.format = parse_data_format(format);
  read(doc, "template", c.template_pattern, "config");
  read(doc, "seed", c.seed, "config");
  read(doc, "k", c.k, "config");
  if (doc.contains("search")) {
    const auto &s = doc["search"];
    check_keys(s, "search", {"beam_width", "max_len", "length_penalty"});
    read(s, "beam_width", c.search.beam_width, "search");
    read(s, "max_len", c.search.max_len, "search");
    read(s, "length_penalty", c.search.length_penalty, "search");
  }
  read(doc, "autoword", c.autoword, "config");
  read(doc, "n", c.n, "config");
  if (doc.contains("finetune")) {
    const auto &f = doc["finetune"];
    check_keys(f, "finetune", {"steps", "batch_size", "learning_rate", "validate_every", "grid"});
    read(f, "steps", c.finetune.steps, "finetune");
    read(f, "batch_size", c.finetune.batch_size, "finetune");
    read(f, "learning_rate", c.finetune.learning_rate, "finetune");
    read(f, "validate_every", c.finetune.validate_every, "finetune");
    if (f.contains("grid") && !f["grid"].is_null()) {
      check_keys(f["grid"], "finetune.grid", {"batch_sizes", "learning_rates"});
      FineTuneGrid g;
      read(f["grid"], "batch_sizes", g.batch_sizes, "finetune.grid");
      read(f["grid"], "learning_rates", g.learning_rates, "finetune.grid");
      c.grid = std::move(g);
    }
  }
  if (doc.contains("generator")) c.generator = model_from_json(doc["generator"], "generator", base_dir);
  if (doc.contains("classifier")) c.classifier = model_from_json(doc["classifier"], "classifier", base_dir);
  read(doc, "workers", c.workers, "config");
  read(doc, "baseline_mapping", c.baseline_mapping, "config");
  c.baseline_mapping = resolve(c.baseline_mapping, base_dir);
  return c;
}

PipelineConfig PipelineConfig::load(const std::string &path) {
  json doc;
  try {
    doc = json::parse(read_text_file(path));
  } catch (const json::exception &e) {
    throw UsageError(path + ": " + e.what());
  }
  return from_json(doc, fs::path(path).parent_path().string());
}

json PipelineConfig::to_json() const {
  json finetune_json = {{"steps", finetune.steps},
                        {"batch_size", finetune.batch_size},
                        {"learning_rate", finetune.learning_rate},
                        {"validate_every", finetune.validate_every}};
  if (grid)
    finetune_json["grid"] = {{"batch_sizes", grid->batch_sizes},
                             {"learning_rates", grid->learning_rates}};
  return {{"task",
           {{"kind", to_string(task.kind)},
            {"labels", task.labels},
            {"metric", to_string(task.metric)},
            {"positive_label", task.positive_label}}},
          {"data", data},
          {"format", to_string(format)},
          {"template", template_pattern},
          {"seed", seed},
          {"k", k},
          {"search",
           {{"beam_width", search.beam_width},
            {"max_len", search.max_len},
            {"length_penalty", search.length_penalty}}},
          {"autoword", autoword},
          {"n", n},
          {"finetune", finetune_json},
          {"generator", model_to_json(generator)},
          {"classifier", model_to_json(classifier)},
          {"workers", workers},
          {"baseline_mapping", baseline_mapping}};
}

void PipelineConfig::validate() const {
  if (data.empty()) throw UsageError("no data path given");
  if (k == 0) throw UsageError("k must be positive");
  if (n == 0) throw UsageError("n must be positive");
  if (workers == 0) throw UsageError("workers must be positive");
  effective_search().validate();
  finetune.validate();
  if (grid && (grid->batch_sizes.empty() || grid->learning_rates.empty()))
    throw UsageError("finetune.grid needs at least one batch size and one learning rate");
  if (baseline_mapping.empty() && generator.location.empty())
    throw UsageError("no generator model given");
  if (generator.location == kScratch)
    throw UsageError("the generator must be a trained model, not 'scratch'");
  if (classifier.location.empty()) throw UsageError("no classifier model given");
  if (classifier.location == kScratch && classifier.backend != Backend::kTinyNeural)
    throw UsageError("only the tiny-neural backend can start from scratch");
}

SearchConfig PipelineConfig::effective_search() const {
  SearchConfig s = search;
  if (autoword) s.max_len = 1;
  return s;
}

PreparedTask prepare_task(const PipelineConfig &config) {
  PreparedTask p = load_task(config, std::nullopt);
  split_task(config, p);
  return p;
}

std::unique_ptr<LanguageModel> open_generator(const PipelineConfig &config) {
  return open_model(config.generator.backend, config.generator.location);
}

std::unique_ptr<LanguageModel> open_classifier(const PipelineConfig &config,
                                               const PreparedTask &prepared,
                                               const LanguageModel *generator) {
  if (config.classifier.location != kScratch)
    return open_model(config.classifier.backend, config.classifier.location);
  std::vector<std::string> texts = rendered_texts(prepared.tmpl, prepared.data);
  if (generator && generator->backend() != Backend::kRemote)
    for (TokenId id : generator->vocab().content_ids()) texts.push_back(generator->vocab().token(id));
  TinyNeuralConfig cfg = config.classifier.scratch;
  cfg.seed = prepared.seeds.init;
  return std::make_unique<TinyNeuralModel>(build_word_vocab(texts), cfg, "tiny-neural-scratch");
}

double evaluate_mapping(const LanguageModel &model, const Template &tmpl,
                        const LabelMapping &mapping, const std::vector<Example> &examples,
                        const TaskSpec &task) {
  if (examples.empty()) throw DataError("no examples to evaluate on");
  mapping.check_covers(task);
  std::vector<std::string> preds, gold;
  for (const auto &e : examples) {
    if (!e.label) throw DataError("evaluation needs labeled examples");
    preds.push_back(predict(model, tmpl, e, mapping));
    gold.push_back(*e.label);
  }
  return compute_metric(task.metric, task, preds, gold);
}

FinetuneRerankResult finetune_rerank(const LanguageModel &base, const Template &tmpl,
                                     const FewShotSplit &split,
                                     const std::vector<ScoredMapping> &mappings,
                                     const FineTuneConfig &config, const TaskSpec &task,
                                     size_t workers) {
  if (mappings.empty()) throw UsageError("no mappings to fine-tune");
  std::vector<RenderedInput> inputs;
  for (const auto &e : split.train) {
    if (!e.label) throw DataError("training examples must be labeled");
    inputs.push_back(render(tmpl, e));
  }
  FinetuneRerankResult out;
  out.mappings = mappings;
  out.best_steps.assign(mappings.size(), 0);
  std::vector<std::unique_ptr<LanguageModel>> models(mappings.size());
  parallel_for(mappings.size(), workers, [&](size_t i) {
    const LabelMapping &mapping = mappings[i].mapping;
    mapping.check_covers(task);
    std::vector<TrainingPair> pairs;
    for (size_t j = 0; j < split.train.size(); ++j)
      pairs.push_back({inputs[j], mapping.at(*split.train[j].label).tokens});
    auto result = fine_tune(base, pairs, config, [&](const LanguageModel &m) {
      return evaluate_mapping(m, tmpl, mapping, split.dev, task);
    });
    out.mappings[i].dev_metric = result.best_dev;
    out.best_steps[i] = result.best_step;
    models[i] = std::move(result.model);
  });
  for (size_t i = 1; i < out.mappings.size(); ++i) {
    const auto &a = out.mappings[i], &b = out.mappings[out.winner];
    if (*a.dev_metric > *b.dev_metric ||
        (*a.dev_metric == *b.dev_metric && a.combo_score > b.combo_score))
      out.winner = i;
  }
  out.winner_model = std::move(models[out.winner]);
  return out;
}

json SearchReport::to_json() const {
  json mappings_json = json::array();
  for (size_t i = 0; i < mappings.size(); ++i) {
    json m = mapping_to_json(mappings[i]);
    m["best_step"] = i < best_steps.size() ? best_steps[i] : 0;
    mappings_json.push_back(std::move(m));
  }
  json top1 = json::array();
  for (size_t c = 0; c < reranked.size(); ++c) {
    json row = {{"class", reranked[c].label}};
    if (c < generated.size() && !generated[c].candidates.empty())
      row["before"] = generated[c].candidates.front().text;
    if (!reranked[c].candidates.empty()) row["after"] = reranked[c].candidates.front().text;
    top1.push_back(std::move(row));
  }
  json grid_json = json::array();
  for (const auto &g : grid)
    grid_json.push_back({{"batch_size", g.batch_size},
                         {"learning_rate", g.learning_rate},
                         {"dev_metric", real_to_json(g.dev_metric)},
                         {"best_step", g.best_step}});
  json winner_json = json::object();
  if (winner < mappings.size()) {
    const auto &w = mappings[winner];
    json text = json::object();
    for (const auto &e : w.mapping.entries()) text[e.label] = e.text;
    winner_json = {{"rank", winner},
                   {"mapping", text},
                   {"combo_score", real_to_json(w.combo_score)},
                   {"dev_metric", w.dev_metric ? real_to_json(*w.dev_metric) : json()}};
  }
  return {{"format", kReportFormat},
          {"config", config},
          {"seeds", {{"split", seeds.split}, {"init", seeds.init}, {"shuffle", seeds.shuffle}}},
          {"template", template_pattern},
          {"baseline", baseline},
          {"candidates", {{"before", candidates_table(generated)}, {"after", candidates_table(reranked)}}},
          {"top1", top1},
          {"mappings", mappings_json},
          {"winner", winner_json},
          {"grid", grid_json}};
}

SearchReport SearchReport::from_json(const json &doc) {
  try {
    if (doc.value("format", std::string()) != kReportFormat)
      throw DataError("not a search report (expected format '" + std::string(kReportFormat) + "')");
    SearchReport r;
    r.config = doc.at("config");
    const auto &s = doc.at("seeds");
    r.seeds = {s.at("split").get<uint64_t>(), s.at("init").get<uint64_t>(),
               s.at("shuffle").get<uint64_t>()};
    r.template_pattern = doc.at("template").get<std::string>();
    r.baseline = doc.at("baseline").get<bool>();
    r.generated = candidates_from_table(doc.at("candidates").at("before"));
    r.reranked = candidates_from_table(doc.at("candidates").at("after"));
    for (const auto &m : doc.at("mappings")) {
      r.mappings.push_back(mapping_from_json(m));
      r.best_steps.push_back(m.value("best_step", size_t{0}));
    }
    r.winner = doc.at("winner").value("rank", size_t{0});
    for (const auto &g : doc.at("grid"))
      r.grid.push_back({g.at("batch_size").get<size_t>(), g.at("learning_rate").get<double>(),
                        real_from_json(g.at("dev_metric")), g.at("best_step").get<size_t>()});
    return r;
  } catch (const json::exception &e) {
    throw DataError(std::string("malformed report: ") + e.what());
  }
}

PipelineResult run_pipeline(const PipelineConfig &config) {
  PipelineResult result;
  auto *timings = &result.timings;
  SearchReport &report = result.report;
  run_stage("config", nullptr, [&] { config.validate(); });
  report.config = config.to_json();

  std::optional<BaselineMapping> baseline;
  if (!config.baseline_mapping.empty())
    baseline = run_stage("load", nullptr, [&] { return load_baseline_mapping(config.baseline_mapping); });
  PreparedTask p = run_stage("load", timings, [&] {
    return load_task(config, baseline ? baseline->template_pattern : std::nullopt);
  });
  run_stage("split", timings, [&] { split_task(config, p); });
  report.seeds = p.seeds;
  report.template_pattern = p.tmpl.pattern();
  report.baseline = baseline.has_value();

  std::unique_ptr<LanguageModel> generator;
  if (!baseline) generator = run_stage("backend", timings, [&] { return open_generator(config); });
  auto classifier = run_stage("backend", timings, [&] {
    return open_classifier(config, p, generator.get());
  });

  std::vector<ScoredMapping> top;
  std::vector<ScoredMapping> for_classifier;
  if (baseline) {
    run_stage("combine", timings, [&] {
      std::vector<std::pair<std::string, std::string>> ordered;
      for (const auto &label : p.task.labels) {
        auto it = std::find_if(baseline->label_text.begin(), baseline->label_text.end(),
                               [&](const auto &lt) { return lt.first == label; });
        if (it == baseline->label_text.end())
          throw DataError("baseline mapping has no entry for label '" + label + "'");
        ordered.push_back(*it);
      }
      if (ordered.size() != baseline->label_text.size())
        throw DataError("baseline mapping has labels the task does not");
      top.push_back({LabelMapping::from_text(*classifier, ordered), 0.0, std::nullopt, {}});
      for_classifier = top;
    });
  } else {
    const SearchConfig search = config.effective_search();
    report.generated = run_stage("generate", timings, [&] {
      return generate_all(*generator, p.tmpl, p.split, search, config.workers);
    });
    report.reranked = run_stage("rerank", timings, [&] {
      return rerank_candidates(*generator, p.tmpl, p.split, report.generated, config.workers);
    });
    run_stage("combine", timings, [&] {
      top = top_n_mappings(report.reranked, config.n);
      for (const auto &m : top)
        for_classifier.push_back({m.mapping.retokenized(*classifier), m.combo_score,
                                  std::nullopt, m.candidate_index});
    });
  }

  FineTuneConfig ft = config.finetune;
  ft.seed = p.seeds.shuffle;
  auto selected = run_stage("finetune", timings, [&] {
    return finetune_rerank(*classifier, p.tmpl, p.split, for_classifier, ft, p.task, config.workers);
  });
  for (size_t i = 0; i < top.size(); ++i) top[i].dev_metric = selected.mappings[i].dev_metric;
  report.mappings = std::move(top);
  report.best_steps = selected.best_steps;
  report.winner = selected.winner;
  result.winner_model = std::move(selected.winner_model);

  if (config.grid) {
    run_stage("grid", timings, [&] {
      std::vector<ScoredMapping> one{for_classifier[report.winner]};
      std::optional<double> best;
      for (size_t b : config.grid->batch_sizes)
        for (double lr : config.grid->learning_rates) {
          FineTuneConfig g = ft;
          g.batch_size = b;
          g.learning_rate = lr;
          auto r = finetune_rerank(*classifier, p.tmpl, p.split, one, g, p.task, 1);
          const double dev = *r.mappings[0].dev_metric;
          report.grid.push_back({b, lr, dev, r.best_steps[0]});
          if (!best || dev > *best) {
            best = dev;
            result.winner_model = std::move(r.winner_model);
          }
        }
    });
  }
  return result;
}

void write_outputs(const PipelineResult &result, const std::string &out_dir) {
  run_stage("write", nullptr, [&] {
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw DataError("cannot create output directory '" + out_dir + "': " + ec.message());
    const fs::path dir(out_dir);
    const SearchReport &r = result.report;
    if (!r.baseline) {
      write_text_file((dir / "candidates.jsonl").string(), candidates_to_jsonl(r.generated));
      write_text_file((dir / "reranked.jsonl").string(), candidates_to_jsonl(r.reranked));
    }
    write_text_file((dir / "mappings.jsonl").string(), mappings_to_jsonl(r.mappings));
    write_text_file((dir / "report.json").string(), r.to_json().dump(2) + "\n");
    json winner = json::object();
    for (const auto &e : r.winning().mapping.entries()) winner[e.label] = e.text;
    write_text_file((dir / "winner_mapping.json").string(),
                    json{{"template", r.template_pattern}, {"mapping", winner}}.dump(2) + "\n");
    json timings = json::array();
    for (const auto &t : result.timings) timings.push_back({{"stage", t.stage}, {"seconds", t.seconds}});
    write_text_file((dir / "timings.json").string(), timings.dump(2) + "\n");
    if (result.winner_model) result.winner_model->save((dir / "winner_model.json").string());
  });
}

}  // namespace labelseq
