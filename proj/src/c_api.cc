// src/c_api.cc

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

#include "labelseq/labelseq.h"

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <new>
#include <memory>
#include <string>
#include <vector>
#include <algorithm>

#include <nlohmann/json.hpp>

#include "labelseq/error.h"
#include "labelseq/persistence.h"
#include "labelseq/pipeline.h"
#include "labelseq/remote.h"
#include "labelseq/scoring.h"

using nlohmann::json;
namespace fs = std::filesystem;

struct lsq_config {
  json doc = json::object();
  std::string base_dir;
};

struct lsq_model {
  std::unique_ptr<labelseq::LanguageModel> model;
};

namespace {

thread_local std::string g_error;
thread_local std::string g_stage;

lsq_status fail(lsq_status status, const std::string &message, const std::string &stage = "") {
  g_error = message;
  g_stage = stage;
  return status;
}

// Runs fn, mapping exceptions onto status codes.
template <typename Fn>
lsq_status guarded(Fn &&fn) {
  g_error.clear();
  g_stage.clear();
  try {
    fn();
    return LSQ_OK;
  } catch (const labelseq::StageError &e) {
    return fail(static_cast<lsq_status>(e.kind()), e.what(), e.stage());
  } catch (const labelseq::Error &e) {
    return fail(static_cast<lsq_status>(e.kind()), e.what());
  } catch (const json::exception &e) {
    return fail(LSQ_DATA, e.what());
  } catch (const std::bad_alloc &) {
    return fail(LSQ_INTERNAL, "out of memory");
  } catch (const std::exception &e) {
    return fail(LSQ_INTERNAL, e.what());
  } catch (...) {
    return fail(LSQ_INTERNAL, "unknown error");
  }
}

char *dup_string(const std::string &s) {
  char *out = static_cast<char *>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.data(), s.size() + 1);
  return out;
}

void require(const void *p, const char *what) {
  if (!p) throw labelseq::UsageError(std::string(what) + " must not be NULL");
}

labelseq::PipelineConfig pipeline_config(const lsq_config *config) {
  require(config, "config");
  return labelseq::PipelineConfig::from_json(config->doc, config->base_dir);
}

std::string out_path(const char *out_dir, const char *file) {
  require(out_dir, "out_dir");
  return (fs::path(out_dir) / file).string();
}

void ensure_dir(const char *out_dir) {
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw labelseq::DataError(std::string("cannot create '") + out_dir + "': " + ec.message());
}

// A mapping file is either one JSON object with a "mapping" member or
// JSON-lines of mappings, of which the first is used.
json read_mapping_file(const std::string &path) {
  const std::string text = labelseq::read_text_file(path);
  try {
    return json::parse(text);
  } catch (const json::exception &) {
  }
  const auto mappings = labelseq::mappings_from_jsonl(text);
  if (mappings.empty()) throw labelseq::DataError(path + ": no mappings");
  return labelseq::mapping_to_json(mappings.front());
}

}  // namespace

extern "C" {

const char *lsq_version(void) { return LABELSEQ_VERSION_STRING; }
const char *lsq_last_error(void) { return g_error.c_str(); }
const char *lsq_last_error_stage(void) { return g_stage.c_str(); }
void lsq_string_free(char *s) { std::free(s); }

lsq_status lsq_config_new(lsq_config **out) {
  return guarded([&] {
    require(out, "out");
    *out = new lsq_config();
  });
}

lsq_status lsq_config_load(const char *path, lsq_config **out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    auto c = std::make_unique<lsq_config>();
    try {
      c->doc = json::parse(labelseq::read_text_file(path));
    } catch (const json::exception &e) {
      throw labelseq::UsageError(std::string(path) + ": " + e.what());
    }
    if (!c->doc.is_object()) throw labelseq::UsageError(std::string(path) + ": expected a JSON object");
    c->base_dir = fs::path(path).parent_path().string();
    *out = c.release();
  });
}

lsq_status lsq_config_parse(const char *json_text, lsq_config **out) {
  return guarded([&] {
    require(json_text, "json_text");
    require(out, "out");
    auto c = std::make_unique<lsq_config>();
    try {
      c->doc = json::parse(json_text);
    } catch (const json::exception &e) {
      throw labelseq::UsageError(std::string("config: ") + e.what());
    }
    if (!c->doc.is_object()) throw labelseq::UsageError("config must be a JSON object");
    *out = c.release();
  });
}

lsq_status lsq_config_set(lsq_config *config, const char *key, const char *json_value) {
  return guarded([&] {
    require(config, "config");
    require(key, "key");
    require(json_value, "json_value");
    json value;
    try {
      value = json::parse(json_value);
    } catch (const json::exception &) {
      throw labelseq::UsageError(std::string("value for '") + key + "' is not valid JSON: " + json_value);
    }
    std::vector<std::string> parts;
    std::string path = key;
    for (size_t start = 0;;) {
      const size_t dot = path.find('.', start);
      parts.push_back(path.substr(start, dot - start));
      if (parts.back().empty()) throw labelseq::UsageError(std::string("bad config key '") + key + "'");
      if (dot == std::string::npos) break;
      start = dot + 1;
    }
    // Walk a copy so that a failure leaves the document untouched.
    json doc = config->doc;
    json *node = &doc;
    for (size_t i = 0; i < parts.size(); ++i) {
      if (!node->is_object()) throw labelseq::UsageError(std::string("'") + key + "' crosses a non-object");
      node = &(*node)[parts[i]];
      if (i + 1 < parts.size() && node->is_null()) *node = json::object();
    }
    *node = std::move(value);
    config->doc = std::move(doc);
  });
}

lsq_status lsq_config_to_json(const lsq_config *config, char **out) {
  return guarded([&] {
    require(config, "config");
    require(out, "out");
    *out = dup_string(config->doc.dump(2));
  });
}

void lsq_config_free(lsq_config *config) { delete config; }

lsq_status lsq_generate(const lsq_config *config, const char *out_dir, char **summary_json) {
  return guarded([&] {
    const auto cfg = pipeline_config(config);
    labelseq::run_stage("config", nullptr, [&] { cfg.validate(); });
    const auto p = labelseq::run_stage("load", nullptr, [&] { return labelseq::prepare_task(cfg); });
    auto generator = labelseq::run_stage("backend", nullptr, [&] { return labelseq::open_generator(cfg); });
    const auto candidates = labelseq::run_stage("generate", nullptr, [&] {
      return labelseq::generate_all(*generator, p.tmpl, p.split, cfg.effective_search(), cfg.workers);
    });
    json counts = json::array();
    labelseq::run_stage("write", nullptr, [&] {
      ensure_dir(out_dir);
      const auto path = out_path(out_dir, "candidates.jsonl");
      labelseq::write_text_file(path, labelseq::candidates_to_jsonl(candidates));
      for (const auto &c : candidates) {
        json row = {{"class", c.label}, {"count", c.candidates.size()}};
        if (!c.candidates.empty()) row["top"] = c.candidates.front().text;
        counts.push_back(row);
      }
    });
    if (summary_json)
      *summary_json = dup_string(json{{"candidates", out_path(out_dir, "candidates.jsonl")},
                                      {"classes", counts}}.dump());
  });
}

lsq_status lsq_rerank(const lsq_config *config, const char *candidates_path, const char *out_dir,
                      char **summary_json) {
  return guarded([&] {
    const auto cfg = pipeline_config(config);
    labelseq::run_stage("config", nullptr, [&] { cfg.validate(); });
    const std::string source =
        candidates_path ? std::string(candidates_path) : out_path(out_dir, "candidates.jsonl");
    auto candidates = labelseq::run_stage("load", nullptr, [&] {
      return labelseq::candidates_from_jsonl(labelseq::read_text_file(source));
    });
    const auto p = labelseq::run_stage("load", nullptr, [&] { return labelseq::prepare_task(cfg); });
    auto generator = labelseq::run_stage("backend", nullptr, [&] { return labelseq::open_generator(cfg); });
    const auto ranked = labelseq::run_stage("rerank", nullptr, [&] {
      std::vector<labelseq::ClassCandidates> ordered;
      for (const auto &label : p.task.labels) {
        auto it = std::find_if(candidates.begin(), candidates.end(),
                               [&](const auto &c) { return c.label == label; });
        if (it == candidates.end())
          throw labelseq::DataError("candidates file has no entries for class '" + label + "'");
        ordered.push_back(*it);
      }
      return labelseq::rerank_candidates(*generator, p.tmpl, p.split, ordered, cfg.workers);
    });
    const auto top = labelseq::run_stage("combine", nullptr,
                                         [&] { return labelseq::top_n_mappings(ranked, cfg.n); });
    labelseq::run_stage("write", nullptr, [&] {
      ensure_dir(out_dir);
      labelseq::write_text_file(out_path(out_dir, "reranked.jsonl"), labelseq::candidates_to_jsonl(ranked));
      labelseq::write_text_file(out_path(out_dir, "mappings.jsonl"), labelseq::mappings_to_jsonl(top));
    });
    if (summary_json) {
      json best = labelseq::mapping_to_json(top.front());
      *summary_json = dup_string(json{{"reranked", out_path(out_dir, "reranked.jsonl")},
                                      {"mappings", out_path(out_dir, "mappings.jsonl")},
                                      {"count", top.size()},
                                      {"best", best["mapping"]},
                                      {"best_combo_score", best["combo_score"]}}.dump());
    }
  });
}

lsq_status lsq_search(const lsq_config *config, const char *out_dir, char **report_json) {
  return guarded([&] {
    require(out_dir, "out_dir");
    const auto cfg = pipeline_config(config);
    const auto result = labelseq::run_pipeline(cfg);
    labelseq::write_outputs(result, out_dir);
    if (report_json) *report_json = dup_string(result.report.to_json().dump(2));
  });
}

lsq_status lsq_eval(const lsq_config *config, const char *mapping_path, const char *checkpoint_path,
                    const char *split, char **result_json) {
  return guarded([&] {
    require(mapping_path, "mapping_path");
    const std::string which = split ? split : "dev";
    if (which != "dev" && which != "train" && which != "all")
      throw labelseq::UsageError("split must be dev, train or all, got '" + which + "'");
    auto cfg = pipeline_config(config);
    const json mapping_doc = labelseq::run_stage("load", nullptr, [&] { return read_mapping_file(mapping_path); });
    if (!mapping_doc.is_object() || !mapping_doc.contains("mapping") || !mapping_doc["mapping"].is_object())
      throw labelseq::DataError(std::string(mapping_path) + ": no \"mapping\" object");
    if (mapping_doc.contains("template") && mapping_doc["template"].is_string())
      cfg.template_pattern = mapping_doc["template"].get<std::string>();
    if (checkpoint_path) cfg.classifier.location = checkpoint_path;
    const auto p = labelseq::run_stage("load", nullptr, [&] { return labelseq::prepare_task(cfg); });
    auto classifier = labelseq::run_stage("backend", nullptr, [&] {
      if (cfg.classifier.location.empty()) throw labelseq::UsageError("no classifier checkpoint given");
      return labelseq::open_classifier(cfg, p, nullptr);
    });
    const auto &text = mapping_doc["mapping"];
    if (text.size() != p.task.labels.size())
      throw labelseq::DataError("mapping has " + std::to_string(text.size()) + " entries but the task has " +
                                std::to_string(p.task.labels.size()) + " labels");
    std::vector<std::pair<std::string, std::string>> ordered;
    for (const auto &label : p.task.labels) {
      if (!text.contains(label) || !text[label].is_string())
        throw labelseq::DataError("mapping has no text for label '" + label + "'");
      ordered.emplace_back(label, text[label].get<std::string>());
    }
    const double value = labelseq::run_stage("eval", nullptr, [&] {
      const auto mapping = labelseq::LabelMapping::from_text(*classifier, ordered);
      std::vector<labelseq::Example> examples;
      if (which == "dev") examples = p.split.dev;
      else if (which == "train") examples = p.split.train;
      else
        for (const auto &e : p.data)
          if (e.label) examples.push_back(e);
      return labelseq::evaluate_mapping(*classifier, p.tmpl, mapping, examples, p.task);
    });
    if (result_json) {
      const size_t count = which == "dev" ? p.split.dev.size()
                           : which == "train" ? p.split.train.size()
                                              : p.data.size();
      *result_json = dup_string(json{{"metric", std::string(labelseq::to_string(p.task.metric))},
                                     {"value", value},
                                     {"split", which},
                                     {"examples", count}}.dump());
    }
  });
}

lsq_status lsq_serve_check(const char *endpoint, char **result_json) {
  return guarded([&] {
    require(endpoint, "endpoint");
    const auto result = labelseq::serve_check(endpoint);
    if (result_json) *result_json = dup_string(result.to_json().dump(2));
  });
}

lsq_status lsq_model_open(const char *backend, const char *location, lsq_model **out) {
  return guarded([&] {
    require(backend, "backend");
    require(location, "location");
    require(out, "out");
    auto m = std::make_unique<lsq_model>();
    m->model = labelseq::open_model(labelseq::parse_backend(backend), location);
    *out = m.release();
  });
}

size_t lsq_model_vocab_size(const lsq_model *model) {
  return model && model->model ? model->model->vocab().size() : 0;
}

lsq_status lsq_model_tokenize(const lsq_model *model, const char *text, int32_t *ids,
                              size_t capacity, size_t *length) {
  return guarded([&] {
    require(model, "model");
    require(text, "text");
    require(length, "length");
    const auto seq = model->model->encode(text);
    *length = seq.size();
    if (ids)
      for (size_t i = 0; i < std::min(capacity, seq.size()); ++i) ids[i] = seq[i];
  });
}

lsq_status lsq_model_next_token_logprobs(const lsq_model *model, const char *input_text,
                                         const int32_t *prefix, size_t prefix_length, double *out,
                                         size_t out_length) {
  return guarded([&] {
    require(model, "model");
    require(input_text, "input_text");
    require(out, "out");
    if (prefix_length > 0) require(prefix, "prefix");
    const size_t v = model->model->vocab().size();
    if (out_length < v)
      throw labelseq::UsageError("output buffer holds " + std::to_string(out_length) +
                                 " values, vocabulary has " + std::to_string(v));
    const auto lp = model->model->next_token_logprobs(
        labelseq::rendered_from_text(input_text),
        std::span<const labelseq::TokenId>(prefix, prefix_length));
    std::copy(lp.begin(), lp.end(), out);
  });
}

lsq_status lsq_model_sequence_logprob(const lsq_model *model, const char *input_text,
                                      const int32_t *target, size_t target_length, double *out) {
  return guarded([&] {
    require(model, "model");
    require(input_text, "input_text");
    require(out, "out");
    if (target_length > 0) require(target, "target");
    *out = model->model->sequence_logprob(labelseq::rendered_from_text(input_text),
                                          std::span<const labelseq::TokenId>(target, target_length));
  });
}

void lsq_model_free(lsq_model *model) { delete model; }

}  // extern "C"
