// tools/labelseq_cli.cc

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

// Command-line front end. Talks to the engine only through the C interface.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <memory>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "labelseq/labelseq.h"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Options {
  std::string config_path;
  std::optional<std::string> task, data, format, template_pattern;
  std::optional<uint64_t> seed;
  std::optional<size_t> k, beam_width, max_len, n, workers, steps;
  bool autoword = false;
  std::optional<std::string> backend, remote_endpoint, baseline_mapping;
  std::optional<std::string> generator, classifier;
  std::string out_dir = "labelseq-out";
  // eval / rerank / serve-check
  std::string mapping, checkpoint, split = "dev", candidates, probe;
};

// Owned C string from the library.
struct CString {
  char *p = nullptr;
  ~CString() { lsq_string_free(p); }
  std::string str() const { return p ? p : ""; }
};

struct ConfigHandle {
  lsq_config *p = nullptr;
  ~ConfigHandle() { lsq_config_free(p); }
};

int report_failure(lsq_status status) {
  std::cerr << "error: " << lsq_last_error() << "\n";
  return static_cast<int>(status);
}

int usage_failure(const std::string &message) {
  std::cerr << "error: " << message << "\n";
  return LSQ_USAGE;
}

// Paths given on the command line are relative to the working directory,
// not to the config file.
std::string absolute(const std::string &path) { return fs::absolute(path).lexically_normal().string(); }

std::string quoted(const std::string &s) { return json(s).dump(); }

lsq_status set(lsq_config *c, const char *key, const std::string &json_value) {
  return lsq_config_set(c, key, json_value.c_str());
}

// Loads the config file (if any) and applies flag overrides.
lsq_status build_config(const Options &o, ConfigHandle &config) {
  lsq_status st = o.config_path.empty() ? lsq_config_new(&config.p)
                                        : lsq_config_load(o.config_path.c_str(), &config.p);
  if (st != LSQ_OK) return st;
  auto apply = [&](const char *key, const std::string &value) {
    if (st == LSQ_OK) st = set(config.p, key, value);
  };
  if (o.task) apply("task.kind", quoted(*o.task));
  if (o.data) apply("data", quoted(absolute(*o.data)));
  if (o.format) apply("format", quoted(*o.format));
  if (o.template_pattern) apply("template", quoted(*o.template_pattern));
  if (o.seed) apply("seed", std::to_string(*o.seed));
  if (o.k) apply("k", std::to_string(*o.k));
  if (o.beam_width) apply("search.beam_width", std::to_string(*o.beam_width));
  if (o.max_len) apply("search.max_len", std::to_string(*o.max_len));
  if (o.n) apply("n", std::to_string(*o.n));
  if (o.autoword) apply("autoword", "true");
  if (o.workers) apply("workers", std::to_string(*o.workers));
  if (o.steps) apply("finetune.steps", std::to_string(*o.steps));
  if (o.baseline_mapping) apply("baseline_mapping", quoted(absolute(*o.baseline_mapping)));
  if (o.generator) apply("generator.path", quoted(absolute(*o.generator)));
  if (o.classifier) {
    const bool scratch = *o.classifier == "scratch";
    apply("classifier.path", quoted(scratch ? *o.classifier : absolute(*o.classifier)));
  }
  if (o.backend) {
    apply("generator.backend", quoted(*o.backend));
    apply("classifier.backend", quoted(*o.backend));
  }
  if (o.remote_endpoint) {
    CString text;
    if (st == LSQ_OK) st = lsq_config_to_json(config.p, &text.p);
    if (st != LSQ_OK) return st;
    const json doc = json::parse(text.str());
    for (const char *role : {"generator", "classifier"})
      if (doc.contains(role) && doc[role].value("backend", std::string()) == "remote")
        apply((std::string(role) + ".path").c_str(), quoted(*o.remote_endpoint));
  }
  return st;
}

void print_winner(const json &report) {
  const auto &w = report.at("winner");
  if (w.empty()) return;
  std::cout << "winner:";
  for (auto it = w["mapping"].begin(); it != w["mapping"].end(); ++it)
    std::cout << " " << it.key() << " -> " << quoted(it.value().get<std::string>()) << ";";
  std::cout << " dev " << report["config"]["task"].value("metric", std::string("metric")) << " "
            << w["dev_metric"].dump() << "\n";
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"Automatic label-sequence search for prompt-based classification"};
  app.set_version_flag("--version", std::string(lsq_version()));
  app.require_subcommand(1);
  Options o;

  auto add_common = [&](CLI::App *cmd) {
    cmd->add_option("--config", o.config_path, "JSON configuration file")->check(CLI::ExistingFile);
    cmd->add_option("--task", o.task, "task kind (single-sentence, sentence-pair, boolq-style, copa-style, multirc-style, wic-style)");
    cmd->add_option("--data", o.data, "labeled examples");
    cmd->add_option("--format", o.format, "data format (tsv, json-lines)");
    cmd->add_option("--template", o.template_pattern, "template pattern with {i} fields and [MASK]");
    cmd->add_option("--seed", o.seed, "master seed");
    cmd->add_option("--k", o.k, "shots per class");
    cmd->add_option("--workers", o.workers, "worker threads");
    cmd->add_option("--backend", o.backend, "backend for generator and classifier")
        ->check(CLI::IsMember({"tabular", "tiny-neural", "remote"}));
    cmd->add_option("--remote-endpoint", o.remote_endpoint, "exec:<command> or tcp:<host>:<port>");
    cmd->add_option("--generator", o.generator, "generator model file");
    cmd->add_option("--classifier", o.classifier, "classifier model file, or 'scratch'");
  };
  auto add_search = [&](CLI::App *cmd) {
    cmd->add_option("--beam-width", o.beam_width, "beam width");
    cmd->add_option("--max-len", o.max_len, "maximum label-sequence length");
    cmd->add_option("--n", o.n, "number of mappings kept");
    cmd->add_flag("--autoword", o.autoword, "single-token label sequences only");
  };
  auto add_out = [&](CLI::App *cmd) { cmd->add_option("--out-dir", o.out_dir, "output directory"); };

  auto *generate = app.add_subcommand("generate", "beam-search label sequences per class");
  add_common(generate);
  add_search(generate);
  add_out(generate);

  auto *rerank = app.add_subcommand("rerank", "contrastive re-ranking and top-n mappings");
  add_common(rerank);
  add_search(rerank);
  add_out(rerank);
  rerank->add_option("--candidates", o.candidates, "candidates file (default: <out-dir>/candidates.jsonl)");

  auto *search = app.add_subcommand("search", "full search with fine-tuning and dev selection");
  add_common(search);
  add_search(search);
  add_out(search);
  search->add_option("--baseline-mapping", o.baseline_mapping, "evaluate this manual mapping instead of searching");
  search->add_option("--steps", o.steps, "fine-tuning steps per mapping");

  auto *eval = app.add_subcommand("eval", "score a mapping with a classifier checkpoint");
  add_common(eval);
  eval->add_option("--mapping", o.mapping, "mapping file")->required();
  eval->add_option("--checkpoint", o.checkpoint, "classifier checkpoint (default: configured classifier)");
  eval->add_option("--split", o.split, "dev, train or all")->check(CLI::IsMember({"dev", "train", "all"}));

  auto *serve_check = app.add_subcommand("serve-check", "probe a model server for protocol conformance");
  serve_check->add_option("--remote-endpoint", o.remote_endpoint, "exec:<command> or tcp:<host>:<port>")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : LSQ_USAGE;
  }

  if (serve_check->parsed()) {
    CString result;
    const lsq_status st = lsq_serve_check(o.remote_endpoint->c_str(), &result.p);
    if (st != LSQ_OK) return report_failure(st);
    std::cout << result.str() << "\n";
    return json::parse(result.str()).value("passed", false) ? 0 : LSQ_BACKEND;
  }

  if (o.backend && *o.backend == "remote" && !o.remote_endpoint)
    return usage_failure("--backend remote needs --remote-endpoint");

  ConfigHandle config;
  if (const lsq_status st = build_config(o, config); st != LSQ_OK) return report_failure(st);

  if (generate->parsed()) {
    CString summary;
    const lsq_status st = lsq_generate(config.p, o.out_dir.c_str(), &summary.p);
    if (st != LSQ_OK) return report_failure(st);
    std::cout << summary.str() << "\n";
    return 0;
  }
  if (rerank->parsed()) {
    CString summary;
    const std::string candidates = o.candidates.empty() ? "" : absolute(o.candidates);
    const lsq_status st = lsq_rerank(config.p, candidates.empty() ? nullptr : candidates.c_str(),
                                     o.out_dir.c_str(), &summary.p);
    if (st != LSQ_OK) return report_failure(st);
    std::cout << summary.str() << "\n";
    return 0;
  }
  if (search->parsed()) {
    CString report;
    const lsq_status st = lsq_search(config.p, o.out_dir.c_str(), &report.p);
    if (st != LSQ_OK) return report_failure(st);
    print_winner(json::parse(report.str()));
    std::cout << "report: " << (fs::path(o.out_dir) / "report.json").string() << "\n";
    return 0;
  }
  CString result;
  const std::string checkpoint = o.checkpoint.empty() ? "" : absolute(o.checkpoint);
  const lsq_status st =
      lsq_eval(config.p, absolute(o.mapping).c_str(), checkpoint.empty() ? nullptr : checkpoint.c_str(),
               o.split.c_str(), &result.p);
  if (st != LSQ_OK) return report_failure(st);
  std::cout << result.str() << "\n";
  return 0;
}
