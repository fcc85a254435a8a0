// src/serve_check.cc

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

#include <cmath>
#include <limits>

#include "labelseq/error.h"
#include "labelseq/remote.h"

namespace labelseq {

using nlohmann::json;

namespace {

double max_abs_diff(const json &a, const json &b) {
  if (a.size() != b.size()) return std::numeric_limits<double>::infinity();
  double worst = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    if (a[i].is_null() || b[i].is_null()) {
      if (a[i].is_null() != b[i].is_null()) return std::numeric_limits<double>::infinity();
      continue;
    }
    worst = std::max(worst, std::abs(a[i].get<double>() - b[i].get<double>()));
  }
  return worst;
}

double raw_logsumexp(const json &row) {
  std::vector<double> v;
  for (const auto &x : row) v.push_back(x.is_null() ? -std::numeric_limits<double>::infinity()
                                                    : x.get<double>());
  return logsumexp(v);
}

}  // namespace

bool ServeCheckResult::passed() const {
  if (checks.empty()) return false;
  for (const auto &c : checks)
    if (!c.passed) return false;
  return true;
}

json ServeCheckResult::to_json() const {
  json list = json::array();
  for (const auto &c : checks)
    list.push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
  return {{"passed", passed()}, {"checks", list}};
}

ServeCheckResult serve_check(std::unique_ptr<Transport> transport,
                             const std::vector<std::string> &probe_texts) {
  ServeCheckResult result;
  auto add = [&](std::string name, bool ok, std::string detail) {
    result.checks.push_back({std::move(name), ok, std::move(detail)});
  };
  std::unique_ptr<RemoteModel> model;
  try {
    model = connect_remote(std::move(transport));
  } catch (const Error &e) {
    add("hello", false, e.what());
    return result;
  }
  RemoteSession &session = model->session();
  const Vocab &vocab = model->vocab();
  add("hello", true,
      "model '" + model->identifier() + "', vocab_size " + std::to_string(vocab.size()) +
          ", trainable " + (model->trainable() ? "yes" : "no"));

  std::vector<std::string> probes = probe_texts;
  if (probes.empty()) {
    const auto &content = vocab.content_ids();
    for (size_t i : {size_t{0}, content.size() / 2, content.size() - 1}) {
      try {
        probes.push_back(model->decode(std::span(&content[i], 1)));
      } catch (const Error &e) {
        add("detokenize", false, e.what());
        return result;
      }
    }
  }

  const std::string input = probes.front() + " [MASK]";
  const TokenId first = vocab.content_ids().front();
  const json probe_request = {{"input", input}, {"prefixes", json::array({json::array(), {first}})}};

  try {
    auto guard = session.lock();
    const json reply = session.call("logprobs", probe_request);
    double worst = 0.0;
    bool shaped = reply.contains("logprobs") && reply["logprobs"].size() == 2;
    if (shaped)
      for (const auto &row : reply["logprobs"]) {
        shaped = shaped && row.size() == vocab.size();
        worst = std::max(worst, std::abs(raw_logsumexp(row)));
      }
    add("normalization", shaped && worst <= 1e-4,
        shaped ? "max |logsumexp| " + std::to_string(worst) : "malformed logprobs reply");
  } catch (const Error &e) {
    add("normalization", false, e.what());
  }

  {
    bool ok = true;
    std::string detail;
    for (const auto &text : probes) {
      try {
        const auto ids = session.call("tokenize", {{"text", text}}).at("ids");
        const auto back = session.call("detokenize", {{"ids", ids}}).at("text").get<std::string>();
        if (back != text) {
          ok = false;
          detail += "'" + text + "' came back as '" + back + "'; ";
        }
      } catch (const std::exception &e) {
        ok = false;
        detail += "'" + text + "': " + e.what() + "; ";
      }
    }
    add("tokenize-roundtrip", ok,
        ok ? std::to_string(probes.size()) + " probe texts" : detail);
  }

  try {
    auto guard = session.lock();
    session.activate(model->checkpoint());
    const json before = session.call("logprobs", probe_request).at("logprobs");
    const std::string saved = session.snapshot();
    std::string note;
    if (model->trainable()) {
      session.call("finetune", {{"examples", json::array({{{"input", input}, {"target", {first}}}})},
                                {"learning_rate", 0.5}});
      const json moved = session.call("logprobs", probe_request).at("logprobs");
      note = ", fine-tune moved scores by " + std::to_string(max_abs_diff(moved[0], before[0]));
    }
    session.call("restore", {{"checkpoint", saved}});
    const json after = session.call("logprobs", probe_request).at("logprobs");
    const double diff = std::max(max_abs_diff(before[0], after[0]), max_abs_diff(before[1], after[1]));
    add("checkpoint-restore", diff <= 1e-6, "max score difference " + std::to_string(diff) + note);
    session.activate(model->checkpoint());
  } catch (const std::exception &e) {
    add("checkpoint-restore", false, e.what());
  }

  try {
    std::vector<json> payloads;
    for (const auto &text : probes) payloads.push_back({{"text", text}});
    const auto piped = session.call_many("tokenize", payloads);
    bool ok = true;
    for (size_t i = 0; i < payloads.size(); ++i)
      ok = ok && piped[i] == session.call("tokenize", payloads[i]);
    add("id-correlation", ok,
        ok ? std::to_string(payloads.size()) + " pipelined requests matched"
           : "pipelined responses disagree with sequential ones");
  } catch (const Error &e) {
    add("id-correlation", false, e.what());
  }
  return result;
}

ServeCheckResult serve_check(const std::string &endpoint,
                             const std::vector<std::string> &probe_texts) {
  std::unique_ptr<Transport> transport;
  try {
    transport = open_transport(endpoint);
  } catch (const BackendError &e) {
    ServeCheckResult r;
    r.checks.push_back({"hello", false, e.what()});
    return r;
  }
  return serve_check(std::move(transport), probe_texts);
}

}  // namespace labelseq
