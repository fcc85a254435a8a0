// src/remote.cc

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

#include "labelseq/remote.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <optional>

#include "labelseq/error.h"

namespace labelseq {

using nlohmann::json;

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

[[noreturn]] void protocol_error(const std::string &what) {
  throw BackendError("protocol error: " + what);
}

json prefix_list(std::span<const TokenSeq> prefixes) {
  json out = json::array();
  for (const auto &p : prefixes) out.push_back(p);
  return out;
}

std::vector<double> decode_logprobs(const json &row, size_t vocab_size) {
  if (!row.is_array() || row.size() != vocab_size)
    protocol_error("logprobs row must be an array of " + std::to_string(vocab_size) +
                   " numbers");
  std::vector<double> out;
  out.reserve(vocab_size);
  for (const auto &v : row) {
    if (v.is_null()) {
      out.push_back(kNegInf);
    } else if (v.is_number()) {
      out.push_back(v.get<double>());
      if (std::isnan(out.back()) || out.back() > 1e-9) protocol_error("log-probability out of range");
    } else {
      protocol_error("logprobs entries must be numbers or null");
    }
  }
  const double lse = logsumexp(out);
  if (!std::isfinite(lse) || std::abs(lse) > 1e-6)
    protocol_error("logprobs row does not normalize (logsumexp " + std::to_string(lse) + ")");
  // Absorb the server's rounding so the local 1e-9 contract holds.
  for (double &v : out) v -= lse;
  return out;
}

template <typename T>
T field(const json &payload, const char *name, const std::string &kind) {
  auto it = payload.find(name);
  if (it == payload.end()) protocol_error(kind + " response lacks '" + name + "'");
  try {
    return it->get<T>();
  } catch (const json::exception &) {
    protocol_error(kind + " response field '" + name + "' has the wrong type");
  }
}

Vocab vocab_from_hello(const json &hello) {
  const auto size = field<size_t>(hello, "vocab_size", "hello");
  const json special = field<json>(hello, "special", "hello");
  SpecialIds ids;
  try {
    ids.pad = special.at("pad").get<TokenId>();
    ids.eos = special.at("eos").get<TokenId>();
    ids.mask = special.at("mask").get<TokenId>();
    ids.unk = special.value("unk", -1);
  } catch (const json::exception &) {
    protocol_error("hello 'special' must give integer pad, eos and mask ids");
  }
  std::vector<std::string> tokens;
  if (hello.contains("tokens")) {
    tokens = field<std::vector<std::string>>(hello, "tokens", "hello");
    if (tokens.size() != size) protocol_error("hello 'tokens' disagrees with 'vocab_size'");
  } else {
    // Placeholder names; remote text always goes through tokenize/detokenize.
    for (size_t i = 0; i < size; ++i) tokens.push_back("<id:" + std::to_string(i) + ">");
  }
  try {
    return Vocab(std::move(tokens), ids);
  } catch (const UsageError &e) {
    protocol_error(std::string("hello describes an invalid vocabulary: ") + e.what());
  }
}

}  // namespace

RemoteSession::RemoteSession(std::unique_ptr<Transport> transport,
                             const RemoteOptions &options)
    : transport_(std::move(transport)), options_(options) {
  if (options_.max_batch == 0 || options_.window == 0)
    throw UsageError("remote max_batch and window must be positive");
  hello_ = call("hello", {{"version", kProtocolVersion}});
  const auto version = field<std::string>(hello_, "version", "hello");
  if (version != kProtocolVersion)
    throw BackendError("protocol version mismatch: server speaks '" + version +
                       "', client speaks '" + std::string(kProtocolVersion) + "'");
  vocab_ = vocab_from_hello(hello_);
  trainable_ = hello_.value("trainable", false);
  model_name_ = hello_.value("model", std::string("remote"));
  snapshot();
}

RemoteSession::~RemoteSession() {
  try {
    close();
  } catch (...) {
  }
}

void RemoteSession::close() {
  auto guard = lock();
  if (closed_) return;
  closed_ = true;
  try {
    const long long id = next_id_++;
    transport_->write_line(json{{"id", id}, {"kind", "bye"}, {"payload", json::object()}}.dump());
    transport_->read_line(std::chrono::milliseconds(2000));
  } catch (const Error &) {
  }
}

std::vector<json> RemoteSession::call_many(const std::string &kind,
                                           const std::vector<json> &payloads) {
  auto guard = lock();
  if (closed_) throw BackendError(transport_->describe() + ": session is closed");
  std::vector<json> results(payloads.size());
  std::map<long long, size_t> pending;
  std::optional<std::pair<size_t, std::string>> server_error;
  size_t sent = 0, received = 0;
  try {
    while (received < payloads.size()) {
      while (sent < payloads.size() && pending.size() < options_.window) {
        const long long id = next_id_++;
        transport_->write_line(
            json{{"id", id}, {"kind", kind}, {"payload", payloads[sent]}}.dump());
        pending.emplace(id, sent++);
      }
      const std::string line = transport_->read_line(options_.timeout);
      json msg;
      try {
        msg = json::parse(line);
      } catch (const json::exception &) {
        protocol_error("malformed response line: " + line.substr(0, 200));
      }
      if (!msg.is_object() || !msg.contains("id") || !msg["id"].is_number_integer() ||
          !msg.contains("kind") || !msg["kind"].is_string())
        protocol_error("response must be an object with integer 'id' and string 'kind'");
      auto it = pending.find(msg["id"].get<long long>());
      if (it == pending.end())
        protocol_error("response id " + msg["id"].dump() + " matches no pending request");
      const size_t index = it->second;
      pending.erase(it);
      ++received;
      const auto got = msg["kind"].get<std::string>();
      const json payload = msg.value("payload", json::object());
      if (got == "error") {
        std::string message = payload.is_object() ? payload.value("message", std::string())
                                                  : std::string();
        if (message.empty()) message = "server reported an error without a message";
        if (!server_error || index < server_error->first) server_error.emplace(index, message);
        continue;
      }
      if (got != kind) protocol_error("expected a '" + kind + "' response, got '" + got + "'");
      if (!payload.is_object()) protocol_error(kind + " response payload must be an object");
      results[index] = payload;
    }
  } catch (const BackendError &) {
    // The stream position is unknown now; refuse further use.
    closed_ = true;
    throw;
  }
  if (server_error) throw BackendError(server_error->second);
  return results;
}

json RemoteSession::call(const std::string &kind, const json &payload) {
  return call_many(kind, {payload}).front();
}

void RemoteSession::activate(const std::string &checkpoint) {
  auto guard = lock();
  if (active_ == checkpoint) return;
  call("restore", {{"checkpoint", checkpoint}});
  active_ = checkpoint;
}

std::string RemoteSession::snapshot() {
  auto guard = lock();
  // The live weights now carry this name.
  active_ = field<std::string>(call("checkpoint", json::object()), "checkpoint", "checkpoint");
  return active_;
}

RemoteModel::RemoteModel(std::shared_ptr<RemoteSession> session, std::string checkpoint)
    : session_(std::move(session)), checkpoint_(std::move(checkpoint)) {}

std::string RemoteModel::identifier() const { return session_->model_name(); }
const Vocab &RemoteModel::vocab() const { return session_->vocab(); }
bool RemoteModel::trainable() const { return session_->trainable(); }

std::vector<double> RemoteModel::next_token_logprobs(const RenderedInput &input,
                                                     std::span<const TokenId> prefix) const {
  const TokenSeq p(prefix.begin(), prefix.end());
  return next_token_logprobs_batch(input, std::span<const TokenSeq>(&p, 1)).front();
}

std::vector<std::vector<double>> RemoteModel::next_token_logprobs_batch(
    const RenderedInput &input, std::span<const TokenSeq> prefixes) const {
  for (const auto &p : prefixes) vocab().check_ids(p);
  std::vector<json> payloads;
  const size_t step = session_->options().max_batch;
  for (size_t start = 0; start < prefixes.size(); start += step) {
    const auto chunk = prefixes.subspan(start, std::min(step, prefixes.size() - start));
    payloads.push_back({{"input", input.text}, {"prefixes", prefix_list(chunk)}});
  }
  std::vector<json> replies;
  {
    auto guard = session_->lock();
    session_->activate(checkpoint_);
    replies = session_->call_many("logprobs", payloads);
  }
  std::vector<std::vector<double>> out;
  out.reserve(prefixes.size());
  for (size_t r = 0; r < replies.size(); ++r) {
    const auto rows = field<json>(replies[r], "logprobs", "logprobs");
    const size_t expect = payloads[r]["prefixes"].size();
    if (!rows.is_array() || rows.size() != expect)
      protocol_error("logprobs response has " + std::to_string(rows.size()) + " rows, expected " +
                     std::to_string(expect));
    for (const auto &row : rows) out.push_back(decode_logprobs(row, vocab().size()));
  }
  return out;
}

double RemoteModel::sequence_logprob(const RenderedInput &input,
                                     std::span<const TokenId> target) const {
  check_target(target);
  std::vector<TokenSeq> prefixes;
  for (size_t j = 0; j < target.size(); ++j) prefixes.emplace_back(target.begin(), target.begin() + j);
  const auto rows = next_token_logprobs_batch(input, prefixes);
  double total = 0.0;
  for (size_t j = 0; j < target.size(); ++j) total += rows[j][static_cast<size_t>(target[j])];
  return total;
}

TokenSeq RemoteModel::encode(std::string_view text) const {
  const auto reply = session_->call("tokenize", {{"text", std::string(text)}});
  const auto ids = field<TokenSeq>(reply, "ids", "tokenize");
  vocab().check_ids(ids);
  if (ids.empty()) throw DataError("label sequence must be non-empty");
  for (TokenId id : ids)
    if (vocab().is_special(id))
      throw DataError("label text '" + std::string(text) + "' tokenizes to a special token");
  return ids;
}

std::string RemoteModel::decode(std::span<const TokenId> ids) const {
  const auto reply = session_->call("detokenize", {{"ids", TokenSeq(ids.begin(), ids.end())}});
  return field<std::string>(reply, "text", "detokenize");
}

std::unique_ptr<LanguageModel> RemoteModel::clone() const {
  return std::make_unique<RemoteModel>(session_, checkpoint_);
}

double RemoteModel::train_step(std::span<const TrainingPair> batch, double learning_rate) {
  if (!trainable())
    throw UsageError("remote model '" + identifier() + "' does not support fine-tuning");
  json examples = json::array();
  for (const auto &p : batch) {
    if (p.target.empty()) throw DataError("label sequence must be non-empty");
    vocab().check_ids(p.target);
    examples.push_back({{"input", p.input.text}, {"target", p.target}});
  }
  auto guard = session_->lock();
  session_->activate(checkpoint_);
  const auto reply =
      session_->call("finetune", {{"examples", examples}, {"learning_rate", learning_rate}});
  const double l = field<double>(reply, "loss", "finetune");
  // The session's live weights now hold the update; name them.
  checkpoint_ = session_->snapshot();
  return l;
}

double RemoteModel::loss(std::span<const TrainingPair> pairs) const {
  if (pairs.empty()) throw UsageError("loss over an empty set of pairs");
  double total = 0.0;
  size_t tokens = 0;
  const TokenId eos = vocab().specials().eos;
  for (const auto &p : pairs) {
    TokenSeq full = p.target;
    full.push_back(eos);
    total -= sequence_logprob(p.input, full);
    tokens += full.size();
  }
  return total / static_cast<double>(tokens);
}

void RemoteModel::save(const std::string &path) const {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write checkpoint reference '" + path + "'");
  out << json{{"format", "labelseq-remote/1"},
              {"model", identifier()},
              {"checkpoint", checkpoint_}}
             .dump()
      << '\n';
}

std::unique_ptr<RemoteModel> connect_remote(std::unique_ptr<Transport> transport,
                                            const RemoteOptions &options) {
  auto session = std::make_shared<RemoteSession>(std::move(transport), options);
  std::string base = session->active();
  return std::make_unique<RemoteModel>(std::move(session), std::move(base));
}

std::unique_ptr<RemoteModel> connect_remote(const std::string &endpoint,
                                            const RemoteOptions &options) {
  return connect_remote(open_transport(endpoint), options);
}

}  // namespace labelseq
