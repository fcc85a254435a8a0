// tools/fake_model_server.cc

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

// Conformance server for the remote model protocol. Serves a tabular model
// (or a uniform one) over stdio or a single TCP connection. Fine-tuning adds
// per-context logit offsets trained by SGD, so checkpoint/restore has real
// state to save.
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cmath>
#include <cstdio>
#include <iostream>
#include <limits>
#include <map>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "labelseq/error.h"
#include "labelseq/remote.h"
#include "labelseq/tabular_model.h"

namespace {

using labelseq::TokenId;
using labelseq::TokenSeq;
using nlohmann::json;

struct Options {
  std::string model_path;
  size_t uniform = 0;
  std::string version{labelseq::kProtocolVersion};
  bool malformed = false;
  bool send_tokens = false;
  int tcp_port = -1;
};

class Server {
 public:
  Server(std::unique_ptr<labelseq::TabularModel> model, Options options)
      : model_(std::move(model)), opt_(std::move(options)) {}

  // Returns false once the client said bye.
  bool handle(const std::string &line, std::string &reply) {
    long long id = 0;
    std::string kind;
    try {
      const json msg = json::parse(line);
      id = msg.at("id").get<long long>();
      kind = msg.at("kind").get<std::string>();
      const json payload = msg.value("payload", json::object());
      if (opt_.malformed && kind == "logprobs") {
        reply = "{\"id\": " + std::to_string(id) + ", \"kind\": \"logprobs\", \"payload\": [";
        return true;
      }
      reply = json{{"id", id}, {"kind", kind}, {"payload", dispatch(kind, payload)}}.dump();
      return kind != "bye";
    } catch (const std::exception &e) {
      reply = json{{"id", id}, {"kind", "error"}, {"payload", {{"message", e.what()}}}}.dump();
      return true;
    }
  }

 private:
  using Offsets = std::map<TokenSeq, std::vector<double>>;

  const labelseq::Vocab &vocab() const { return model_->vocab(); }

  static TokenSeq context_of(std::span<const TokenId> prefix) {
    const size_t keep = std::min<size_t>(2, prefix.size());
    return TokenSeq(prefix.end() - static_cast<std::ptrdiff_t>(keep), prefix.end());
  }

  std::vector<double> logprobs(const labelseq::RenderedInput &in,
                               std::span<const TokenId> prefix) const {
    auto lp = model_->next_token_logprobs(in, prefix);
    auto it = offsets_.find(context_of(prefix));
    if (it == offsets_.end()) return lp;
    for (size_t i = 0; i < lp.size(); ++i)
      if (std::isfinite(lp[i])) lp[i] += it->second[i];
    const double z = labelseq::logsumexp(lp);
    for (double &v : lp) v -= z;
    return lp;
  }

  json dispatch(const std::string &kind, const json &p) {
    if (kind == "hello") {
      json out = {{"version", opt_.version},
                  {"model", model_->identifier()},
                  {"vocab_size", vocab().size()},
                  {"special",
                   {{"pad", vocab().specials().pad},
                    {"eos", vocab().specials().eos},
                    {"mask", vocab().specials().mask},
                    {"unk", vocab().specials().unk}}},
                  {"trainable", true}};
      if (opt_.send_tokens) out["tokens"] = vocab().tokens();
      return out;
    }
    if (kind == "tokenize") {
      TokenSeq ids;
      for (const auto &w : labelseq::split_words(p.at("text").get<std::string>())) {
        auto id = vocab().find(w);
        if (!id) throw std::runtime_error("unknown word '" + w + "'");
        ids.push_back(*id);
      }
      return {{"ids", ids}};
    }
    if (kind == "detokenize") {
      std::vector<std::string> words;
      for (TokenId id : p.at("ids").get<TokenSeq>()) words.push_back(vocab().token(id));
      return {{"text", labelseq::join_words(words)}};
    }
    if (kind == "logprobs") {
      const auto in = labelseq::rendered_from_text(p.at("input").get<std::string>());
      json rows = json::array();
      for (const auto &prefix : p.at("prefixes")) {
        const auto ids = prefix.get<TokenSeq>();
        vocab().check_ids(ids);
        json row = json::array();
        for (double v : logprobs(in, ids)) row.push_back(std::isfinite(v) ? json(v) : json());
        rows.push_back(std::move(row));
      }
      return {{"logprobs", rows}};
    }
    if (kind == "finetune") return {{"loss", finetune(p)}};
    if (kind == "checkpoint") {
      const std::string name = "ckpt-" + std::to_string(saved_.size());
      saved_[name] = offsets_;
      return {{"checkpoint", name}};
    }
    if (kind == "restore") {
      const auto name = p.at("checkpoint").get<std::string>();
      auto it = saved_.find(name);
      if (it == saved_.end()) throw std::runtime_error("unknown checkpoint '" + name + "'");
      offsets_ = it->second;
      return json::object();
    }
    if (kind == "bye") return json::object();
    throw std::runtime_error("unknown request kind '" + kind + "'");
  }

  double finetune(const json &p) {
    const double lr = p.at("learning_rate").get<double>();
    struct Step {
      labelseq::RenderedInput in;
      TokenSeq prefix;
      TokenId next;
    };
    std::vector<Step> steps;
    for (const auto &e : p.at("examples")) {
      const auto in = labelseq::rendered_from_text(e.at("input").get<std::string>());
      TokenSeq target = e.at("target").get<TokenSeq>();
      vocab().check_ids(target);
      target.push_back(vocab().specials().eos);
      for (size_t j = 0; j < target.size(); ++j)
        steps.push_back({in, TokenSeq(target.begin(), target.begin() + static_cast<std::ptrdiff_t>(j)),
                         target[j]});
    }
    if (steps.empty()) throw std::runtime_error("finetune needs at least one example");
    const double scale = 1.0 / static_cast<double>(steps.size());
    Offsets grads;
    double loss = 0.0;
    for (const auto &s : steps) {
      const auto lp = logprobs(s.in, s.prefix);
      loss -= lp[static_cast<size_t>(s.next)] * scale;
      auto &g = grads[context_of(s.prefix)];
      g.resize(lp.size(), 0.0);
      for (size_t i = 0; i < lp.size(); ++i)
        if (std::isfinite(lp[i])) g[i] += scale * std::exp(lp[i]);
      g[static_cast<size_t>(s.next)] -= scale;
    }
    for (const auto &[ctx, g] : grads) {
      auto &o = offsets_[ctx];
      o.resize(g.size(), 0.0);
      for (size_t i = 0; i < g.size(); ++i) o[i] -= lr * g[i];
    }
    return loss;
  }

  std::unique_ptr<labelseq::TabularModel> model_;
  Options opt_;
  Offsets offsets_;
  std::map<std::string, Offsets> saved_;
};

void serve_stream(Server &server, std::istream &in, std::ostream &out) {
  std::string line, reply;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const bool more = server.handle(line, reply);
    out << reply << '\n' << std::flush;
    if (!more) return;
  }
}

int serve_tcp(Server &server, int port) {
  const int listener = ::socket(AF_INET, SOCK_STREAM, 0);
  int yes = 1;
  ::setsockopt(listener, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof yes);
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
  addr.sin_port = htons(static_cast<uint16_t>(port));
  if (::bind(listener, reinterpret_cast<sockaddr *>(&addr), sizeof addr) != 0 ||
      ::listen(listener, 1) != 0) {
    std::perror("bind");
    return 3;
  }
  socklen_t len = sizeof addr;
  ::getsockname(listener, reinterpret_cast<sockaddr *>(&addr), &len);
  std::cout << "listening " << ntohs(addr.sin_port) << std::endl;
  const int conn = ::accept(listener, nullptr, nullptr);
  ::close(listener);
  if (conn < 0) return 3;
  std::string buffer, reply;
  char chunk[65536];
  for (;;) {
    const ssize_t n = ::read(conn, chunk, sizeof chunk);
    if (n <= 0) break;
    buffer.append(chunk, static_cast<size_t>(n));
    size_t nl;
    while ((nl = buffer.find('\n')) != std::string::npos) {
      const std::string line = buffer.substr(0, nl);
      buffer.erase(0, nl + 1);
      const bool more = server.handle(line, reply);
      reply += '\n';
      if (::send(conn, reply.data(), reply.size(), MSG_NOSIGNAL) < 0) break;
      if (!more) {
        ::close(conn);
        return 0;
      }
    }
  }
  ::close(conn);
  return 0;
}

}  // namespace

int main(int argc, char **argv) {
  Options opt;
  CLI::App app{"Model server speaking the labelseq remote protocol"};
  auto *model_opt = app.add_option("--model", opt.model_path, "tabular model JSON");
  app.add_option("--uniform", opt.uniform, "serve a uniform model over N content tokens")
      ->excludes(model_opt);
  app.add_option("--version", opt.version, "protocol version to announce");
  app.add_flag("--malformed", opt.malformed, "answer logprobs with broken JSON");
  app.add_flag("--send-tokens", opt.send_tokens, "include token strings in hello");
  app.add_option("--tcp", opt.tcp_port, "listen on this loopback port (0 picks one)");
  CLI11_PARSE(app, argc, argv);

  std::unique_ptr<labelseq::TabularModel> model;
  try {
    if (!opt.model_path.empty()) {
      model = std::make_unique<labelseq::TabularModel>(labelseq::TabularModel::load(opt.model_path));
    } else {
      std::vector<std::string> words;
      for (size_t i = 0; i < std::max<size_t>(opt.uniform, 2); ++i) words.push_back("w" + std::to_string(i));
      model = std::make_unique<labelseq::TabularModel>(labelseq::Vocab::with_specials(words), "uniform");
    }
  } catch (const std::exception &e) {
    // Load failure: one error response, then exit.
    std::cout << json{{"id", 0}, {"kind", "error"}, {"payload", {{"message", e.what()}}}}.dump()
              << std::endl;
    return 2;
  }
  Server server(std::move(model), opt);
  if (opt.tcp_port >= 0) return serve_tcp(server, opt.tcp_port);
  serve_stream(server, std::cin, std::cout);
  return 0;
}
