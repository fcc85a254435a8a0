// include/labelseq/remote.h

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

#ifndef LABELSEQ_REMOTE_H_
#define LABELSEQ_REMOTE_H_

#include <chrono>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "labelseq/model.h"

namespace labelseq {

inline constexpr std::string_view kProtocolVersion = "autoseq-proto/1";

// A bidirectional line stream. Lines carry no trailing newline.
class Transport {
 public:
  virtual ~Transport() = default;
  virtual void write_line(const std::string &line) = 0;
  // Throws BackendError on timeout or when the peer closes the stream.
  virtual std::string read_line(std::chrono::milliseconds timeout) = 0;
  virtual std::string describe() const = 0;
};

// "exec:<shell command>" spawns the command and talks over its stdin/stdout;
// "tcp:<host>:<port>" connects to a listening server.
std::unique_ptr<Transport> open_transport(const std::string &endpoint);

// Forwards to `inner` and keeps every line in both directions.
class RecordingTransport final : public Transport {
 public:
  struct Entry {
    bool sent;
    std::string line;
  };

  explicit RecordingTransport(std::unique_ptr<Transport> inner)
      : inner_(std::move(inner)) {}

  void write_line(const std::string &line) override;
  std::string read_line(std::chrono::milliseconds timeout) override;
  std::string describe() const override { return "recording " + inner_->describe(); }

  std::vector<Entry> entries() const;

 private:
  std::unique_ptr<Transport> inner_;
  mutable std::mutex mu_;
  std::vector<Entry> entries_;
};

// Plays back a recorded conversation: every written line must equal the next
// recorded request byte for byte, and reads return the recorded responses.
class ReplayTransport final : public Transport {
 public:
  explicit ReplayTransport(std::vector<RecordingTransport::Entry> script)
      : script_(std::move(script)) {}

  void write_line(const std::string &line) override;
  std::string read_line(std::chrono::milliseconds timeout) override;
  std::string describe() const override { return "replay"; }

  bool finished() const;

 private:
  mutable std::mutex mu_;
  std::vector<RecordingTransport::Entry> script_;
  size_t next_ = 0;
};

struct RemoteOptions {
  size_t max_batch = 64;  // prefixes per logprobs request
  size_t window = 4;      // requests in flight before reading responses
  std::chrono::milliseconds timeout{120000};
};

class RemoteSession;

// A model served by another process. Clones share the session and differ
// only in which server-side checkpoint they point at; the session restores
// the right checkpoint before each operation.
class RemoteModel final : public LanguageModel {
 public:
  RemoteModel(std::shared_ptr<RemoteSession> session, std::string checkpoint);

  Backend backend() const override { return Backend::kRemote; }
  std::string identifier() const override;
  const Vocab &vocab() const override;
  bool trainable() const override;

  std::vector<double> next_token_logprobs(
      const RenderedInput &input,
      std::span<const TokenId> prefix) const override;
  std::vector<std::vector<double>> next_token_logprobs_batch(
      const RenderedInput &input,
      std::span<const TokenSeq> prefixes) const override;
  double sequence_logprob(const RenderedInput &input,
                          std::span<const TokenId> target) const override;

  TokenSeq encode(std::string_view text) const override;
  std::string decode(std::span<const TokenId> ids) const override;

  std::unique_ptr<LanguageModel> clone() const override;
  double train_step(std::span<const TrainingPair> batch,
                    double learning_rate) override;
  double loss(std::span<const TrainingPair> pairs) const override;
  // Writes a reference to the server-side checkpoint; it stays valid only
  // while the session is alive.
  void save(const std::string &path) const override;

  const std::string &checkpoint() const { return checkpoint_; }
  RemoteSession &session() const { return *session_; }

 private:
  std::shared_ptr<RemoteSession> session_;
  std::string checkpoint_;
};

// Performs the hello exchange and records the base checkpoint. Throws
// BackendError when the endpoint is unreachable or speaks another version.
std::unique_ptr<RemoteModel> connect_remote(const std::string &endpoint,
                                            const RemoteOptions &options = {});
std::unique_ptr<RemoteModel> connect_remote(std::unique_ptr<Transport> transport,
                                            const RemoteOptions &options = {});

// One request/response pair per call, serialized per session.
class RemoteSession {
 public:
  RemoteSession(std::unique_ptr<Transport> transport, const RemoteOptions &options);
  ~RemoteSession();

  RemoteSession(const RemoteSession &) = delete;
  RemoteSession &operator=(const RemoteSession &) = delete;

  // Sends all payloads of one kind, keeping at most `window` requests in
  // flight, and returns the response payloads in request order. A server
  // error is rethrown (message verbatim) after the stream is drained.
  std::vector<nlohmann::json> call_many(const std::string &kind,
                                        const std::vector<nlohmann::json> &payloads);
  nlohmann::json call(const std::string &kind, const nlohmann::json &payload);

  std::unique_lock<std::recursive_mutex> lock() { return std::unique_lock(mu_); }
  // Caller holds lock().
  void activate(const std::string &checkpoint);
  std::string snapshot();

  const nlohmann::json &hello() const { return hello_; }
  const Vocab &vocab() const { return vocab_; }
  bool trainable() const { return trainable_; }
  const std::string &model_name() const { return model_name_; }
  // Checkpoint currently loaded on the server; the base one right after
  // connecting.
  const std::string &active() const { return active_; }
  const RemoteOptions &options() const { return options_; }

  void close();

 private:
  std::unique_ptr<Transport> transport_;
  RemoteOptions options_;
  std::recursive_mutex mu_;
  long long next_id_ = 1;
  nlohmann::json hello_;
  Vocab vocab_;
  bool trainable_ = false;
  std::string model_name_;
  std::string active_;
  bool closed_ = false;
};

struct ServeCheckResult {
  struct Check {
    std::string name;
    bool passed;
    std::string detail;
  };
  std::vector<Check> checks;

  bool passed() const;
  nlohmann::json to_json() const;
};

// Conformance probe for a model server: hello metadata, normalization within
// 1e-4, tokenize/detokenize round trip, checkpoint/restore score equality
// within 1e-6, and response id correlation under pipelining. Probe texts
// default to a few words detokenized from the server's own vocabulary.
ServeCheckResult serve_check(const std::string &endpoint,
                             const std::vector<std::string> &probe_texts = {});
ServeCheckResult serve_check(std::unique_ptr<Transport> transport,
                             const std::vector<std::string> &probe_texts = {});

}  // namespace labelseq

#endif  // LABELSEQ_REMOTE_H_
