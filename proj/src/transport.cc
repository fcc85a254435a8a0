// src/transport.cc

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

#include <fcntl.h>
#include <netdb.h>
#include <poll.h>
#include <signal.h>
#include <sys/socket.h>
#include <sys/types.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <ctime>

#include "labelseq/error.h"
#include "labelseq/remote.h"

namespace labelseq {

namespace {

std::string errno_text() { return std::strerror(errno); }

// Writes everything, turning a closed peer into an error instead of SIGPIPE.
void write_all(int fd, const std::string &data, bool socket, const std::string &who) {
  sigset_t pipe_set, old_set;
  sigemptyset(&pipe_set);
  sigaddset(&pipe_set, SIGPIPE);
  pthread_sigmask(SIG_BLOCK, &pipe_set, &old_set);
  size_t done = 0;
  int failure = 0;
  while (done < data.size()) {
    const ssize_t n = socket ? ::send(fd, data.data() + done, data.size() - done, MSG_NOSIGNAL)
                             : ::write(fd, data.data() + done, data.size() - done);
    if (n < 0) {
      if (errno == EINTR) continue;
      failure = errno;
      break;
    }
    done += static_cast<size_t>(n);
  }
  if (failure == EPIPE) {
    const timespec zero{0, 0};
    while (sigtimedwait(&pipe_set, nullptr, &zero) > 0) {
    }
  }
  pthread_sigmask(SIG_SETMASK, &old_set, nullptr);
  if (failure != 0)
    throw BackendError(who + ": write failed: " + std::strerror(failure));
}

class FdReader {
 public:
  std::string read_line(int fd, std::chrono::milliseconds timeout, const std::string &who) {
    const auto deadline = std::chrono::steady_clock::now() + timeout;
    for (;;) {
      const auto nl = buffer_.find('\n');
      if (nl != std::string::npos) {
        std::string line = buffer_.substr(0, nl);
        buffer_.erase(0, nl + 1);
        if (!line.empty() && line.back() == '\r') line.pop_back();
        return line;
      }
      const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(
          deadline - std::chrono::steady_clock::now());
      if (left.count() <= 0) throw BackendError(who + ": timed out waiting for a response");
      pollfd p{fd, POLLIN, 0};
      const int r = ::poll(&p, 1, static_cast<int>(left.count()));
      if (r < 0) {
        if (errno == EINTR) continue;
        throw BackendError(who + ": poll failed: " + errno_text());
      }
      if (r == 0) continue;
      char chunk[65536];
      const ssize_t n = ::read(fd, chunk, sizeof chunk);
      if (n < 0) {
        if (errno == EINTR) continue;
        throw BackendError(who + ": read failed: " + errno_text());
      }
      if (n == 0) throw BackendError(who + ": server closed the connection");
      buffer_.append(chunk, static_cast<size_t>(n));
    }
  }

 private:
  std::string buffer_;
};

class ExecTransport final : public Transport {
 public:
  explicit ExecTransport(const std::string &command) : command_(command) {
    int to_child[2], from_child[2];
    if (::pipe2(to_child, O_CLOEXEC) != 0) throw BackendError("pipe: " + errno_text());
    if (::pipe2(from_child, O_CLOEXEC) != 0) {
      ::close(to_child[0]);
      ::close(to_child[1]);
      throw BackendError("pipe: " + errno_text());
    }
    pid_ = ::fork();
    if (pid_ < 0) throw BackendError("fork: " + errno_text());
    if (pid_ == 0) {
      ::dup2(to_child[0], STDIN_FILENO);
      ::dup2(from_child[1], STDOUT_FILENO);
      ::execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char *>(nullptr));
      ::_exit(127);
    }
    ::close(to_child[0]);
    ::close(from_child[1]);
    in_ = to_child[1];
    out_ = from_child[0];
  }

  ~ExecTransport() override {
    if (in_ >= 0) ::close(in_);
    if (out_ >= 0) ::close(out_);
    // Give the server a moment to exit after its stdin closes.
    for (int i = 0; i < 200; ++i) {
      int status = 0;
      const pid_t r = ::waitpid(pid_, &status, WNOHANG);
      if (r == pid_ || r < 0) return;
      ::usleep(10000);
    }
    ::kill(pid_, SIGKILL);
    ::waitpid(pid_, nullptr, 0);
  }

  void write_line(const std::string &line) override {
    write_all(in_, line + "\n", false, describe());
  }

  std::string read_line(std::chrono::milliseconds timeout) override {
    return reader_.read_line(out_, timeout, describe());
  }

  std::string describe() const override { return "exec:" + command_; }

 private:
  std::string command_;
  pid_t pid_ = -1;
  int in_ = -1, out_ = -1;
  FdReader reader_;
};

class TcpTransport final : public Transport {
 public:
  TcpTransport(const std::string &host, const std::string &port) : where_(host + ":" + port) {
    addrinfo hints{};
    hints.ai_family = AF_UNSPEC;
    hints.ai_socktype = SOCK_STREAM;
    addrinfo *found = nullptr;
    const int rc = ::getaddrinfo(host.c_str(), port.c_str(), &hints, &found);
    if (rc != 0)
      throw BackendError("tcp:" + where_ + ": cannot resolve: " + gai_strerror(rc));
    std::string last = "no addresses";
    for (addrinfo *a = found; a != nullptr; a = a->ai_next) {
      const int fd = ::socket(a->ai_family, a->ai_socktype | SOCK_CLOEXEC, a->ai_protocol);
      if (fd < 0) {
        last = errno_text();
        continue;
      }
      if (::connect(fd, a->ai_addr, a->ai_addrlen) == 0) {
        fd_ = fd;
        break;
      }
      last = errno_text();
      ::close(fd);
    }
    ::freeaddrinfo(found);
    if (fd_ < 0) throw BackendError("tcp:" + where_ + ": cannot connect: " + last);
  }

  ~TcpTransport() override {
    if (fd_ >= 0) ::close(fd_);
  }

  void write_line(const std::string &line) override {
    write_all(fd_, line + "\n", true, describe());
  }

  std::string read_line(std::chrono::milliseconds timeout) override {
    return reader_.read_line(fd_, timeout, describe());
  }

  std::string describe() const override { return "tcp:" + where_; }

 private:
  std::string where_;
  int fd_ = -1;
  FdReader reader_;
};

}  // namespace

std::unique_ptr<Transport> open_transport(const std::string &endpoint) {
  if (endpoint.rfind("exec:", 0) == 0) {
    const std::string command = endpoint.substr(5);
    if (command.empty()) throw UsageError("empty command in endpoint '" + endpoint + "'");
    return std::make_unique<ExecTransport>(command);
  }
  if (endpoint.rfind("tcp:", 0) == 0) {
    const std::string rest = endpoint.substr(4);
    const auto colon = rest.rfind(':');
    if (colon == std::string::npos || colon == 0 || colon + 1 == rest.size())
      throw UsageError("expected tcp:<host>:<port>, got '" + endpoint + "'");
    return std::make_unique<TcpTransport>(rest.substr(0, colon), rest.substr(colon + 1));
  }
  throw UsageError("unknown endpoint '" + endpoint +
                   "' (expected exec:<command> or tcp:<host>:<port>)");
}

void RecordingTransport::write_line(const std::string &line) {
  {
    std::lock_guard lock(mu_);
    entries_.push_back({true, line});
  }
  inner_->write_line(line);
}

std::string RecordingTransport::read_line(std::chrono::milliseconds timeout) {
  std::string line = inner_->read_line(timeout);
  std::lock_guard lock(mu_);
  entries_.push_back({false, line});
  return line;
}

std::vector<RecordingTransport::Entry> RecordingTransport::entries() const {
  std::lock_guard lock(mu_);
  return entries_;
}

void ReplayTransport::write_line(const std::string &line) {
  std::lock_guard lock(mu_);
  if (next_ >= script_.size() || !script_[next_].sent)
    throw BackendError("replay: unexpected request " + line);
  if (script_[next_].line != line)
    throw BackendError("replay: request " + std::to_string(next_) + " differs\n  expected " +
                       script_[next_].line + "\n  got      " + line);
  ++next_;
}

std::string ReplayTransport::read_line(std::chrono::milliseconds) {
  std::lock_guard lock(mu_);
  if (next_ >= script_.size() || script_[next_].sent)
    throw BackendError("replay: no recorded response at entry " + std::to_string(next_));
  return script_[next_++].line;
}

bool ReplayTransport::finished() const {
  std::lock_guard lock(mu_);
  return next_ == script_.size();
}

}  // namespace labelseq
