// include/labelseq/error.h

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

#ifndef LABELSEQ_ERROR_H_
#define LABELSEQ_ERROR_H_

#include <stdexcept>
#include <string>

namespace labelseq {

// Error categories line up with the CLI exit codes (1 usage, 2 data,
// 3 backend/transport, 4 internal).
enum class ErrorKind { kUsage = 1, kData = 2, kBackend = 3, kInternal = 4 };

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string &what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

class UsageError : public Error {
 public:
  explicit UsageError(const std::string &what) : Error(ErrorKind::kUsage, what) {}
};

class DataError : public Error {
 public:
  explicit DataError(const std::string &what) : Error(ErrorKind::kData, what) {}
};

// Transport failures, protocol violations and errors reported by a model
// server.
class BackendError : public Error {
 public:
  explicit BackendError(const std::string &what)
      : Error(ErrorKind::kBackend, what) {}
};

class InternalError : public Error {
 public:
  explicit InternalError(const std::string &what)
      : Error(ErrorKind::kInternal, what) {}
};

// Wraps an error raised inside one pipeline stage; keeps the original kind.
class StageError : public Error {
 public:
  StageError(const std::string &stage, const Error &cause)
      : Error(cause.kind(), "stage '" + stage + "': " + cause.what()),
        stage_(stage) {}
  const std::string &stage() const { return stage_; }

 private:
  std::string stage_;
};

}  // namespace labelseq

#endif  // LABELSEQ_ERROR_H_
