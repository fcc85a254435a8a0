// include/labelseq/pipeline_inl.h

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

#ifndef LABELSEQ_PIPELINE_INL_H_
#define LABELSEQ_PIPELINE_INL_H_

#include <chrono>
#include <exception>
#include <new>
#include <type_traits>

#include "labelseq/error.h"

namespace labelseq {

template <typename Fn>
auto run_stage(const std::string &name, std::vector<StageTiming> *timings, Fn &&fn)
    -> decltype(fn()) {
  const auto start = std::chrono::steady_clock::now();
  auto record = [&] {
    if (timings)
      timings->push_back(
          {name, std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count()});
  };
  try {
    if constexpr (std::is_void_v<decltype(fn())>) {
      fn();
      record();
    } else {
      auto out = fn();
      record();
      return out;
    }
  } catch (const StageError &) {
    throw;
  } catch (const Error &e) {
    throw StageError(name, e);
  } catch (const std::bad_alloc &) {
    throw StageError(name, InternalError("out of memory"));
  } catch (const std::exception &e) {
    throw StageError(name, InternalError(e.what()));
  }
}

}  // namespace labelseq

#endif  // LABELSEQ_PIPELINE_INL_H_
