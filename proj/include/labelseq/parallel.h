// include/labelseq/parallel.h

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

#ifndef LABELSEQ_PARALLEL_H_
#define LABELSEQ_PARALLEL_H_

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace labelseq {

// Runs fn(i) for i in [0, n) on up to `workers` threads. The first exception
// thrown (lowest index wins) is rethrown after all threads join.
template <typename Fn>
void parallel_for(size_t n, size_t workers, Fn &&fn) {
  workers = std::max<size_t>(1, std::min(workers, n));
  if (workers <= 1) {
    for (size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<size_t> next{0};
  std::mutex mu;
  std::exception_ptr error;
  size_t error_index = n;
  std::vector<std::thread> pool;
  for (size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(mu);
          if (i < error_index) {
            error_index = i;
            error = std::current_exception();
          }
        }
      }
    });
  }
  for (auto &t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace labelseq

#endif  // LABELSEQ_PARALLEL_H_
