// Copyright 2026 The qaipf Authors
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

#ifndef QAIPF_PARALLEL_HPP
#define QAIPF_PARALLEL_HPP

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace qaipf {

/// Worker count used when the caller passes 0: $QAIPF_WORKERS, else the hardware concurrency.
[[nodiscard]] inline unsigned default_workers() {
  if (const char* env = std::getenv("QAIPF_WORKERS"); env != nullptr) {
    try {
      const long v = std::stol(env);
      if (v > 0) {
        return static_cast<unsigned>(v);
      }
    } catch (const std::exception&) {
    }
  }
  return std::max(1U, std::thread::hardware_concurrency());
}

/**
 * Calls body(i) for i in [0, count) on up to `workers` threads. Work items are
 * claimed dynamically; bodies must write only to slot i of pre-sized outputs,
 * which keeps results independent of the worker count. The first exception
 * thrown by any body is rethrown after all threads join.
 */
template <typename Body>
void parallel_for(std::size_t count, unsigned workers, Body&& body) {
  if (workers == 0) {
    workers = default_workers();
  }
  const auto threads = static_cast<std::size_t>(std::min<std::size_t>(workers, count));
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) {
      body(i);
    }
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) {
        return;
      }
      try {
        body(i);
      } catch (...) {
        const std::lock_guard lock(failure_mutex);
        if (!failure) {
          failure = std::current_exception();
        }
        next.store(count);
        return;
      }
    }
  };
  {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (std::size_t t = 0; t < threads; ++t) {
      pool.emplace_back(worker);
    }
  }
  if (failure) {
    std::rethrow_exception(failure);
  }
}

}  // namespace qaipf

#endif  // QAIPF_PARALLEL_HPP
