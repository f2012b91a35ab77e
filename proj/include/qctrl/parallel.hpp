// Copyright 2026 The qctrl Authors
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

#pragma once

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <cstring>
#include <exception>
#include <functional>
#include <thread>
#include <vector>

namespace qctrl {

/// True when QCTRL_DETERMINISTIC=1: everything runs on the calling thread
/// and wall-clock fields are written as zero.
inline bool deterministic_mode() {
  const char* v = std::getenv("QCTRL_DETERMINISTIC");
  return v != nullptr && std::strcmp(v, "1") == 0;
}

/// Requested thread count clamped to the hardware; 0 means "all cores".
inline int resolve_threads(int requested) {
  if (deterministic_mode()) return 1;
  const int hw = std::max(1u, std::thread::hardware_concurrency());
  return requested <= 0 ? hw : std::min(requested, hw);
}

/// Runs fn(i) for i in [0, count) on up to `threads` threads. Results must be
/// written to per-index slots. The first exception is rethrown after all
/// workers have joined.
inline void parallel_for(int count, int threads, const std::function<void(int)>& fn) {
  threads = std::clamp(threads, 1, std::max(count, 1));
  if (threads == 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::exception_ptr> errors(count);
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (int i = next++; i < count; i = next++) {
        try {
          fn(i);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace qctrl
