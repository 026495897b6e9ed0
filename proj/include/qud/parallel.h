// Copyright 2026 The qudsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef QUD_PARALLEL_H
#define QUD_PARALLEL_H

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace qud {

/// Attempts per reduction chunk. Fixed so that chunk boundaries, and hence
/// floating-point summation order, never depend on the worker count.
inline constexpr size_t kChunkSize = 1024;

inline size_t chunk_count(size_t n) { return (n + kChunkSize - 1) / kChunkSize; }

/// Calls fn(chunk) for every chunk in [0, n_chunks) on up to `workers`
/// threads. fn must only write state owned by its chunk. The first exception
/// thrown by any call is rethrown after all threads join.
template <typename Fn>
void for_each_chunk(size_t n_chunks, unsigned workers, Fn &&fn) {
    workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(std::max<size_t>(n_chunks, 1))));
    if (workers == 1) {
        for (size_t c = 0; c < n_chunks; ++c) {
            fn(c);
        }
        return;
    }
    std::atomic<size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (size_t c = next.fetch_add(1); c < n_chunks; c = next.fetch_add(1)) {
                try {
                    fn(c);
                } catch (...) {
                    std::lock_guard lock(error_mutex);
                    if (!error) {
                        error = std::current_exception();
                    }
                }
            }
        });
    }
    for (auto &t : pool) {
        t.join();
    }
    if (error) {
        std::rethrow_exception(error);
    }
}

}  // namespace qud

#endif
