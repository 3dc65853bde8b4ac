// Copyright 2026 The chisub Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace chisub {

// Resolves a requested worker count; 0 means hardware concurrency.
inline unsigned ResolveThreads(unsigned requested) {
  if (requested != 0) return requested;
  return std::max(1u, std::thread::hardware_concurrency());
}

// Runs fn(chunk_begin, chunk_end) over [0, n) split into fixed-size chunks.
// Chunk boundaries depend only on n and chunk, never on the worker count, so
// any per-chunk reduction combined in chunk order is thread-count invariant.
template <typename Fn>
void ParallelChunks(size_t n, size_t chunk, unsigned threads, Fn&& fn) {
  if (n == 0) return;
  chunk = std::max<size_t>(chunk, 1);
  const size_t num_chunks = (n + chunk - 1) / chunk;
  const unsigned workers = std::min<size_t>(ResolveThreads(threads), num_chunks);
  if (workers <= 1) {
    for (size_t c = 0; c < num_chunks; ++c) fn(c * chunk, std::min(n, (c + 1) * chunk));
    return;
  }
  std::atomic<size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mu;
  auto work = [&] {
    for (size_t c = next++; c < num_chunks; c = next++) {
      try {
        fn(c * chunk, std::min(n, (c + 1) * chunk));
      } catch (...) {
        std::lock_guard lock(error_mu);
        if (!error) error = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers - 1);
  for (unsigned t = 1; t < workers; ++t) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

// SplitMix64 finalizer.
inline uint64_t MixSeed(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Deterministic child seed for a (base, k1, k2, ...) coordinate.
template <typename... Keys>
uint64_t DeriveSeed(uint64_t base, Keys... keys) {
  uint64_t s = MixSeed(base);
  ((s = MixSeed(s ^ static_cast<uint64_t>(keys))), ...);
  return s;
}

}  // namespace chisub
