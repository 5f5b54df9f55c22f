// SPDX-License-Identifier: Apache-2.0
//
// Replicate-level Monte Carlo driver. Each replicate owns a generator
// derived from (seed, replicate index), so results are identical whatever
// the thread count or scheduling.

#pragma once

#include <cstdint>
#include <functional>
#include <thread>
#include <vector>

#include "bregman/random.hpp"

namespace bregman {

inline int default_worker_count() {
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

// Runs body(replicate, rng) for replicate = 0..count-1 and collects the
// results in replicate order.
template <typename Result>
std::vector<Result> run_replicates(int count, std::uint64_t seed,
                                   const std::function<Result(int, Rng&)>& body,
                                   int workers = 0) {
  if (workers <= 0) workers = default_worker_count();
  workers = std::min(workers, count > 0 ? count : 1);
  std::vector<Result> results(static_cast<std::size_t>(count));
  if (workers <= 1) {
    for (int r = 0; r < count; ++r) {
      Rng rng = Rng::for_replicate(seed, static_cast<std::uint64_t>(r));
      results[static_cast<std::size_t>(r)] = body(r, rng);
    }
    return results;
  }
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (int r = w; r < count; r += workers) {
        Rng rng = Rng::for_replicate(seed, static_cast<std::uint64_t>(r));
        results[static_cast<std::size_t>(r)] = body(r, rng);
      }
    });
  }
  for (auto& t : pool) t.join();
  return results;
}

}  // namespace bregman
