#pragma once

// Chunked parallel loop over independent items; results must be written to
// disjoint slots so the merge is deterministic regardless of thread count.

#include <algorithm>
#include <cstddef>
#include <thread>
#include <vector>

namespace nibc {

template <class Fn>
void parallel_for(std::size_t count, int threads, const Fn& fn) {
  if (threads <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  const int nt = static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(threads), count));
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(nt));
  for (int t = 0; t < nt; ++t) {
    pool.emplace_back([&, t]() {
      for (std::size_t i = static_cast<std::size_t>(t); i < count;
           i += static_cast<std::size_t>(nt))
        fn(i);
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace nibc
