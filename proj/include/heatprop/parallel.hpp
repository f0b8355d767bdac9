#pragma once

#include <cstddef>
#include <thread>
#include <vector>

namespace heatprop {

/// Run fn(i) for i in [0, count) on up to `threads` workers.  Iterations
/// must be independent; each writes only its own output slot, so results
/// are identical for any thread count.
template <class Fn>
void parallel_for(std::size_t count, int threads, Fn&& fn) {
    if (threads <= 1 || count <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    const std::size_t workers =
        std::min<std::size_t>(static_cast<std::size_t>(threads), count);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w]() {
            for (std::size_t i = w; i < count; i += workers) fn(i);
        });
    }
    for (auto& th : pool) th.join();
}

}  // namespace heatprop
