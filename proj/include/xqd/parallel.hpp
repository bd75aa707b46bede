#pragma once

/// \file parallel.hpp
/// Minimal deterministic fork-join helper.  Work items are split into
/// contiguous index chunks, one per worker; results must be written by index
/// into caller-owned storage, so the output is identical regardless of the
/// worker count or scheduling order.

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace xqd {

/// Invoke fn(i) for i in [0, n) from a pool of worker threads.  fn must be
/// safe to run concurrently for distinct i and should store its result by
/// index.  The first exception thrown by any worker is rethrown on the
/// calling thread after all workers join.
template <class Fn>
inline void parallel_for(std::size_t n, Fn&& fn, unsigned workers = 0) {
    if (n == 0) return;
    unsigned hw = workers ? workers : std::thread::hardware_concurrency();
    if (hw == 0) hw = 1;
    const unsigned count = static_cast<unsigned>(std::min<std::size_t>(hw, n));
    if (count <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(count);
    const std::size_t chunk = (n + count - 1) / count;
    for (unsigned w = 0; w < count; ++w) {
        const std::size_t lo = w * chunk;
        const std::size_t hi = std::min(n, lo + chunk);
        pool.emplace_back([&, lo, hi, w] {
            try {
                for (std::size_t i = lo; i < hi; ++i) fn(i);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (std::thread& t : pool) t.join();
    for (const std::exception_ptr& e : errors)
        if (e) std::rethrow_exception(e);
}

}  // namespace xqd
