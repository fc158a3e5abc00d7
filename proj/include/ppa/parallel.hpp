#pragma once

#include <algorithm>
#include <exception>
#include <thread>
#include <vector>

namespace ppa {

inline int default_threads() {
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : int(hw);
}

// Runs fn(i) for i in [0, count), split into contiguous chunks across
// `threads` workers. Callers store per-index results and reduce them in
// index order afterwards, so the outcome does not depend on the thread
// count. The first exception thrown by any worker is rethrown.
template <class Fn>
void parallel_for(long count, int threads, Fn&& fn) {
    if (count <= 0) return;
    threads = int(std::max<long>(1, std::min<long>(threads, count)));
    if (threads == 1) {
        for (long i = 0; i < count; ++i) fn(i);
        return;
    }
    std::vector<std::thread> workers;
    std::vector<std::exception_ptr> errors(threads);
    const long chunk = (count + threads - 1) / threads;
    for (int t = 0; t < threads; ++t) {
        const long lo = t * chunk;
        const long hi = std::min(count, lo + chunk);
        workers.emplace_back([&, t, lo, hi] {
            try {
                for (long i = lo; i < hi; ++i) fn(i);
            } catch (...) {
                errors[t] = std::current_exception();
            }
        });
    }
    for (auto& w : workers) w.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

}  // namespace ppa
