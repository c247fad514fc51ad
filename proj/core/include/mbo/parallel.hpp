// parallel_for over an index range.  Work items write to disjoint slots so
// results do not depend on the thread count; any reduction is done by the
// caller in index order afterwards.
#pragma once

#include <algorithm>
#include <functional>
#include <thread>
#include <vector>

namespace mbo {

inline int default_thread_count() {
    const unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1 : static_cast<int>(hc);
}

template <class Fn>
void parallel_for(long long begin, long long end, int threads, Fn&& fn) {
    const long long count = end - begin;
    if (count <= 0) return;
    threads = static_cast<int>(
        std::max<long long>(1, std::min<long long>(threads, count)));
    if (threads == 1) {
        for (long long i = begin; i < end; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(threads));
    const long long chunk = (count + threads - 1) / threads;
    for (int t = 0; t < threads; ++t) {
        const long long lo = begin + t * chunk;
        const long long hi = std::min(end, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([lo, hi, &fn] {
            for (long long i = lo; i < hi; ++i) fn(i);
        });
    }
    for (auto& th : pool) th.join();
}

}  // namespace mbo
