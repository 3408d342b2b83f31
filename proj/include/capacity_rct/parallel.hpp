#pragma once

#include <algorithm>
#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace capacity_rct {

// Worker cap: CAPACITY_RCT_THREADS when set, hardware concurrency otherwise.
inline unsigned thread_cap() {
    if (const char* env = std::getenv("CAPACITY_RCT_THREADS")) {
        const long parsed = std::strtol(env, nullptr, 10);
        if (parsed >= 1) return static_cast<unsigned>(parsed);
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1u : hw;
}

// Runs fn(i) for i in [0, count). Each index owns its output slot, so the
// result is identical for any worker count.
inline void parallel_for_index(int count, const std::function<void(int)>& fn) {
    if (count <= 0) return;
    const unsigned workers = std::min<unsigned>(thread_cap(), static_cast<unsigned>(count));
    if (workers <= 1) {
        for (int i = 0; i < count; ++i) fn(i);
        return;
    }
    std::vector<std::thread> threads;
    threads.reserve(workers);
    const int chunk = count / static_cast<int>(workers);
    const int remainder = count % static_cast<int>(workers);
    int start = 0;
    for (unsigned w = 0; w < workers; ++w) {
        const int end = start + chunk + (static_cast<int>(w) < remainder ? 1 : 0);
        threads.emplace_back([&fn, start, end] {
            for (int i = start; i < end; ++i) fn(i);
        });
        start = end;
    }
    for (auto& t : threads) t.join();
}

}  // namespace capacity_rct
