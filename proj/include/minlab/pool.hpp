#pragma once

#include <cstdlib>
#include <thread>
#include <vector>

namespace minlab {

/// Worker count: hardware concurrency, capped by the MINLAB_THREADS
/// environment variable when set.
inline int worker_count() {
    int n = static_cast<int>(std::thread::hardware_concurrency());
    if (n < 1) n = 1;
    if (const char* env = std::getenv("MINLAB_THREADS")) {
        const int cap = std::atoi(env);
        if (cap >= 1 && cap < n) n = cap;
    }
    return n;
}

/// Runs body(i) for i in [0, count). Each index owns its output slot, so
/// results are identical whatever the worker count.
template <typename Body>
void parallel_for(int count, Body&& body) {
    const int workers = std::min(worker_count(), count);
    if (workers <= 1) {
        for (int i = 0; i < count; ++i) body(i);
        return;
    }
    std::vector<std::thread> threads;
    threads.reserve(workers);
    for (int w = 0; w < workers; ++w) {
        threads.emplace_back([&body, w, count, workers] {
            for (int i = w; i < count; i += workers) body(i);
        });
    }
    for (auto& t : threads) t.join();
}

}  // namespace minlab
