#pragma once

#include <algorithm>
#include <exception>
#include <thread>
#include <vector>

namespace magflow {

/// Runs body(i) for i in [0, n) on up to `jobs` threads, static round-robin
/// assignment. Each index is processed exactly once, so results written to
/// per-index slots do not depend on the schedule. The first exception thrown
/// by any body is rethrown after all threads join.
template <typename Body>
void parallel_for(int n, int jobs, Body body) {
    jobs = std::max(1, std::min(jobs, n));
    if (jobs == 1) {
        for (int i = 0; i < n; ++i) body(i);
        return;
    }
    std::vector<std::exception_ptr> errors(jobs);
    std::vector<std::thread> pool;
    pool.reserve(jobs);
    for (int w = 0; w < jobs; ++w)
        pool.emplace_back([&, w] {
            try {
                for (int i = w; i < n; i += jobs) body(i);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    for (auto& th : pool) th.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

}  // namespace magflow
