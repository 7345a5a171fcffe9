#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace scp {

/// Runs body(i) for i in [0, n) on up to `jobs` threads. Each index is
/// processed exactly once; callers write results into pre-sized slots so the
/// output never depends on scheduling. If any call throws, the exception of
/// the lowest failing index is rethrown after all workers finish.
template <typename Body>
void parallel_for(std::size_t n, unsigned jobs, Body&& body) {
    const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(std::max(1u, jobs), n));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(n);
    auto run = [&] {
        for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
            try {
                body(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    {
        std::vector<std::jthread> pool;
        pool.reserve(workers - 1);
        for (unsigned w = 1; w < workers; ++w) pool.emplace_back(run);
        run();
    }
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

}  // namespace scp
