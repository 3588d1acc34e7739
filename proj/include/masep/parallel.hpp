#pragma once

#include <atomic>
#include <mutex>
#include <thread>

#include "masep/common.hpp"

namespace masep {

/// Runs fn(i) for i in [0, count) on a small worker pool. Tasks must not
/// share mutable state; results land in caller-owned slots indexed by i.
template <class F>
void parallel_for(std::size_t count, F&& fn, int workers = 1) {
    if (workers <= 1 || count <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= count) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    for (int w = 0; w < std::min<int>(workers, int(count)); ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
}

}  // namespace masep
