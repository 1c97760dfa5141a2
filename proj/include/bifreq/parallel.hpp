#pragma once

#include <algorithm>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace bifreq {

inline unsigned default_jobs() { return std::max(1u, std::thread::hardware_concurrency()); }

/// Calls fn(worker, i) for i in [begin, end), striding items across workers.
/// The first exception thrown by any worker is rethrown after all join.
template <class Fn>
void parallel_for(std::int64_t begin, std::int64_t end, unsigned jobs, Fn&& fn)
{
    const std::int64_t n = end - begin;
    if (n <= 0) return;
    jobs = static_cast<unsigned>(std::clamp<std::int64_t>(jobs, 1, n));
    if (jobs == 1) {
        for (std::int64_t i = begin; i < end; ++i) fn(0u, i);
        return;
    }
    std::exception_ptr error;
    std::mutex error_mutex;
    {
        std::vector<std::jthread> workers;
        for (unsigned w = 0; w < jobs; ++w) {
            workers.emplace_back([&, w] {
                try {
                    for (std::int64_t i = begin + w; i < end; i += jobs) fn(w, i);
                } catch (...) {
                    std::lock_guard lock(error_mutex);
                    if (!error) error = std::current_exception();
                }
            });
        }
    }
    if (error) std::rethrow_exception(error);
}

} // namespace bifreq
