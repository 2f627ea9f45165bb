#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace ecp
{

/// Calls fn(i) for i in [0, count) on up to `jobs` threads. Work items are
/// handed out dynamically; callers write into per-index slots so results do
/// not depend on scheduling. The first exception thrown is rethrown.
template <typename Fn>
void parallel_for(std::size_t count, int jobs, Fn&& fn)
{
    const std::size_t workers = std::min<std::size_t>(count, static_cast<std::size_t>(std::max(jobs, 1)));
    if (workers <= 1)
    {
        for (std::size_t i = 0; i < count; ++i)
            fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto work = [&] {
        for (;;)
        {
            const std::size_t i = next.fetch_add(1);
            if (i >= count || failed.load())
                return;
            try
            {
                fn(i);
            }
            catch (...)
            {
                std::lock_guard lock(error_mutex);
                if (!error)
                    error = std::current_exception();
                failed = true;
            }
        }
    };
    std::vector<std::thread> threads;
    threads.reserve(workers - 1);
    for (std::size_t w = 1; w < workers; ++w)
        threads.emplace_back(work);
    work();
    for (auto& thread : threads)
        thread.join();
    if (error)
        std::rethrow_exception(error);
}

} // namespace ecp
