#pragma once

#include <cstdint>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace qml {

/// Runs fn(0..count-1) across up to `threads` workers. Each index must write
/// only its own output slot; results are then independent of scheduling.
/// The first worker exception is rethrown on the calling thread.
inline void parallel_for(std::uint64_t count, int threads,
                         const std::function<void(std::uint64_t)>& fn)
{
    if (count == 0)
        return;
    const std::uint64_t workers =
        std::max<std::uint64_t>(1, std::min<std::uint64_t>(static_cast<std::uint64_t>(
                                                               threads > 0 ? threads : 1),
                                                           count));
    if (workers == 1) {
        for (std::uint64_t i = 0; i < count; ++i)
            fn(i);
        return;
    }
    std::mutex error_mutex;
    std::exception_ptr error;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::uint64_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            try {
                for (std::uint64_t i = w; i < count; i += workers)
                    fn(i);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error)
                    error = std::current_exception();
            }
        });
    }
    for (auto& t : pool)
        t.join();
    if (error)
        std::rethrow_exception(error);
}

} // namespace qml
