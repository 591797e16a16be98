#include "gme/parallel.hpp"

#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace gme {

int worker_count() {
    int n = static_cast<int>(std::thread::hardware_concurrency());
    if (n < 1) n = 1;
    if (const char* env = std::getenv("GME_THREADS")) {
        const int cap = std::atoi(env);
        if (cap >= 1 && cap < n) n = cap;
    }
    return n;
}

void for_each_chunk(std::int64_t total, std::int64_t chunk_size,
                    const std::function<void(std::int64_t, std::int64_t,
                                             std::int64_t)>& fn) {
    if (total <= 0) return;
    if (chunk_size < 1) chunk_size = 1;
    const std::int64_t nchunks = (total + chunk_size - 1) / chunk_size;

    auto run_chunk = [&](std::int64_t c) {
        const std::int64_t b = c * chunk_size;
        const std::int64_t e = std::min(b + chunk_size, total);
        fn(c, b, e);
    };

    const int workers = static_cast<int>(
        std::min<std::int64_t>(worker_count(), nchunks));
    if (workers <= 1) {
        for (std::int64_t c = 0; c < nchunks; ++c) run_chunk(c);
        return;
    }

    std::atomic<std::int64_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    auto worker = [&] {
        for (;;) {
            const std::int64_t c = next.fetch_add(1);
            if (c >= nchunks) return;
            try {
                run_chunk(c);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
                return;
            }
        }
    };

    std::vector<std::thread> threads;
    threads.reserve(static_cast<std::size_t>(workers) - 1);
    for (int i = 1; i < workers; ++i) threads.emplace_back(worker);
    worker();
    for (auto& t : threads) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

}  // namespace gme
