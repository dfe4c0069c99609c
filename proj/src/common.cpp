#include "nlos/common.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>

namespace nlos {

namespace {
int g_threads = []() {
    unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1 : static_cast<int>(hc);
}();
}

void set_thread_count(int n) { g_threads = std::max(1, n); }

int thread_count() { return g_threads; }

namespace {
thread_local bool g_in_parallel_region = false;
}

void parallel_for(std::int64_t n, const std::function<void(std::int64_t)>& fn) {
    if (n <= 0) return;
    const int workers = static_cast<int>(std::min<std::int64_t>(g_threads, n));
    // Nested regions run inline; only the outermost loop fans out.
    if (workers <= 1 || g_in_parallel_region) {
        for (std::int64_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    std::atomic<std::int64_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    const std::int64_t chunk = std::max<std::int64_t>(1, n / (workers * 8));
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&]() {
            g_in_parallel_region = true;
            try {
                for (;;) {
                    const std::int64_t begin = next.fetch_add(chunk);
                    if (begin >= n) break;
                    const std::int64_t end = std::min(n, begin + chunk);
                    for (std::int64_t i = begin; i < end; ++i) fn(i);
                }
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) error = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

} // namespace nlos
