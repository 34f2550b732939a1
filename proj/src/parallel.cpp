#include "rdbp/parallel.hpp"

#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace rdbp {

unsigned thread_count() {
    if (const char* env = std::getenv("RDBP_THREADS")) {
        char* end = nullptr;
        long v = std::strtol(env, &end, 10);
        if (end != env && v > 0) return static_cast<unsigned>(v);
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw ? hw : 1u;
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
    unsigned nt = thread_count();
    if (nt > n) nt = static_cast<unsigned>(n);
    if (nt <= 1) {
        for (std::size_t k = 0; k < n; ++k) fn(k);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr err;
    std::mutex mu;
    auto work = [&] {
        for (;;) {
            std::size_t k = next.fetch_add(1);
            if (k >= n) return;
            try {
                fn(k);
            } catch (...) {
                std::lock_guard<std::mutex> lock(mu);
                if (!err) err = std::current_exception();
                next.store(n);
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    for (unsigned w = 1; w < nt; ++w) pool.emplace_back(work);
    work();
    for (auto& t : pool) t.join();
    if (err) std::rethrow_exception(err);
}

}  // namespace rdbp
