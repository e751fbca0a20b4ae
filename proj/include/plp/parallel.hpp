#pragma once

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace plp {

/** Worker count: PLP_ATLAS_THREADS if set and positive, else the hardware concurrency. */
inline int parallel_width() {
    if (const char* env = std::getenv("PLP_ATLAS_THREADS")) {
        const int w = std::atoi(env);
        if (w > 0) return w;
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

/**
 * Calls fn(i) for i in [0, n) on up to `width` threads.  Results must be
 * written to per-index slots; the first exception is rethrown after all
 * workers finish.
 */
template <class Fn>
void parallel_for(std::size_t n, Fn&& fn, int width = parallel_width()) {
    if (width <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr err;
    std::mutex err_mu;
    auto work = [&] {
        for (std::size_t i; (i = next.fetch_add(1)) < n;) {
            try {
                fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lk(err_mu);
                if (!err) err = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    const auto k = std::min<std::size_t>(static_cast<std::size_t>(width), n);
    for (std::size_t t = 0; t < k; ++t) pool.emplace_back(work);
    for (auto& th : pool) th.join();
    if (err) std::rethrow_exception(err);
}

}  // namespace plp
