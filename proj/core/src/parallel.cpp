#include "fer/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace fer::parallel {

namespace {
std::atomic<int> g_max_threads{1};
}

void set_max_threads(int n) { g_max_threads.store(std::max(1, n)); }
int max_threads() { return g_max_threads.load(); }

void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body) {
    if (n == 0) return;
    const std::size_t k = std::min<std::size_t>(max_threads(), n);
    if (k <= 1) {
        body(0, n);
        return;
    }
    const std::size_t chunk = (n + k - 1) / k;
    std::exception_ptr first_error;
    std::mutex err_mu;
    auto run = [&](std::size_t begin, std::size_t end) {
        try {
            body(begin, end);
        } catch (...) {
            std::lock_guard<std::mutex> lock(err_mu);
            if (!first_error) first_error = std::current_exception();
        }
    };
    std::vector<std::thread> pool;
    for (std::size_t w = 1; w < k; ++w) {
        const std::size_t b = w * chunk;
        if (b >= n) break;
        pool.emplace_back(run, b, std::min(n, b + chunk));
    }
    run(0, std::min(n, chunk));
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

}  // namespace fer::parallel
