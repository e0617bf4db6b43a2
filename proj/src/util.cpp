#include "bhchaos/util.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <mutex>
#include <thread>

namespace bhc {

std::uint64_t binomial(int n, int k) {
    if (k < 0 || n < 0 || k > n) return 0;
    if (k > n - k) k = n - k;
    std::uint64_t r = 1;
    for (int i = 1; i <= k; ++i) {
        std::uint64_t num = static_cast<std::uint64_t>(n - k + i);
        // r * num never overflows for the lattice sizes handled here; guard anyway
        if (r > UINT64_MAX / num) throw CapacityError("binomial overflow: C(" + std::to_string(n) + "," + std::to_string(k) + ")");
        r = r * num / static_cast<std::uint64_t>(i);
    }
    return r;
}

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

void parallel_for(int n_tasks, int threads, const std::function<void(int)>& fn) {
    if (threads <= 1 || n_tasks <= 1) {
        for (int i = 0; i < n_tasks; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto worker = [&] {
        for (;;) {
            int i = next.fetch_add(1);
            if (i >= n_tasks) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) error = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    int nw = std::min(threads, n_tasks);
    pool.reserve(nw);
    for (int w = 0; w < nw; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    // trim to shortest representation that round-trips
    for (int prec = 1; prec < 17; ++prec) {
        char t[40];
        std::snprintf(t, sizeof t, "%.*g", prec, v);
        if (std::strtod(t, nullptr) == v) return t;
    }
    return buf;
}

}  // namespace bhc
