#include "dssflow/util.hpp"

#include <atomic>
#include <cstring>
#include <map>
#include <mutex>
#include <thread>

namespace dssflow {

namespace {

// Newton iteration on P_n, standard construction.
std::pair<std::vector<double>, std::vector<double>> make_gl(int n) {
    std::vector<double> x(n), w(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double t = std::cos(kPi * (i + 0.75) / (n + 0.5));
        double p0, p1, dp;
        for (int it = 0; it < 100; ++it) {
            p0 = 1.0;
            p1 = t;
            for (int k = 2; k <= n; ++k) {
                double p2 = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (t * p1 - p0) / (t * t - 1.0);
            double dt = p1 / dp;
            t -= dt;
            if (std::abs(dt) < 1e-15) break;
        }
        x[i] = -t;
        x[n - 1 - i] = t;
        w[i] = w[n - 1 - i] = 2.0 / ((1.0 - t * t) * dp * dp);
    }
    return {x, w};
}

}  // namespace

const std::pair<std::vector<double>, std::vector<double>>& gauss_legendre(int n) {
    static std::mutex mu;
    static std::map<int, std::pair<std::vector<double>, std::vector<double>>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, make_gl(n)).first;
    return it->second;
}

void parallel_for(std::int64_t n, int threads, const std::function<void(std::int64_t)>& fn) {
    if (n <= 0) return;
    int nw = std::min<std::int64_t>(std::max(threads, 1), n);
    if (nw == 1) {
        for (std::int64_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::int64_t> next{0};
    const std::int64_t chunk = std::max<std::int64_t>(1, n / (8 * nw));
    auto work = [&] {
        for (;;) {
            std::int64_t i0 = next.fetch_add(chunk);
            if (i0 >= n) break;
            std::int64_t i1 = std::min(n, i0 + chunk);
            for (std::int64_t i = i0; i < i1; ++i) fn(i);
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(nw - 1);
    for (int k = 1; k < nw; ++k) pool.emplace_back(work);
    work();
    for (auto& th : pool) th.join();
}

std::uint64_t fnv1a(const void* data, std::size_t n, std::uint64_t seed) {
    const unsigned char* p = static_cast<const unsigned char*>(data);
    std::uint64_t h = seed;
    for (std::size_t i = 0; i < n; ++i) {
        h ^= p[i];
        h *= 1099511628211ull;
    }
    return h;
}

std::uint64_t fnv1a(std::span<const double> v, std::uint64_t seed) {
    return fnv1a(v.data(), v.size() * sizeof(double), seed);
}

std::string hash_hex(std::uint64_t h) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return std::string(buf);
}

}  // namespace dssflow
