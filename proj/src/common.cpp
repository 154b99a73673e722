#include "nls/common.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <sstream>

namespace nls {

namespace {
std::atomic<int> g_max_threads{0};

int detect_threads() {
    if (const char* env = std::getenv("NLS_THREADS")) {
        int v = std::atoi(env);
        if (v >= 1) return v;
    }
    unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1 : static_cast<int>(hc);
}
}  // namespace

int max_threads() {
    int v = g_max_threads.load(std::memory_order_relaxed);
    if (v == 0) {
        v = detect_threads();
        g_max_threads.store(v, std::memory_order_relaxed);
    }
    return v;
}

void set_max_threads(int n) { g_max_threads.store(n < 1 ? 1 : n, std::memory_order_relaxed); }

double pairwise_sum(const double* v, std::size_t n) {
    if (n == 0) return 0.0;
    if (n <= 8) {
        double s = v[0];
        for (std::size_t i = 1; i < n; ++i) s += v[i];
        return s;
    }
    std::size_t half = n / 2;
    return pairwise_sum(v, half) + pairwise_sum(v + half, n - half);
}

std::vector<double> run_blocks(int nblocks, const std::function<double(int)>& fn) {
    std::vector<double> out(static_cast<std::size_t>(nblocks), 0.0);
    int nthreads = std::min(max_threads(), nblocks);
    if (nthreads <= 1) {
        for (int b = 0; b < nblocks; ++b) out[static_cast<std::size_t>(b)] = fn(b);
        return out;
    }
    std::atomic<int> next{0};
    auto worker = [&]() {
        for (;;) {
            int b = next.fetch_add(1, std::memory_order_relaxed);
            if (b >= nblocks) return;
            out[static_cast<std::size_t>(b)] = fn(b);
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(nthreads));
    for (int t = 0; t < nthreads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    return out;
}

double block_sum(int nblocks, const std::function<double(int)>& fn) {
    return pairwise_sum(run_blocks(nblocks, fn));
}

void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& range_fn) {
    if (n == 0) return;
    int nthreads = std::min<std::size_t>(static_cast<std::size_t>(max_threads()), n);
    if (nthreads <= 1) {
        range_fn(0, n);
        return;
    }
    std::size_t chunk = (n + static_cast<std::size_t>(nthreads) - 1) / static_cast<std::size_t>(nthreads);
    std::vector<std::thread> pool;
    for (int t = 0; t < nthreads; ++t) {
        std::size_t lo = static_cast<std::size_t>(t) * chunk;
        if (lo >= n) break;
        std::size_t hi = std::min(n, lo + chunk);
        pool.emplace_back([&range_fn, lo, hi]() { range_fn(lo, hi); });
    }
    for (auto& th : pool) th.join();
}

namespace {
std::string_view trim(std::string_view s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}
}  // namespace

Config parse_config(std::string_view text) {
    Config cfg;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t nl = text.find('\n', pos);
        std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        std::size_t hash = line.find('#');
        if (hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        std::size_t eq = line.find('=');
        if (eq == std::string_view::npos)
            throw std::invalid_argument("config: expected `key = value`, got: " + std::string(line));
        std::string key(trim(line.substr(0, eq)));
        std::string val(trim(line.substr(eq + 1)));
        if (key.empty()) throw std::invalid_argument("config: empty key");
        cfg[key] = val;
    }
    return cfg;
}

Config load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open config file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string config_get(const Config& c, const std::string& key, const std::string& fallback) {
    auto it = c.find(key);
    return it == c.end() ? fallback : it->second;
}

double config_get_double(const Config& c, const std::string& key, double fallback) {
    auto it = c.find(key);
    if (it == c.end()) return fallback;
    return std::stod(it->second);
}

int config_get_int(const Config& c, const std::string& key, int fallback) {
    auto it = c.find(key);
    if (it == c.end()) return fallback;
    return std::stoi(it->second);
}

}  // namespace nls
