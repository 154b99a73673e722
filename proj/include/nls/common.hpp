#ifndef NLS_COMMON_HPP
#define NLS_COMMON_HPP

#include <array>
#include <charconv>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <map>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

namespace nls {

inline constexpr const char* kVersion = "0.1.0";

// Thrown when a requested geometry does not fit the computational box.
struct grid_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct io_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Volume of the unit ball in dimension N (only N = 1, 2 are supported).
inline double unit_ball_volume(int dim) {
    if (dim == 1) return 2.0;
    if (dim == 2) return 3.14159265358979323846;
    throw std::invalid_argument("unit_ball_volume: dim must be 1 or 2");
}

// Surface measure of the unit sphere in dimension N.
inline double unit_sphere_area(int dim) {
    if (dim == 1) return 2.0;
    if (dim == 2) return 2.0 * 3.14159265358979323846;
    throw std::invalid_argument("unit_sphere_area: dim must be 1 or 2");
}

inline constexpr double kPi = 3.14159265358979323846;

// ---------------------------------------------------------------------------
// Deterministic summation and parallel block execution.
//
// All pair sums in the library are organized as a fixed number of blocks,
// each reduced sequentially, followed by a fixed pairwise merge tree.  The
// result is bit-identical regardless of how many worker threads execute the
// blocks.
// ---------------------------------------------------------------------------

int max_threads();         // NLS_THREADS env var caps hardware_concurrency
void set_max_threads(int n);

// Sums v[begin, end) with a balanced pairwise tree.
double pairwise_sum(const double* v, std::size_t n);
inline double pairwise_sum(const std::vector<double>& v) {
    return pairwise_sum(v.data(), v.size());
}

// Evaluates fn(b) for b = 0..nblocks-1 on up to max_threads() workers and
// returns the per-block results in block order.
std::vector<double> run_blocks(int nblocks, const std::function<double(int)>& fn);

// run_blocks + pairwise merge.
double block_sum(int nblocks, const std::function<double(int)>& fn);

// Plain parallel index loop (no reduction); blocks are fixed so any writes
// indexed by i are race-free and deterministic.
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& range_fn);

// ---------------------------------------------------------------------------
// Random numbers.  A thin wrapper so generated streams depend only on the
// seed and the call sequence, not on the standard library's distribution
// implementations.
// ---------------------------------------------------------------------------

class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    double uniform() {  // [0, 1)
        return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
    }
    double uniform(double a, double b) { return a + (b - a) * uniform(); }
    // integer in [a, b] inclusive
    long long uniform_int(long long a, long long b) {
        return a + static_cast<long long>(uniform() * static_cast<double>(b - a + 1));
    }

private:
    std::mt19937_64 eng_;
};

// ---------------------------------------------------------------------------
// Locale-free number formatting (shortest round-trip), used by every file
// and CSV writer so that reruns are byte-identical.
// ---------------------------------------------------------------------------

inline std::string fmt(double x) {
    std::array<char, 40> buf{};
    auto [p, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), x);
    (void)ec;
    return std::string(buf.data(), p);
}

inline std::string fmt(int x) { return std::to_string(x); }
inline std::string fmt(std::size_t x) { return std::to_string(x); }

// ---------------------------------------------------------------------------
// Plain-text configuration: `key = value` lines, '#' comments.  The CLI
// builds one of these maps from flags; flags override file entries.
// ---------------------------------------------------------------------------

using Config = std::map<std::string, std::string>;

Config parse_config(std::string_view text);
Config load_config_file(const std::string& path);

std::string config_get(const Config& c, const std::string& key, const std::string& fallback);
double config_get_double(const Config& c, const std::string& key, double fallback);
int config_get_int(const Config& c, const std::string& key, int fallback);

}  // namespace nls

#endif
