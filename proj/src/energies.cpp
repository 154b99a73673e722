#include "nls/energies.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>

#include "quadrature.hpp"

namespace nls {

void EnergyParams::validate() const {
    if (!(s > 0.0 && s < 1.0)) throw std::invalid_argument("EnergyParams: s must lie in (0,1)");
    if (!(alpha > 0.0)) throw std::invalid_argument("EnergyParams: alpha must be positive");
    if (gamma < 0.0) throw std::invalid_argument("EnergyParams: gamma must be nonnegative");
    if (!(mass > 0.0)) throw std::invalid_argument("EnergyParams: mass must be positive");
}

namespace {

constexpr int kNearRange = 8;  // offsets with exact pair integrals
const double kSub[4] = {-0.375, -0.125, 0.125, 0.375};

// Pair weight table over cell offsets: w(delta) ~ the double integral of the
// kernel over two cells at index offset delta, including the h^(2N) measure.
struct PairTable {
    int dim = 1, n = 0;
    double h = 0.0, L = 0.0, s = 0.0;
    std::vector<double> w;       // (2n+1)^dim
    std::vector<double> rowpfx;  // per dy: prefix sums over dx, row length 2n+2
    std::vector<double> pfx2;    // (2n+2)^2 rectangle prefix (perimeter tables only)

    // lazy per-cell exterior tail (perimeter tables only): mean over 4^N
    // subsamples of the analytic tail integral
    mutable std::vector<double> tail;
    mutable std::vector<std::uint8_t> tail_ready;
    mutable std::mutex tail_mutex;

    int side() const { return 2 * n + 1; }

    std::size_t widx(int dx, int dy) const {
        return static_cast<std::size_t>(dy + n) * static_cast<std::size_t>(side()) +
               static_cast<std::size_t>(dx + n);
    }

    double wval(int dx, int dy) const {
        return w[dim == 1 ? static_cast<std::size_t>(dx + n) : widx(dx, dy)];
    }

    // sum of w(dx, dy) for dx in [lo, hi)
    double row_range(int dy, int lo, int hi) const {
        lo = std::max(lo, -n);
        hi = std::min(hi, n + 1);
        if (hi <= lo) return 0.0;
        std::size_t base = dim == 1 ? 0
                                    : static_cast<std::size_t>(dy + n) *
                                          static_cast<std::size_t>(side() + 1);
        return rowpfx[base + static_cast<std::size_t>(hi + n)] -
               rowpfx[base + static_cast<std::size_t>(lo + n)];
    }

    // sum of w over dx in [xlo, xhi), dy in [ylo, yhi)  (2D only)
    double box_range(int xlo, int xhi, int ylo, int yhi) const {
        xlo = std::max(xlo, -n);
        ylo = std::max(ylo, -n);
        xhi = std::min(xhi, n + 1);
        yhi = std::min(yhi, n + 1);
        if (xhi <= xlo || yhi <= ylo) return 0.0;
        std::size_t stride = static_cast<std::size_t>(side() + 1);
        auto at = [&](int dx, int dy) {
            return pfx2[static_cast<std::size_t>(dy + n) * stride + static_cast<std::size_t>(dx + n)];
        };
        return at(xhi, yhi) - at(xlo, yhi) - at(xhi, ylo) + at(xlo, ylo);
    }

    void build_prefixes(bool with_box) {
        int m = side();
        int rows = dim == 1 ? 1 : m;
        rowpfx.assign(static_cast<std::size_t>(rows) * static_cast<std::size_t>(m + 1), 0.0);
        for (int r = 0; r < rows; ++r) {
            double acc = 0.0;
            std::size_t base = static_cast<std::size_t>(r) * static_cast<std::size_t>(m + 1);
            for (int c = 0; c < m; ++c) {
                rowpfx[base + static_cast<std::size_t>(c)] = acc;
                acc += w[static_cast<std::size_t>(r) * static_cast<std::size_t>(dim == 1 ? 0 : m) +
                         static_cast<std::size_t>(c)];
            }
            rowpfx[base + static_cast<std::size_t>(m)] = acc;
        }
        if (!with_box || dim == 1) return;
        std::size_t stride = static_cast<std::size_t>(m + 1);
        pfx2.assign(stride * stride, 0.0);
        for (int r = 0; r < m; ++r) {
            double rowacc = 0.0;
            for (int c = 0; c < m; ++c) {
                rowacc += w[widx(c - n, r - n)];
                pfx2[static_cast<std::size_t>(r + 1) * stride + static_cast<std::size_t>(c + 1)] =
                    pfx2[static_cast<std::size_t>(r) * stride + static_cast<std::size_t>(c + 1)] +
                    rowacc;
            }
        }
    }
};

using TablePtr = std::shared_ptr<const PairTable>;

std::shared_ptr<PairTable> make_table(const Grid& g) {
    auto t = std::make_shared<PairTable>();
    t->dim = g.dim;
    t->n = g.n;
    t->h = g.spacing();
    t->L = g.half_extent;
    std::size_t total = g.dim == 1 ? static_cast<std::size_t>(t->side())
                                   : static_cast<std::size_t>(t->side()) *
                                         static_cast<std::size_t>(t->side());
    t->w.assign(total, 0.0);
    return t;
}

TablePtr build_perimeter_table(const Grid& g, double s) {
    auto t = make_table(g);
    t->s = s;
    double h = t->h;
    double expn = -(g.dim + s);
    auto kr = [expn](double r) { return std::pow(r, expn); };
    if (g.dim == 1) {
        for (int dx = -t->n; dx <= t->n; ++dx) {
            double& slot = t->w[static_cast<std::size_t>(dx + t->n)];
            if (dx == 0)
                slot = 0.0;  // never queried for E x E^c; keeps the algebra consistent
            else if (std::abs(dx) <= kNearRange)
                slot = quad::cell_pair_integral(kr, 1, h, dx);
            else
                slot = h * h * kr(std::abs(dx) * h);
        }
    } else {
        for (int dy = -t->n; dy <= t->n; ++dy) {
            for (int dx = -t->n; dx <= t->n; ++dx) {
                double& slot = t->w[t->widx(dx, dy)];
                if (dx == 0 && dy == 0)
                    slot = 0.0;
                else if (std::abs(dx) <= kNearRange && std::abs(dy) <= kNearRange)
                    slot = quad::cell_pair_integral(kr, 2, h, dx, dy);
                else
                    slot = h * h * h * h * kr(std::hypot(dx * h, dy * h));
            }
        }
    }
    t->build_prefixes(true);
    t->tail.assign(g.cell_count(), 0.0);
    t->tail_ready.assign(g.cell_count(), 0);
    return t;
}

TablePtr build_repulsion_table(const Grid& g, const Kernel& k) {
    auto t = make_table(g);
    double h = t->h;
    double measure = std::pow(h, 2.0 * g.dim);
    double diag = k.is_zero() ? 0.0 : k.cell_average(0.5 * h) * measure;
    if (g.dim == 1) {
        for (int dx = -t->n; dx <= t->n; ++dx)
            t->w[static_cast<std::size_t>(dx + t->n)] =
                dx == 0 ? diag : measure * k.radial_value(std::abs(dx) * h);
    } else {
        for (int dy = -t->n; dy <= t->n; ++dy)
            for (int dx = -t->n; dx <= t->n; ++dx)
                t->w[t->widx(dx, dy)] = (dx == 0 && dy == 0)
                                            ? diag
                                            : measure * k.radial_value(std::hypot(dx * h, dy * h));
    }
    t->build_prefixes(false);
    return t;
}

TablePtr build_attraction_table(const Grid& g, double alpha) {
    auto t = make_table(g);
    double h = t->h;
    double measure = std::pow(h, 2.0 * g.dim);
    if (g.dim == 1) {
        for (int dx = -t->n; dx <= t->n; ++dx)
            t->w[static_cast<std::size_t>(dx + t->n)] =
                dx == 0 ? 0.0 : measure * std::pow(std::abs(dx) * h, alpha);
    } else {
        for (int dy = -t->n; dy <= t->n; ++dy)
            for (int dx = -t->n; dx <= t->n; ++dx)
                t->w[t->widx(dx, dy)] =
                    (dx == 0 && dy == 0) ? 0.0 : measure * std::pow(std::hypot(dx * h, dy * h), alpha);
    }
    t->build_prefixes(false);
    return t;
}

// table cache ------------------------------------------------------------------

std::mutex g_cache_mutex;
std::map<std::string, TablePtr>& table_cache() {
    static std::map<std::string, TablePtr> cache;
    return cache;
}

std::string grid_key(const Grid& g) {
    return fmt(g.dim) + ":" + fmt(g.n) + ":" + fmt(g.half_extent);
}

TablePtr perimeter_table(const Grid& g, double s) {
    std::string key = "P|" + grid_key(g) + "|" + fmt(s);
    std::lock_guard<std::mutex> lock(g_cache_mutex);
    auto& cache = table_cache();
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    auto t = build_perimeter_table(g, s);
    cache[key] = t;
    return t;
}

TablePtr repulsion_table(const Grid& g, const Kernel& k) {
    std::string key = "R|" + grid_key(g) + "|" + k.spec_string();
    std::lock_guard<std::mutex> lock(g_cache_mutex);
    auto& cache = table_cache();
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    auto t = build_repulsion_table(g, k);
    cache[key] = t;
    return t;
}

TablePtr attraction_table(const Grid& g, double alpha) {
    std::string key = "A|" + grid_key(g) + "|" + fmt(alpha);
    std::lock_guard<std::mutex> lock(g_cache_mutex);
    auto& cache = table_cache();
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    auto t = build_attraction_table(g, alpha);
    cache[key] = t;
    return t;
}

// sparse views -------------------------------------------------------------------

struct Run {
    int y, x0, x1;  // [x0, x1)
    double value;
};

struct SparseCells {
    std::vector<int> x, y;
    std::vector<double> v;
    std::size_t size() const { return x.size(); }
};

template <typename FieldLike, typename Get>
void scan_rows(const FieldLike& f, const Get& get, std::vector<Run>& runs, SparseCells& cells) {
    const Grid& g = f.grid;
    int rows = g.dim == 1 ? 1 : g.n;
    for (int iy = 0; iy < rows; ++iy) {
        std::size_t base = static_cast<std::size_t>(iy) * static_cast<std::size_t>(g.n);
        int runx = -1;
        double runv = 0.0;
        for (int ix = 0; ix <= g.n; ++ix) {
            double val = ix < g.n ? get(base + static_cast<std::size_t>(ix)) : 0.0;
            if (runx >= 0 && val != runv) {
                runs.push_back({iy, runx, ix, runv});
                runx = -1;
            }
            if (ix < g.n && val != 0.0) {
                if (runx < 0) {
                    runx = ix;
                    runv = val;
                }
                cells.x.push_back(ix);
                cells.y.push_back(iy);
                cells.v.push_back(val);
            }
        }
    }
}

void sparsify(const RealField& f, std::vector<Run>& runs, SparseCells& cells) {
    scan_rows(f, [&f](std::size_t k) { return f.v[k]; }, runs, cells);
}

void sparsify(const SetMask& m, std::vector<Run>& runs, SparseCells& cells) {
    scan_rows(m, [&m](std::size_t k) { return m.v[k] ? 1.0 : 0.0; }, runs, cells);
}

// sum over (a in cells) x (b in runs) of a.v * b.value * w(a - b)
double bilinear_cells_runs(const SparseCells& cells, const std::vector<Run>& runs,
                           const PairTable& t) {
    if (cells.size() == 0 || runs.empty()) return 0.0;
    int nblocks = static_cast<int>(std::min<std::size_t>(64, cells.size()));
    return block_sum(nblocks, [&](int b) {
        std::size_t lo = cells.size() * static_cast<std::size_t>(b) / static_cast<std::size_t>(nblocks);
        std::size_t hi =
            cells.size() * static_cast<std::size_t>(b + 1) / static_cast<std::size_t>(nblocks);
        double acc = 0.0;
        for (std::size_t i = lo; i < hi; ++i) {
            int xa = cells.x[i], ya = cells.y[i];
            double va = cells.v[i];
            double cell_acc = 0.0;
            for (const Run& r : runs)
                cell_acc += r.value * t.row_range(ya - r.y, xa - r.x1 + 1, xa - r.x0 + 1);
            acc += va * cell_acc;
        }
        return acc;
    });
}

double bilinear(const RealField& a, const RealField& b, const PairTable& t, bool same) {
    std::vector<Run> runs_a, runs_b;
    SparseCells cells_a, cells_b;
    sparsify(a, runs_a, cells_a);
    if (same) return bilinear_cells_runs(cells_a, runs_a, t);
    sparsify(b, runs_b, cells_b);
    // choose the cheaper orientation
    double c1 = static_cast<double>(cells_a.size()) * static_cast<double>(runs_b.size());
    double c2 = static_cast<double>(cells_b.size()) * static_cast<double>(runs_a.size());
    return c1 <= c2 ? bilinear_cells_runs(cells_a, runs_b, t)
                    : bilinear_cells_runs(cells_b, runs_a, t);
}

void require_same_grid(const Grid& a, const Grid& b, const char* what) {
    if (!(a == b)) throw std::invalid_argument(std::string(what) + ": fields live on different grids");
}

// exterior tail, averaged over the 4^N subsamples of a cell
double cell_tail(const Grid& g, double s, std::size_t k) {
    auto c = g.cell_center(k);
    double h = g.spacing();
    double acc = 0.0;
    if (g.dim == 1) {
        for (double ox : kSub) acc += quad::box_exterior_tail_1d(c[0] + ox * h, g.half_extent, s);
        return acc / 4.0;
    }
    for (double oy : kSub)
        for (double ox : kSub)
            acc += quad::box_exterior_tail_2d(c[0] + ox * h, c[1] + oy * h, g.half_extent, s, 8);
    return acc / 16.0;
}

}  // namespace

double frac_perimeter(const SetMask& E, double s, bool* empty_warning) {
    if (!(s > 0.0 && s < 1.0)) throw std::invalid_argument("frac_perimeter: s must lie in (0,1)");
    if (empty_warning) *empty_warning = false;
    std::size_t cnt = E.count();
    if (cnt == 0) {
        if (empty_warning) *empty_warning = true;
        return 0.0;
    }
    if (cnt == E.grid.cell_count())
        throw std::invalid_argument("frac_perimeter: E covers the whole grid");
    const Grid& g = E.grid;
    TablePtr t = perimeter_table(g, s);

    std::vector<Run> runs;
    SparseCells cells;
    sparsify(E, runs, cells);

    // make sure the lazy tail entries of E's cells exist
    {
        std::lock_guard<std::mutex> lock(t->tail_mutex);
        std::vector<std::size_t> missing;
        for (std::size_t i = 0; i < cells.size(); ++i) {
            std::size_t k = static_cast<std::size_t>(cells.y[i]) * static_cast<std::size_t>(g.n) +
                            static_cast<std::size_t>(cells.x[i]);
            if (!t->tail_ready[k]) missing.push_back(k);
        }
        if (!missing.empty()) {
            parallel_for(missing.size(), [&](std::size_t lo, std::size_t hi) {
                for (std::size_t i = lo; i < hi; ++i)
                    t->tail[missing[i]] = cell_tail(g, s, missing[i]);
            });
            for (std::size_t k : missing) t->tail_ready[k] = 1;
        }
    }

    double hN = g.cell_volume();
    int nblocks = static_cast<int>(std::min<std::size_t>(64, cells.size()));
    // sum over E of (interaction with the whole box) and the exterior tail
    double box_and_tail = block_sum(nblocks, [&](int b) {
        std::size_t lo = cells.size() * static_cast<std::size_t>(b) / static_cast<std::size_t>(nblocks);
        std::size_t hi =
            cells.size() * static_cast<std::size_t>(b + 1) / static_cast<std::size_t>(nblocks);
        double acc = 0.0;
        for (std::size_t i = lo; i < hi; ++i) {
            int ix = cells.x[i], iy = cells.y[i];
            double boxsum = g.dim == 1 ? t->row_range(0, -ix, g.n - ix)
                                       : t->box_range(-ix, g.n - ix, -iy, g.n - iy);
            std::size_t k = static_cast<std::size_t>(iy) * static_cast<std::size_t>(g.n) +
                            static_cast<std::size_t>(ix);
            acc += boxsum + t->tail[k] * hN;
        }
        return acc;
    });
    double self = bilinear_cells_runs(cells, runs, *t);
    return box_and_tail - self;
}

double repulsion(const RealField& h, const Kernel& k) {
    if (k.dim() != h.grid.dim) throw std::invalid_argument("repulsion: kernel dimension mismatch");
    TablePtr t = repulsion_table(h.grid, k);
    return bilinear(h, h, *t, true);
}

double repulsion(const RealField& h1, const RealField& h2, const Kernel& k) {
    require_same_grid(h1.grid, h2.grid, "repulsion");
    if (k.dim() != h1.grid.dim) throw std::invalid_argument("repulsion: kernel dimension mismatch");
    TablePtr t = repulsion_table(h1.grid, k);
    return bilinear(h1, h2, *t, false);
}

double repulsion(const SetMask& E, const Kernel& k) { return repulsion(E.to_density(), k); }

double attraction(const RealField& h, double alpha) {
    if (!(alpha > 0.0)) throw std::invalid_argument("attraction: alpha must be positive");
    TablePtr t = attraction_table(h.grid, alpha);
    return bilinear(h, h, *t, true);
}

double attraction(const RealField& h1, const RealField& h2, double alpha) {
    if (!(alpha > 0.0)) throw std::invalid_argument("attraction: alpha must be positive");
    require_same_grid(h1.grid, h2.grid, "attraction");
    TablePtr t = attraction_table(h1.grid, alpha);
    return bilinear(h1, h2, *t, false);
}

EnergyReport total_F(const SetMask& E, const EnergyParams& p) {
    p.validate();
    EnergyReport rep;
    rep.perimeter_term = frac_perimeter(E, p.s);
    rep.repulsion_term = repulsion(E, p.kernel);
    rep.total = rep.perimeter_term + p.gamma * rep.repulsion_term;
    rep.meta = {E.grid.spacing(), "cell-average", p.deterministic};
    return rep;
}

EnergyReport total_G(const DensityField& h, const EnergyParams& p) {
    p.validate();
    EnergyReport rep;
    rep.attraction_term = attraction(h, p.alpha);
    rep.repulsion_term = repulsion(h, p.kernel);
    rep.total = rep.attraction_term + rep.repulsion_term;
    rep.meta = {h.grid.spacing(), "cell-average", p.deterministic};
    return rep;
}

namespace {
RealField potential_from_table(const RealField& h, const PairTable& t) {
    const Grid& g = h.grid;
    std::vector<Run> runs;
    SparseCells cells;
    sparsify(h, runs, cells);
    RealField out(g);
    double inv_vol = 1.0 / g.cell_volume();
    parallel_for(g.cell_count(), [&](std::size_t lo, std::size_t hi) {
        for (std::size_t k = lo; k < hi; ++k) {
            int ix = static_cast<int>(k % static_cast<std::size_t>(g.n));
            int iy = static_cast<int>(k / static_cast<std::size_t>(g.n));
            if (g.dim == 1) iy = 0;
            double acc = 0.0;
            for (const Run& r : runs)
                acc += r.value * t.row_range(iy - r.y, ix - r.x1 + 1, ix - r.x0 + 1);
            out.v[k] = acc * inv_vol;
        }
    });
    return out;
}
}  // namespace

RealField potential(const RealField& h, const Kernel& k) {
    if (k.dim() != h.grid.dim) throw std::invalid_argument("potential: kernel dimension mismatch");
    TablePtr t = repulsion_table(h.grid, k);
    return potential_from_table(h, *t);
}

RealField attraction_potential(const RealField& h, double alpha) {
    if (!(alpha > 0.0)) throw std::invalid_argument("attraction_potential: alpha must be positive");
    TablePtr t = attraction_table(h.grid, alpha);
    return potential_from_table(h, *t);
}

// --- mesh-free potentials -------------------------------------------------------

double psi(const Kernel& k, double R, double r) {
    if (!(R > 0.0) || r < 0.0) throw std::invalid_argument("psi: need R > 0 and r >= 0");
    int dim = k.dim();
    if (r <= R + 1e-12 && !k.is_zero()) {
        // singularity of g falls inside (or on the closure of) the ball
        auto mass = [&k, dim](double t) { return k.radial_value(t) * std::pow(t, dim - 1); };
        if (!quad::probe_singular_integral(mass, std::min(1.0, R)).convergent)
            throw std::domain_error("psi: kernel is not integrable across the ball");
    }
    if (k.is_zero()) return 0.0;
    if (dim == 1) {
        auto f = [&k](double u) { return k.radial_value(std::abs(u)); };
        double a = r - R, b = r + R;
        if (a < 0.0)
            return quad::adaptive_singular_right(f, a, 0.0, 1e-9) +
                   quad::adaptive_singular_left(f, 0.0, b, 1e-9);
        if (a == 0.0) return quad::adaptive_singular_left(f, 0.0, b, 1e-9);
        return quad::adaptive(f, a, b, 1e-9);
    }
    // 2D: radial decomposition around the singular point
    auto f = [&](double rho) {
        return k.radial_value(rho) * rho * quad::overlap_aperture(rho, r, R);
    };
    double split = std::abs(R - r);
    double out = 0.0;
    if (r < R) {
        if (split > 0.0) out += quad::adaptive_singular_left(f, 0.0, split, 1e-9);
        out += quad::adaptive(f, split, R + r, 1e-9);
    } else if (split <= 1e-300) {  // r == R
        out += quad::adaptive_singular_left(f, 0.0, R + r, 1e-9);
    } else {
        out += quad::adaptive(f, split, R + r, 1e-9);
    }
    return out;
}

double phi(double r, double alpha, int dim) {
    if (!(alpha > 0.0)) throw std::invalid_argument("phi: alpha must be positive");
    if (r < 0.0) throw std::invalid_argument("phi: r must be nonnegative");
    if (dim == 1) {
        auto f = [r, alpha](double y) { return std::pow(std::abs(r - y), alpha); };
        if (r < 1.0)
            return quad::adaptive(f, -1.0, r, 1e-10) + quad::adaptive(f, r, 1.0, 1e-10);
        return quad::adaptive(f, -1.0, 1.0, 1e-10);
    }
    if (dim != 2) throw std::invalid_argument("phi: dim must be 1 or 2");
    auto f = [&](double rho) {
        return std::pow(rho, alpha) * rho * quad::overlap_aperture(rho, r, 1.0);
    };
    double split = std::abs(1.0 - r);
    double out = 0.0;
    if (r < 1.0 && split > 0.0) out += quad::adaptive(f, 0.0, split, 1e-10);
    out += quad::adaptive(f, split, 1.0 + r, 1e-10);
    return out;
}

double phi_prime(double r, double alpha, int dim) {
    if (!(alpha > 0.0)) throw std::invalid_argument("phi_prime: alpha must be positive");
    if (r < 0.0) throw std::invalid_argument("phi_prime: r must be nonnegative");
    if (dim == 1) {
        auto f = [r, alpha](double y) {
            double d = r - y;
            double m = std::abs(d);
            if (m == 0.0) return 0.0;
            return alpha * (d > 0.0 ? 1.0 : -1.0) * std::pow(m, alpha - 1.0);
        };
        if (r < 1.0)
            return quad::adaptive_singular_right(f, -1.0, r, 1e-10) +
                   quad::adaptive_singular_left(f, r, 1.0, 1e-10);
        return quad::adaptive(f, -1.0, 1.0, 1e-10);
    }
    if (dim != 2) throw std::invalid_argument("phi_prime: dim must be 1 or 2");
    auto f = [&](double rho) {
        double half = 0.5 * quad::overlap_aperture(rho, r, 1.0);
        return std::pow(rho, alpha) * 2.0 * std::sin(half);
    };
    double lo = std::abs(1.0 - r), hi = 1.0 + r;
    if (hi <= lo) return 0.0;
    return alpha * quad::adaptive(f, lo, hi, 1e-10);
}

double Phi_m(double r, double m, double alpha, const Kernel& k) {
    if (!(m > 0.0)) throw std::invalid_argument("Phi_m: mass must be positive");
    int dim = k.dim();
    double R = std::pow(m / unit_ball_volume(dim), 1.0 / dim);
    return std::pow(R, dim + alpha) * phi(r / R, alpha, dim) + psi(k, R, r);
}

// --- fractional Sobolev seminorm on the circle -----------------------------------

SobolevResult sobolev_seminorm_circle(const BoundaryProfile& p, double order) {
    if (!(order > 0.0 && order < 1.0))
        throw std::invalid_argument("sobolev_seminorm_circle: order must lie in (0,1)");
    int M = p.sample_count();
    if (M < 32) throw std::invalid_argument("sobolev_seminorm_circle: need at least 32 samples");
    const std::vector<double>& u = p.samples();
    double w = 2.0 * kPi / M;
    double expo = 1.0 + 2.0 * order;

    // chord^-expo per index distance
    std::vector<double> kern(static_cast<std::size_t>(M), 0.0);
    for (int d = 1; d < M; ++d) {
        double chord = 2.0 * std::abs(std::sin(kPi * d / M));
        kern[static_cast<std::size_t>(d)] = std::pow(chord, -expo);
    }

    // far pairs (index distance >= 2) by the midpoint rule
    int nblocks = std::min(64, M);
    double far = block_sum(nblocks, [&](int b) {
        double acc = 0.0;
        for (int i = b; i < M; i += nblocks) {
            double ui = u[static_cast<std::size_t>(i)];
            for (int d = 2; d <= M - 2; ++d) {
                int j = (i + d) % M;
                double du = ui - u[static_cast<std::size_t>(j)];
                acc += du * du * kern[static_cast<std::size_t>(d)];
            }
        }
        return acc;
    });
    far *= w * w;

    // adjacent pairs: one level of angular refinement, counted twice (ordered)
    double adj = block_sum(std::min(64, M), [&](int b) {
        int blocks = std::min(64, M);
        double acc = 0.0;
        for (int i = b; i < M; i += blocks) {
            double ti = 2.0 * kPi * i / M;
            double tj = 2.0 * kPi * (i + 1) / M;
            for (double oa : kSub) {
                double a = ti + oa * w;
                double ua = p.eval(a);
                for (double ob : kSub) {
                    double bng = tj + ob * w;
                    double chord = 2.0 * std::abs(std::sin(0.5 * (a - bng)));
                    double du = ua - p.eval(bng);
                    acc += du * du * std::pow(chord, -expo);
                }
            }
        }
        return acc;
    });
    adj *= (w / 4.0) * (w / 4.0) * 2.0;

    SobolevResult out;
    out.seminorm_sq = far + adj;
    double l2 = 0.0;
    for (double x : u) l2 += x * x;
    out.l2_sq = l2 * w;
    return out;
}

}  // namespace nls
