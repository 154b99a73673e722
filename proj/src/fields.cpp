#include "nls/fields.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace nls {

Grid::Grid(int dim_, int n_, double L) : dim(dim_), n(n_), half_extent(L) {
    if (dim != 1 && dim != 2) throw std::invalid_argument("Grid: dim must be 1 or 2");
    if (n < 8) throw std::invalid_argument("Grid: need at least 8 cells per axis");
    if (!(L > 0.0)) throw std::invalid_argument("Grid: half_extent must be positive");
}

double Grid::cell_volume() const {
    double h = spacing();
    return dim == 1 ? h : h * h;
}

std::size_t Grid::cell_count() const {
    return dim == 1 ? static_cast<std::size_t>(n)
                    : static_cast<std::size_t>(n) * static_cast<std::size_t>(n);
}

std::array<double, 2> Grid::cell_center(std::size_t k) const {
    if (dim == 1) return {center(static_cast<int>(k)), 0.0};
    int ix = static_cast<int>(k % static_cast<std::size_t>(n));
    int iy = static_cast<int>(k / static_cast<std::size_t>(n));
    return {center(ix), center(iy)};
}

RealField::RealField(const Grid& g, std::vector<double> values) : grid(g), v(std::move(values)) {
    if (v.size() != g.cell_count()) throw std::invalid_argument("RealField: value count mismatch");
}

double RealField::mass() const {
    double s = 0.0;
    for (double x : v) s += x;
    return s * grid.cell_volume();
}

double RealField::l1_norm() const {
    double s = 0.0;
    for (double x : v) s += std::abs(x);
    return s * grid.cell_volume();
}

double RealField::sup_norm() const {
    double s = 0.0;
    for (double x : v) s = std::max(s, std::abs(x));
    return s;
}

DensityField::DensityField(const Grid& g, double fill) : RealField(g, fill) {
    if (fill < 0.0 || fill > 1.0) throw std::invalid_argument("DensityField: values must lie in [0,1]");
}

DensityField::DensityField(const Grid& g, std::vector<double> values)
    : RealField(g, std::move(values)) {
    for (double& x : v) {
        if (x < -1e-9 || x > 1.0 + 1e-9)
            throw std::invalid_argument("DensityField: values must lie in [0,1]");
        x = std::clamp(x, 0.0, 1.0);
    }
}

DensityField DensityField::clamped(const Grid& g, std::vector<double> values) {
    for (double& x : values) x = std::clamp(x, 0.0, 1.0);
    return DensityField(g, std::move(values));
}

std::size_t SetMask::count() const {
    std::size_t c = 0;
    for (auto b : v) c += b ? 1 : 0;
    return c;
}

DensityField SetMask::to_density() const {
    std::vector<double> d(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) d[i] = v[i] ? 1.0 : 0.0;
    return DensityField(grid, std::move(d));
}

BallSpec::BallSpec(int dim_, double mass_, std::array<double, 2> center_)
    : center(center_), mass(mass_), dim(dim_) {
    if (dim != 1 && dim != 2) throw std::invalid_argument("BallSpec: dim must be 1 or 2");
    if (!(mass > 0.0)) throw std::invalid_argument("BallSpec: mass must be positive");
}

double BallSpec::radius() const { return std::pow(mass / unit_ball_volume(dim), 1.0 / dim); }

namespace {

const double kSub[4] = {-0.375, -0.125, 0.125, 0.375};  // subsample offsets in cell units

double ball_coverage(int dim, double cx, double cy, double R, double x, double y, double h) {
    // fraction of the 4^N subsample points of the cell at (x, y) inside the ball
    double R2 = R * R;
    int in = 0;
    if (dim == 1) {
        for (double ox : kSub) {
            double dx = x + ox * h - cx;
            if (dx * dx <= R2) ++in;
        }
        return in / 4.0;
    }
    for (double oy : kSub) {
        double dy = y + oy * h - cy;
        double dy2 = dy * dy;
        for (double ox : kSub) {
            double dx = x + ox * h - cx;
            if (dx * dx + dy2 <= R2) ++in;
        }
    }
    return in / 16.0;
}

void require_ball_fits(const Grid& grid, const BallSpec& ball) {
    double R = ball.radius();
    double h = grid.spacing();
    for (int i = 0; i < grid.dim; ++i)
        if (std::abs(ball.center[static_cast<std::size_t>(i)]) + R > grid.half_extent - h)
            throw grid_error("ball does not fit inside the grid box with a one-cell margin");
}

}  // namespace

DensityField ball_field(const Grid& grid, const BallSpec& ball, bool antialias) {
    if (ball.dim != grid.dim) throw std::invalid_argument("ball_field: dimension mismatch");
    require_ball_fits(grid, ball);
    double R = ball.radius(), R2 = R * R;
    double h = grid.spacing();
    DensityField out(grid);
    for (std::size_t k = 0; k < out.v.size(); ++k) {
        auto c = grid.cell_center(k);
        double dx = c[0] - ball.center[0];
        double dy = grid.dim == 2 ? c[1] - ball.center[1] : 0.0;
        if (antialias) {
            double d = std::sqrt(dx * dx + dy * dy);
            if (d <= R - h) {
                out.v[k] = 1.0;
            } else if (d >= R + h) {
                out.v[k] = 0.0;
            } else {
                out.v[k] = ball_coverage(grid.dim, ball.center[0], ball.center[1], R, c[0],
                                         grid.dim == 2 ? c[1] : 0.0, h);
            }
        } else {
            out.v[k] = (dx * dx + dy * dy <= R2) ? 1.0 : 0.0;
        }
    }
    return out;
}

SetMask ball_mask(const Grid& grid, const BallSpec& ball) {
    if (ball.dim != grid.dim) throw std::invalid_argument("ball_mask: dimension mismatch");
    require_ball_fits(grid, ball);
    double R2 = ball.radius() * ball.radius();
    SetMask out(grid);
    for (std::size_t k = 0; k < out.v.size(); ++k) {
        auto c = grid.cell_center(k);
        double dx = c[0] - ball.center[0];
        double dy = grid.dim == 2 ? c[1] - ball.center[1] : 0.0;
        out.v[k] = (dx * dx + dy * dy <= R2) ? 1 : 0;
    }
    return out;
}

double support_radius(const RealField& f) {
    double h = f.grid.spacing();
    double r = 0.0;
    for (std::size_t k = 0; k < f.v.size(); ++k) {
        if (f.v[k] == 0.0) continue;
        auto c = f.grid.cell_center(k);
        r = std::max(r, std::max(std::abs(c[0]), f.grid.dim == 2 ? std::abs(c[1]) : 0.0));
    }
    return r == 0.0 ? 0.0 : r + 0.5 * h;
}

namespace {

// convex hull (monotone chain) for the 2D support diameter
double hull_diameter(std::vector<std::array<double, 2>> pts) {
    if (pts.size() < 2) return 0.0;
    std::sort(pts.begin(), pts.end());
    auto cross = [](const std::array<double, 2>& o, const std::array<double, 2>& a,
                    const std::array<double, 2>& b) {
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
    };
    std::vector<std::array<double, 2>> hull(2 * pts.size());
    std::size_t k = 0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        while (k >= 2 && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0.0) --k;
        hull[k++] = pts[i];
    }
    for (std::size_t i = pts.size() - 1, t = k + 1; i-- > 0;) {
        while (k >= t && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0.0) --k;
        hull[k++] = pts[i];
    }
    hull.resize(k > 0 ? k - 1 : 0);
    double best = 0.0;
    for (std::size_t i = 0; i < hull.size(); ++i)
        for (std::size_t j = i + 1; j < hull.size(); ++j)
            best = std::max(best, std::hypot(hull[i][0] - hull[j][0], hull[i][1] - hull[j][1]));
    return best;
}

}  // namespace

double support_diameter(const RealField& f) {
    double h = f.grid.spacing();
    if (f.grid.dim == 1) {
        double lo = std::numeric_limits<double>::infinity();
        double hi = -lo;
        for (std::size_t k = 0; k < f.v.size(); ++k) {
            if (f.v[k] == 0.0) continue;
            double x = f.grid.center(static_cast<int>(k));
            lo = std::min(lo, x);
            hi = std::max(hi, x);
        }
        return hi < lo ? 0.0 : (hi - lo) + h;
    }
    std::vector<std::array<double, 2>> pts;
    for (std::size_t k = 0; k < f.v.size(); ++k)
        if (f.v[k] != 0.0) pts.push_back(f.grid.cell_center(k));
    if (pts.empty()) return 0.0;
    return hull_diameter(std::move(pts)) + h * std::sqrt(2.0);
}

// --- dilation -------------------------------------------------------------------

namespace {

double bilinear_sample(const RealField& f, double x, double y) {
    const Grid& g = f.grid;
    double h = g.spacing();
    auto axis = [&](double p, int& i0, double& w) {
        double s = (p + g.half_extent) / h - 0.5;
        double fl = std::floor(s);
        i0 = static_cast<int>(fl);
        w = s - fl;
    };
    auto at = [&](int ix, int iy) -> double {
        if (ix < 0 || ix >= g.n) return 0.0;
        if (g.dim == 2 && (iy < 0 || iy >= g.n)) return 0.0;
        std::size_t k = g.dim == 1 ? static_cast<std::size_t>(ix)
                                   : static_cast<std::size_t>(iy) * static_cast<std::size_t>(g.n) +
                                         static_cast<std::size_t>(ix);
        return f.v[k];
    };
    int ix0;
    double wx;
    axis(x, ix0, wx);
    if (g.dim == 1) return (1.0 - wx) * at(ix0, 0) + wx * at(ix0 + 1, 0);
    int iy0;
    double wy;
    axis(y, iy0, wy);
    return (1.0 - wx) * (1.0 - wy) * at(ix0, iy0) + wx * (1.0 - wy) * at(ix0 + 1, iy0) +
           (1.0 - wx) * wy * at(ix0, iy0 + 1) + wx * wy * at(ix0 + 1, iy0 + 1);
}

void require_dilation_fits(const RealField& f, double t) {
    if (!(t > 0.0)) throw std::invalid_argument("dilate: factor must be positive");
    if (t * support_radius(f) > f.grid.half_extent)
        throw grid_error("dilate: dilated support overflows the box");
}

}  // namespace

DensityField dilate(const DensityField& f, double t) {
    require_dilation_fits(f, t);
    const Grid& g = f.grid;
    std::vector<double> out(f.v.size());
    for (std::size_t k = 0; k < out.size(); ++k) {
        auto c = g.cell_center(k);
        out[k] = bilinear_sample(f, c[0] / t, g.dim == 2 ? c[1] / t : 0.0);
    }
    return DensityField::clamped(g, std::move(out));
}

SetMask dilate(const SetMask& f, double t) {
    DensityField d = f.to_density();
    require_dilation_fits(d, t);
    const Grid& g = f.grid;
    double h = g.spacing();
    auto mask_at = [&](double x, double y) -> double {
        int ix = static_cast<int>(std::floor((x + g.half_extent) / h));
        if (ix < 0 || ix >= g.n) return 0.0;
        if (g.dim == 1) return f.v[static_cast<std::size_t>(ix)] ? 1.0 : 0.0;
        int iy = static_cast<int>(std::floor((y + g.half_extent) / h));
        if (iy < 0 || iy >= g.n) return 0.0;
        return f.v[static_cast<std::size_t>(iy) * static_cast<std::size_t>(g.n) +
                   static_cast<std::size_t>(ix)]
                   ? 1.0
                   : 0.0;
    };
    // fractional coverage, then a mass-matching threshold
    std::vector<std::pair<double, std::size_t>> cov;  // (-coverage, index)
    for (std::size_t k = 0; k < f.v.size(); ++k) {
        auto c = g.cell_center(k);
        double acc = 0.0;
        if (g.dim == 1) {
            for (double ox : kSub) acc += mask_at((c[0] + ox * h) / t, 0.0);
            acc /= 4.0;
        } else {
            for (double oy : kSub)
                for (double ox : kSub) acc += mask_at((c[0] + ox * h) / t, (c[1] + oy * h) / t);
            acc /= 16.0;
        }
        if (acc > 0.0) cov.emplace_back(-acc, k);
    }
    std::sort(cov.begin(), cov.end());
    double target = std::pow(t, g.dim) * f.volume();
    std::size_t want = static_cast<std::size_t>(std::llround(target / g.cell_volume()));
    want = std::min(want, cov.size());
    SetMask out(g);
    for (std::size_t i = 0; i < want; ++i) out.v[cov[i].second] = 1;
    return out;
}

// --- asymmetry ------------------------------------------------------------------

namespace {

struct RowPrefix {
    // prefix[iy * (n+1) + ix] = sum of f over row iy, columns < ix
    std::vector<double> p;
    int n = 0;
    int rows = 0;

    explicit RowPrefix(const RealField& f) {
        n = f.grid.n;
        rows = f.grid.dim == 1 ? 1 : n;
        p.assign(static_cast<std::size_t>(rows) * static_cast<std::size_t>(n + 1), 0.0);
        for (int iy = 0; iy < rows; ++iy) {
            double acc = 0.0;
            std::size_t base = static_cast<std::size_t>(iy) * static_cast<std::size_t>(n + 1);
            std::size_t fbase = static_cast<std::size_t>(iy) * static_cast<std::size_t>(n);
            for (int ix = 0; ix < n; ++ix) {
                p[base + static_cast<std::size_t>(ix)] = acc;
                acc += f.v[fbase + static_cast<std::size_t>(ix)];
            }
            p[base + static_cast<std::size_t>(n)] = acc;
        }
    }

    // sum over columns [a, b)
    double range(int iy, int a, int b) const {
        if (b <= a) return 0.0;
        std::size_t base = static_cast<std::size_t>(iy) * static_cast<std::size_t>(n + 1);
        return p[base + static_cast<std::size_t>(b)] - p[base + static_cast<std::size_t>(a)];
    }
};

struct BallDistanceContext {
    const RealField& f;
    const RowPrefix& prefix;
    double R, h, L, mass;  // mass = sum f * h^N (physical)
    int n, rows;

    // ||f - chi_{c + B}||_1 over R^N; `exact` switches the partially covered
    // ring cells between subsampled coverage and a linear approximation of it.
    double eval(double cx, double cy, bool exact) const {
        double guard = 0.75 * h * (f.grid.dim == 2 ? 1.4142135623730951 : 1.0);
        double inner = R - guard, outer = R + guard;
        double cellvol = f.grid.cell_volume();
        double cells = 0.0;    // running sum of (|f - chi| - |f|) in cell units
        double covered = 0.0;  // discrete volume of (c + B) captured in the box, cell units
        for (int iy = 0; iy < rows; ++iy) {
            double y = f.grid.dim == 2 ? f.grid.center(iy) : 0.0;
            double dy = f.grid.dim == 2 ? y - cy : 0.0;
            if (std::abs(dy) >= outer) continue;
            double w_out = std::sqrt(std::max(outer * outer - dy * dy, 0.0));
            bool has_in = inner > 0.0 && std::abs(dy) < inner;
            double w_in = has_in ? std::sqrt(inner * inner - dy * dy) : 0.0;
            auto lo_ix = [&](double w) {
                return std::max(0, static_cast<int>(std::ceil((cx - w + L) / h - 0.5)));
            };
            auto hi_ix = [&](double w) {  // exclusive
                return std::min(n, static_cast<int>(std::floor((cx + w + L) / h - 0.5)) + 1);
            };
            int a_out = lo_ix(w_out), b_out = hi_ix(w_out);
            int a_in = has_in ? std::max(a_out, lo_ix(w_in)) : b_out;
            int b_in = has_in ? std::min(b_out, hi_ix(w_in)) : b_out;
            if (b_in < a_in) { a_in = b_in = b_out; }
            if (b_in > a_in) {
                double fsum = prefix.range(iy, a_in, b_in);
                double cnt = static_cast<double>(b_in - a_in);
                cells += cnt - 2.0 * fsum;  // |f-1| - |f| = 1 - 2f per interior cell
                covered += cnt;
            }
            auto ring_cell = [&](int ix) {
                double x = f.grid.center(ix);
                double cov;
                if (exact) {
                    cov = ball_coverage(f.grid.dim, cx, cy, R, x, y, h);
                } else {
                    double d = f.grid.dim == 2 ? std::hypot(x - cx, dy) : std::abs(x - cx);
                    cov = std::clamp(0.5 + (R - d) / h, 0.0, 1.0);
                }
                std::size_t k = static_cast<std::size_t>(iy) * static_cast<std::size_t>(n) +
                                static_cast<std::size_t>(ix);
                double fv = f.v[k];
                cells += std::abs(fv - cov) - fv;
                covered += cov;
            };
            for (int ix = a_out; ix < std::min(a_in, b_out); ++ix) ring_cell(ix);
            for (int ix = std::max(b_in, a_out); ix < b_out; ++ix) ring_cell(ix);
        }
        double dist = mass + cells * cellvol;
        // ball volume that escaped the box counts fully toward the distance
        double outside = mass - covered * cellvol;
        if (outside > 0.0) dist += outside;
        return dist;
    }
};

}  // namespace

AsymmetryResult asymmetry(const RealField& f) {
    double m = f.mass();
    if (!(m > 0.0)) throw std::invalid_argument("asymmetry: field has nonpositive mass");
    const Grid& g = f.grid;
    double R = std::pow(m / unit_ball_volume(g.dim), 1.0 / g.dim);
    RowPrefix prefix(f);
    BallDistanceContext ctx{f, prefix, R, g.spacing(), g.half_extent, m,
                            g.n,  g.dim == 1 ? 1 : g.n};

    // exhaustive scan over cell centers (linearized coverage), deterministic argmin
    int rows = ctx.rows;
    struct Best {
        double d = std::numeric_limits<double>::infinity();
        double cx = std::numeric_limits<double>::infinity();
        double cy = std::numeric_limits<double>::infinity();
    };
    auto better = [](const Best& a, const Best& b) {
        if (a.d != b.d) return a.d < b.d;
        if (a.cx != b.cx) return a.cx < b.cx;
        return a.cy < b.cy;
    };
    int nblocks = std::min(64, rows);
    std::vector<Best> bests(static_cast<std::size_t>(nblocks));
    run_blocks(nblocks, [&](int b) {
        Best& best = bests[static_cast<std::size_t>(b)];
        for (int iy = b; iy < rows; iy += nblocks) {
            double cy = g.dim == 2 ? g.center(iy) : 0.0;
            for (int ix = 0; ix < g.n; ++ix) {
                Best cand{ctx.eval(g.center(ix), cy, false), g.center(ix), cy};
                if (better(cand, best)) best = cand;
            }
        }
        return 0.0;
    });
    Best best;
    for (const Best& b : bests)
        if (better(b, best)) best = b;

    // one golden-section pass per axis on the exact objective
    const double phi = 0.6180339887498949;
    double cx = best.cx, cy = best.cy;
    double dbest = ctx.eval(cx, cy, true);
    for (int axis = 0; axis < g.dim; ++axis) {
        double lo = -g.spacing(), hi = g.spacing();
        auto value = [&](double tshift) {
            return axis == 0 ? ctx.eval(cx + tshift, cy, true) : ctx.eval(cx, cy + tshift, true);
        };
        double a = lo, b = hi;
        double x1 = b - phi * (b - a), x2 = a + phi * (b - a);
        double f1 = value(x1), f2 = value(x2);
        for (int it = 0; it < 40; ++it) {
            if (f1 < f2) {
                b = x2;
                x2 = x1;
                f2 = f1;
                x1 = b - phi * (b - a);
                f1 = value(x1);
            } else {
                a = x1;
                x1 = x2;
                f1 = f2;
                x2 = a + phi * (b - a);
                f2 = value(x2);
            }
        }
        double t = f1 < f2 ? x1 : x2;
        double ft = std::min(f1, f2);
        if (ft < dbest) {
            dbest = ft;
            (axis == 0 ? cx : cy) += t;
        }
    }
    return {dbest / m, {cx, g.dim == 2 ? cy : 0.0}};
}

std::array<double, 2> barycenter(const RealField& f) {
    double m = f.mass();
    if (!(m > 0.0)) throw std::invalid_argument("barycenter: zero mass");
    double sx = 0.0, sy = 0.0;
    for (std::size_t k = 0; k < f.v.size(); ++k) {
        if (f.v[k] == 0.0) continue;
        auto c = f.grid.cell_center(k);
        sx += c[0] * f.v[k];
        sy += c[1] * f.v[k];
    }
    double scale = f.grid.cell_volume() / m;
    return {sx * scale, f.grid.dim == 2 ? sy * scale : 0.0};
}

namespace {
template <typename Vec>
Vec shift_values(const Grid& g, const Vec& in, const std::array<int, 2>& shift) {
    Vec out(in.size(), 0);
    int n = g.n;
    int rows = g.dim == 1 ? 1 : n;
    for (int iy = 0; iy < rows; ++iy) {
        int jy = iy + (g.dim == 2 ? shift[1] : 0);
        for (int ix = 0; ix < n; ++ix) {
            std::size_t k = static_cast<std::size_t>(iy) * static_cast<std::size_t>(n) +
                            static_cast<std::size_t>(ix);
            if (!in[k]) continue;
            int jx = ix + shift[0];
            if (jx < 0 || jx >= n || jy < 0 || jy >= rows)
                throw grid_error("translate_cells: support clipped by the box");
            out[static_cast<std::size_t>(jy) * static_cast<std::size_t>(n) +
                static_cast<std::size_t>(jx)] = in[k];
        }
    }
    return out;
}
}  // namespace

RealField translate_cells(const RealField& f, const std::array<int, 2>& shift) {
    RealField out(f.grid);
    out.v = shift_values(f.grid, f.v, shift);
    return out;
}

DensityField translate_cells(const DensityField& f, const std::array<int, 2>& shift) {
    return DensityField(f.grid, shift_values(f.grid, f.v, shift));
}

SetMask translate_cells(const SetMask& f, const std::array<int, 2>& shift) {
    SetMask out(f.grid);
    out.v = shift_values(f.grid, f.v, shift);
    return out;
}

// --- boundary profiles ----------------------------------------------------------

BoundaryProfile BoundaryProfile::from_samples(std::vector<double> samples) {
    if (samples.size() < 8) throw std::invalid_argument("BoundaryProfile: need at least 8 samples");
    for (double x : samples)
        if (!(x > -1.0 && x < 1.0))
            throw std::invalid_argument("BoundaryProfile: samples must lie in (-1, 1)");
    BoundaryProfile p;
    p.u_ = std::move(samples);
    p.refresh_norms();
    return p;
}

BoundaryProfile BoundaryProfile::from_fourier(int first_mode, std::vector<double> cos_coeffs,
                                              std::vector<double> sin_coeffs, int samples) {
    if (first_mode < 1) throw std::invalid_argument("BoundaryProfile: first_mode must be >= 1");
    if (cos_coeffs.size() != sin_coeffs.size())
        throw std::invalid_argument("BoundaryProfile: coefficient count mismatch");
    if (samples < 8) throw std::invalid_argument("BoundaryProfile: need at least 8 samples");
    BoundaryProfile p;
    p.first_mode_ = first_mode;
    p.cosc_ = std::move(cos_coeffs);
    p.sinc_ = std::move(sin_coeffs);
    p.u_.resize(static_cast<std::size_t>(samples));
    for (int j = 0; j < samples; ++j) {
        double th = 2.0 * kPi * j / samples;
        double s = 0.0;
        for (std::size_t k = 0; k < p.cosc_.size(); ++k) {
            double kk = static_cast<double>(first_mode + static_cast<int>(k));
            s += p.cosc_[k] * std::cos(kk * th) + p.sinc_[k] * std::sin(kk * th);
        }
        p.u_[static_cast<std::size_t>(j)] = s;
    }
    for (double x : p.u_)
        if (!(x > -1.0 && x < 1.0))
            throw std::invalid_argument("BoundaryProfile: profile leaves (-1, 1)");
    p.refresh_norms();
    return p;
}

void BoundaryProfile::refresh_norms() {
    sup_ = 0.0;
    lip_ = 0.0;
    int M = sample_count();
    double dth = 2.0 * kPi / M;
    for (int j = 0; j < M; ++j) {
        sup_ = std::max(sup_, std::abs(u_[static_cast<std::size_t>(j)]));
        double diff = u_[static_cast<std::size_t>((j + 1) % M)] - u_[static_cast<std::size_t>(j)];
        lip_ = std::max(lip_, std::abs(diff) / dth);
    }
}

double BoundaryProfile::eval(double theta) const {
    if (has_fourier()) {
        double s = 0.0;
        for (std::size_t k = 0; k < cosc_.size(); ++k) {
            double kk = static_cast<double>(first_mode_ + static_cast<int>(k));
            s += cosc_[k] * std::cos(kk * theta) + sinc_[k] * std::sin(kk * theta);
        }
        return s;
    }
    int M = sample_count();
    double t = theta / (2.0 * kPi) * M;
    t -= std::floor(t / M) * M;
    int j = static_cast<int>(std::floor(t));
    double w = t - j;
    j %= M;
    return (1.0 - w) * u_[static_cast<std::size_t>(j)] +
           w * u_[static_cast<std::size_t>((j + 1) % M)];
}

BoundaryProfile BoundaryProfile::volume_normalized() const {
    int M = sample_count();
    double sum = 0.0;
    for (double x : u_) sum += (1.0 + x) * (1.0 + x);
    double area = kPi / M * sum;  // int (1+u)^2 / 2 dtheta
    double rho = std::sqrt(kPi / area);
    std::vector<double> nu(static_cast<std::size_t>(M));
    for (int j = 0; j < M; ++j) nu[static_cast<std::size_t>(j)] = rho * (1.0 + u_[static_cast<std::size_t>(j)]) - 1.0;
    return from_samples(std::move(nu));
}

SetMask profile_to_mask(const BoundaryProfile& p, const Grid& grid) {
    if (grid.dim != 2) throw std::invalid_argument("profile_to_mask: needs a 2D grid");
    if (p.sup_norm() >= 1.0)
        throw std::invalid_argument("profile_to_mask: sup |u| >= 1, radius would vanish or double");
    if (!p.nearly_spherical())
        throw std::invalid_argument("profile_to_mask: profile is not nearly spherical");
    int M = p.sample_count();
    double sum = 0.0;
    for (double x : p.samples()) sum += (1.0 + x) * (1.0 + x);
    double area = kPi / M * sum;
    double rho = std::sqrt(kPi / area);
    double rmax = rho * (1.0 + p.sup_norm());
    if (rmax > grid.half_extent - grid.spacing())
        throw grid_error("profile_to_mask: normalized set leaves the box");
    SetMask out(grid);
    for (std::size_t k = 0; k < out.v.size(); ++k) {
        auto c = grid.cell_center(k);
        double r = std::sqrt(c[0] * c[0] + c[1] * c[1]);
        double th = std::atan2(c[1], c[0]);
        out.v[k] = (r <= rho * (1.0 + p.eval(th))) ? 1 : 0;
    }
    return out;
}

// --- file I/O -------------------------------------------------------------------

namespace {
void write_header(std::ostream& os, const Grid& g, const char* kind) {
    os << "NLSF1 dim=" << g.dim << " n=" << g.n << " L=" << fmt(g.half_extent) << " kind=" << kind
       << "\n";
}
}  // namespace

void save_field(const std::string& path, const DensityField& f) {
    std::ofstream os(path);
    if (!os) throw io_error("cannot write field file: " + path);
    write_header(os, f.grid, "density");
    for (std::size_t k = 0; k < f.v.size(); ++k)
        os << fmt(f.v[k]) << (((k + 1) % 16 == 0) ? '\n' : ' ');
    os << "\n";
}

void save_field(const std::string& path, const SetMask& f) {
    std::ofstream os(path);
    if (!os) throw io_error("cannot write field file: " + path);
    write_header(os, f.grid, "mask");
    for (std::size_t k = 0; k < f.v.size(); ++k)
        os << (f.v[k] ? '1' : '0') << (((k + 1) % 64 == 0) ? '\n' : ' ');
    os << "\n";
}

std::variant<DensityField, SetMask> load_field(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw io_error("cannot open field file: " + path);
    std::string magic;
    is >> magic;
    if (magic != "NLSF1") throw io_error("bad field file magic in " + path);
    int dim = 0, n = 0;
    double L = 0.0;
    std::string kind;
    for (int i = 0; i < 4; ++i) {
        std::string tok;
        is >> tok;
        auto eq = tok.find('=');
        if (eq == std::string::npos) throw io_error("bad field header in " + path);
        std::string key = tok.substr(0, eq), val = tok.substr(eq + 1);
        if (key == "dim") dim = std::stoi(val);
        else if (key == "n") n = std::stoi(val);
        else if (key == "L") L = std::stod(val);
        else if (key == "kind") kind = val;
        else throw io_error("unknown field header key `" + key + "` in " + path);
    }
    Grid g(dim, n, L);
    std::size_t count = g.cell_count();
    if (kind == "density") {
        std::vector<double> vals(count);
        for (std::size_t k = 0; k < count; ++k)
            if (!(is >> vals[k])) throw io_error("truncated field file: " + path);
        return DensityField(g, std::move(vals));
    }
    if (kind == "mask") {
        SetMask m(g);
        for (std::size_t k = 0; k < count; ++k) {
            int b;
            if (!(is >> b)) throw io_error("truncated field file: " + path);
            if (b != 0 && b != 1) throw io_error("mask values must be 0/1 in " + path);
            m.v[k] = static_cast<std::uint8_t>(b);
        }
        return m;
    }
    throw io_error("unknown field kind `" + kind + "` in " + path);
}

void save_profile(const std::string& path, const BoundaryProfile& p) {
    std::ofstream os(path);
    if (!os) throw io_error("cannot write profile file: " + path);
    os << "NLSP1 M=" << p.sample_count() << " first_mode=" << p.first_mode()
       << " K=" << p.cos_coeffs().size() << "\n";
    for (int j = 0; j < p.sample_count(); ++j)
        os << fmt(p.samples()[static_cast<std::size_t>(j)]) << (((j + 1) % 8 == 0) ? '\n' : ' ');
    os << "\n";
    for (std::size_t k = 0; k < p.cos_coeffs().size(); ++k)
        os << fmt(p.cos_coeffs()[k]) << " " << fmt(p.sin_coeffs()[k]) << "\n";
}

BoundaryProfile load_profile(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw io_error("cannot open profile file: " + path);
    std::string magic;
    is >> magic;
    if (magic != "NLSP1") throw io_error("bad profile file magic in " + path);
    int M = 0, first_mode = 1;
    std::size_t K = 0;
    for (int i = 0; i < 3; ++i) {
        std::string tok;
        is >> tok;
        auto eq = tok.find('=');
        if (eq == std::string::npos) throw io_error("bad profile header in " + path);
        std::string key = tok.substr(0, eq), val = tok.substr(eq + 1);
        if (key == "M") M = std::stoi(val);
        else if (key == "first_mode") first_mode = std::stoi(val);
        else if (key == "K") K = static_cast<std::size_t>(std::stoul(val));
        else throw io_error("unknown profile header key `" + key + "` in " + path);
    }
    std::vector<double> samples(static_cast<std::size_t>(M));
    for (auto& x : samples)
        if (!(is >> x)) throw io_error("truncated profile file: " + path);
    if (K == 0) return BoundaryProfile::from_samples(std::move(samples));
    std::vector<double> cc(K), sc(K);
    for (std::size_t k = 0; k < K; ++k)
        if (!(is >> cc[k] >> sc[k])) throw io_error("truncated profile file: " + path);
    return BoundaryProfile::from_fourier(first_mode, std::move(cc), std::move(sc), M);
}

}  // namespace nls
