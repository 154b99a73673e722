#ifndef NLS_QUADRATURE_HPP
#define NLS_QUADRATURE_HPP

// Mesh-free quadrature helpers shared by the kernel, energy and potential
// evaluations.  Everything here is deterministic and single-threaded.

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

namespace nls::quad {

using Fn1 = std::function<double(double)>;

// ---------------------------------------------------------------------------
// Gauss-Legendre nodes on [-1, 1], generated once per order by Newton
// iteration on the Legendre polynomial.
// ---------------------------------------------------------------------------

struct GaussRule {
    std::vector<double> x, w;
};

inline const GaussRule& gauss_rule(int order) {
    static thread_local std::vector<GaussRule> cache(64);
    if (order < 1 || order >= 64) throw std::invalid_argument("gauss_rule: order out of range");
    GaussRule& r = cache[static_cast<std::size_t>(order)];
    if (!r.x.empty()) return r;
    r.x.resize(static_cast<std::size_t>(order));
    r.w.resize(static_cast<std::size_t>(order));
    int n = order;
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= n; ++k) {
            double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        dp = n * (x * p1 - p0) / (x * x - 1.0);
        double w = 2.0 / ((1.0 - x * x) * dp * dp);
        r.x[static_cast<std::size_t>(i)] = -x;
        r.w[static_cast<std::size_t>(i)] = w;
        r.x[static_cast<std::size_t>(n - 1 - i)] = x;
        r.w[static_cast<std::size_t>(n - 1 - i)] = w;
    }
    return r;
}

inline double gauss(const Fn1& f, double a, double b, int order = 32) {
    const GaussRule& r = gauss_rule(order);
    double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    double s = 0.0;
    for (std::size_t i = 0; i < r.x.size(); ++i) s += r.w[i] * f(mid + half * r.x[i]);
    return s * half;
}

// ---------------------------------------------------------------------------
// Adaptive Simpson on a smooth interval.
// ---------------------------------------------------------------------------

namespace detail {
inline double simpson_rec(const Fn1& f, double a, double b, double fa, double fm, double fb,
                          double whole, double tol, int depth) {
    double m = 0.5 * (a + b);
    double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    double flm = f(lm), frm = f(rm);
    double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
    return simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}
}  // namespace detail

inline double adaptive(const Fn1& f, double a, double b, double tol = 1e-10, int max_depth = 40) {
    if (a == b) return 0.0;
    double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    double scale = std::max(std::abs(whole), 1e-30);
    return detail::simpson_rec(f, a, b, fa, fm, fb, whole, tol * scale, max_depth);
}

// Integral over (a, b] where f may blow up at a (integrable singularity).
// Dyadic subdivision toward a; each piece is smooth.
inline double adaptive_singular_left(const Fn1& f, double a, double b, double tol = 1e-10) {
    if (b <= a) return 0.0;
    double total = 0.0;
    double width = b - a;
    double hi = b;
    for (int k = 0; k < 60; ++k) {
        double lo = a + width * std::ldexp(1.0, -(k + 1));
        double piece = adaptive(f, lo, hi, tol);
        total += piece;
        hi = lo;
        if (k > 4 && std::abs(piece) < tol * std::max(std::abs(total), 1e-300)) break;
    }
    return total;
}

inline double adaptive_singular_right(const Fn1& f, double a, double b, double tol = 1e-10) {
    return adaptive_singular_left([&f, a, b](double t) { return f(a + b - t); }, a, b, tol);
}

// Convergence probe for integrals of the form int_0^b f with a possibly
// non-integrable singularity at 0.  Returns the partial dyadic sum and a
// convergence flag: the dyadic pieces of an integrable singularity decay
// geometrically, while those of a critical or divergent one do not.
struct TailProbe {
    double value = 0.0;
    bool convergent = false;
};

inline TailProbe probe_singular_integral(const Fn1& f, double b, int pieces = 48) {
    TailProbe out;
    double hi = b;
    double prev = -1.0;
    double ratio_max = 0.0;
    for (int k = 0; k < pieces; ++k) {
        double lo = b * std::ldexp(1.0, -(k + 1));
        double piece = adaptive(f, lo, hi, 1e-12);
        out.value += piece;
        if (!std::isfinite(piece)) return out;
        if (k >= 8) {
            double ratio = prev > 0.0 ? piece / prev : 0.0;
            ratio_max = std::max(ratio_max, ratio);
        }
        prev = piece;
        hi = lo;
    }
    // geometric decay with ratio strictly below 1 => summable tail
    out.convergent = ratio_max < 0.999;
    if (out.convergent && prev > 0.0 && ratio_max > 0.0 && ratio_max < 0.999)
        out.value += prev * ratio_max / (1.0 - ratio_max);
    return out;
}

// ---------------------------------------------------------------------------
// Exact cell-pair integrals: I(delta) = int int k(|x-y|) dx dy over two cubic
// grid cells whose index offset is delta.  Written in difference coordinates
// u = x - y this is the integral of k(|u|) against a tensor product of hat
// weights centered at delta*h.  Cells touching the singular point u = 0 are
// handled by dyadic shells.
// ---------------------------------------------------------------------------

namespace detail {

inline double hat(double u, double center, double h) {
    double t = h - std::abs(u - center);
    return t > 0.0 ? t : 0.0;
}

// tensor Gauss over [a0,b0] (1D) or [a0,b0]x[a1,b1] (2D), kernel radial
inline double tensor_gauss_1d(const Fn1& kr, double a, double b, double c0, double h, int order) {
    const GaussRule& r = gauss_rule(order);
    double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    double s = 0.0;
    for (std::size_t i = 0; i < r.x.size(); ++i) {
        double u = mid + half * r.x[i];
        s += r.w[i] * kr(std::abs(u)) * hat(u, c0, h);
    }
    return s * half;
}

inline double tensor_gauss_2d(const Fn1& kr, double a0, double b0, double a1, double b1,
                              double c0, double c1, double h, int order) {
    const GaussRule& r = gauss_rule(order);
    double m0 = 0.5 * (a0 + b0), h0 = 0.5 * (b0 - a0);
    double m1 = 0.5 * (a1 + b1), h1 = 0.5 * (b1 - a1);
    double s = 0.0;
    for (std::size_t i = 0; i < r.x.size(); ++i) {
        double u = m0 + h0 * r.x[i];
        double wu = r.w[i] * hat(u, c0, h);
        if (wu == 0.0) continue;
        double inner = 0.0;
        for (std::size_t j = 0; j < r.x.size(); ++j) {
            double v = m1 + h1 * r.x[j];
            inner += r.w[j] * kr(std::hypot(u, v)) * hat(v, c1, h);
        }
        s += wu * inner;
    }
    return s * h0 * h1;
}

// rectangle with the singular corner at the origin: [0,W]x[0,H] in |u| space,
// axis signs and hat centers already reflected by the caller
inline double corner_shells_2d(const Fn1& kr, double W, double H, double su, double sv,
                               double c0, double c1, double h) {
    // bounds below live in |u| space; map back through the axis signs
    auto piece = [&](double a0, double b0, double a1, double b1) {
        double ra0 = su > 0.0 ? a0 : -b0, rb0 = su > 0.0 ? b0 : -a0;
        double ra1 = sv > 0.0 ? a1 : -b1, rb1 = sv > 0.0 ? b1 : -a1;
        return tensor_gauss_2d(kr, ra0, rb0, ra1, rb1, c0, c1, h, 16);
    };
    double total = 0.0;
    double w_hi = W, h_hi = H;
    for (int k = 0; k < 52; ++k) {
        double w_lo = 0.5 * w_hi, h_lo = 0.5 * h_hi;
        // shell = full box minus inner box, as two rectangles
        double shell = piece(w_lo, w_hi, 0.0, h_hi) + piece(0.0, w_lo, h_lo, h_hi);
        total += shell;
        w_hi = w_lo;
        h_hi = h_lo;
        if (k > 6 && std::abs(shell) < 1e-13 * std::max(std::abs(total), 1e-300)) break;
    }
    return total;
}

}  // namespace detail

// kr: radial kernel value at r > 0, integrable at 0 in dimension `dim`.
inline double cell_pair_integral(const Fn1& kr, int dim, double h, int d0, int d1 = 0) {
    if (dim == 1) {
        double lo = (d0 - 1) * h, hi = (d0 + 1) * h, c = d0 * h;
        if (lo >= 0.0 || hi <= 0.0) {
            // singular point not interior; may touch an endpoint
            double s = 0.0;
            auto f = [&](double u) { return kr(std::abs(u)) * detail::hat(u, c, h); };
            if (lo == 0.0)
                s = adaptive_singular_left(f, lo, hi, 1e-12);
            else if (hi == 0.0)
                s = adaptive_singular_right(f, lo, hi, 1e-12);
            else
                s = detail::tensor_gauss_1d(kr, lo, hi, c, h, 32);
            return s;
        }
        // origin interior (d0 == 0): split
        auto f = [&](double u) { return kr(std::abs(u)) * detail::hat(u, c, h); };
        return adaptive_singular_right(f, lo, 0.0, 1e-12) + adaptive_singular_left(f, 0.0, hi, 1e-12);
    }
    if (dim != 2) throw std::invalid_argument("cell_pair_integral: dim must be 1 or 2");
    // split the support rectangle at the coordinate axes; each sub-rectangle
    // either stays clear of the origin or has it exactly at a corner
    double lo0 = (d0 - 1) * h, hi0 = (d0 + 1) * h, c0 = d0 * h;
    double lo1 = (d1 - 1) * h, hi1 = (d1 + 1) * h, c1 = d1 * h;
    std::vector<double> cuts0{lo0, hi0}, cuts1{lo1, hi1};
    if (lo0 < 0.0 && hi0 > 0.0) cuts0 = {lo0, 0.0, hi0};
    if (lo1 < 0.0 && hi1 > 0.0) cuts1 = {lo1, 0.0, hi1};
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < cuts0.size(); ++i) {
        for (std::size_t j = 0; j + 1 < cuts1.size(); ++j) {
            double a0 = cuts0[i], b0 = cuts0[i + 1];
            double a1 = cuts1[j], b1 = cuts1[j + 1];
            bool touch0 = (a0 == 0.0 || b0 == 0.0);
            bool touch1 = (a1 == 0.0 || b1 == 0.0);
            if (touch0 && touch1) {
                // reflect so the corner sits at the origin of [0,W]x[0,H]
                double su = (b0 > 0.0) ? 1.0 : -1.0;
                double sv = (b1 > 0.0) ? 1.0 : -1.0;
                double W = std::max(std::abs(a0), std::abs(b0));
                double H = std::max(std::abs(a1), std::abs(b1));
                total += detail::corner_shells_2d(kr, W, H, su, sv, c0, c1, h);
            } else {
                total += detail::tensor_gauss_2d(kr, a0, b0, a1, b1, c0, c1, h, 24);
            }
        }
    }
    return total;
}

// ---------------------------------------------------------------------------
// Exterior tail of the fractional perimeter: T(p) = int_{R^N \ box} |p-y|^-(N+s).
// In polar form this is (1/s) * integral over directions of rho(phi)^-s where
// rho is the exit distance from the box.  Exact in 1D; composite Gauss between
// the corner directions in 2D (the integrand is analytic in between).
// ---------------------------------------------------------------------------

inline double box_exterior_tail_1d(double p, double L, double s) {
    return (std::pow(L - p, -s) + std::pow(L + p, -s)) / s;
}

inline double box_exit_distance(double px, double py, double L, double c, double sn) {
    double best = std::numeric_limits<double>::infinity();
    if (c > 0.0) best = std::min(best, (L - px) / c);
    if (c < 0.0) best = std::min(best, (-L - px) / c);
    if (sn > 0.0) best = std::min(best, (L - py) / sn);
    if (sn < 0.0) best = std::min(best, (-L - py) / sn);
    return best;
}

inline double box_exterior_tail_2d(double px, double py, double L, double s, int order = 32) {
    std::array<double, 4> corners = {std::atan2(L - py, L - px), std::atan2(L - py, -L - px),
                                     std::atan2(-L - py, -L - px), std::atan2(-L - py, L - px)};
    std::sort(corners.begin(), corners.end());
    double total = 0.0;
    for (int seg = 0; seg < 4; ++seg) {
        double a = corners[static_cast<std::size_t>(seg)];
        double b = (seg == 3) ? corners[0] + 2.0 * M_PI : corners[static_cast<std::size_t>(seg + 1)];
        total += gauss(
            [&](double phi) {
                double rho = box_exit_distance(px, py, L, std::cos(phi), std::sin(phi));
                return std::pow(rho, -s);
            },
            a, b, order);
    }
    return total / s;
}

// ---------------------------------------------------------------------------
// Circle-in-disc overlap: angular aperture (radians) of the circle of radius
// rho centered at the origin inside the disc B(c, R) with |c| = r.
// ---------------------------------------------------------------------------

inline double overlap_aperture(double rho, double r, double R) {
    if (rho <= 0.0) return (r < R) ? 2.0 * M_PI : 0.0;
    if (rho >= r + R) return 0.0;
    if (rho <= R - r) return 2.0 * M_PI;   // (needs r < R)
    if (rho <= r - R) return 0.0;          // (needs r > R)
    double c = (rho * rho + r * r - R * R) / (2.0 * rho * r);
    c = std::clamp(c, -1.0, 1.0);
    return 2.0 * std::acos(c);
}

}  // namespace nls::quad

#endif
