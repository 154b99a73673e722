#include "nls/constructions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace nls {

namespace {

double axis_coord(const Grid& g, std::size_t k, int axis) {
    auto c = g.cell_center(k);
    return c[static_cast<std::size_t>(axis)];
}

void check_axis(const Grid& g, int axis) {
    if (axis < 0 || axis >= g.dim) throw std::invalid_argument("hyperplane_cut: bad axis");
}

}  // namespace

DensityField hyperplane_cut(const DensityField& f, double target_mass, int axis) {
    check_axis(f.grid, axis);
    double m = f.mass();
    if (!(target_mass > 0.0) || target_mass > m * (1.0 + 1e-12))
        throw std::invalid_argument("hyperplane_cut: target mass must lie in (0, mass(f)]");
    if (target_mass >= m) return f;
    const Grid& g = f.grid;
    double h = g.spacing(), L = g.half_extent;

    // mass of f * chi_{x_axis < t}: continuous and nondecreasing in t
    auto mass_below = [&](double t) {
        double acc = 0.0;
        for (std::size_t k = 0; k < f.v.size(); ++k) {
            if (f.v[k] == 0.0) continue;
            double c = axis_coord(g, k, axis);
            double frac = std::clamp((t - (c - 0.5 * h)) / h, 0.0, 1.0);
            acc += f.v[k] * frac;
        }
        return acc * g.cell_volume();
    };
    double lo = -L, hi = L;
    for (int it = 0; it < 100; ++it) {
        double mid = 0.5 * (lo + hi);
        if (mass_below(mid) < target_mass)
            lo = mid;
        else
            hi = mid;
    }
    double t = 0.5 * (lo + hi);
    std::vector<double> out(f.v.size(), 0.0);
    for (std::size_t k = 0; k < f.v.size(); ++k) {
        if (f.v[k] == 0.0) continue;
        double c = axis_coord(g, k, axis);
        double frac = std::clamp((t - (c - 0.5 * h)) / h, 0.0, 1.0);
        out[k] = f.v[k] * frac;
    }
    return DensityField(g, std::move(out));
}

SetMask hyperplane_cut(const SetMask& f, double target_mass, int axis) {
    check_axis(f.grid, axis);
    double m = f.volume();
    if (!(target_mass > 0.0) || target_mass > m * (1.0 + 1e-12))
        throw std::invalid_argument("hyperplane_cut: target mass must lie in (0, volume(f)]");
    if (target_mass >= m) return f;
    const Grid& g = f.grid;
    double vol = g.cell_volume();

    // cells ordered by coordinate slice along the axis, then row-major
    std::vector<std::size_t> order;
    order.reserve(f.count());
    for (std::size_t k = 0; k < f.v.size(); ++k)
        if (f.v[k]) order.push_back(k);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        int sa = axis == 0 ? static_cast<int>(a % static_cast<std::size_t>(g.n))
                           : static_cast<int>(a / static_cast<std::size_t>(g.n));
        int sb = axis == 0 ? static_cast<int>(b % static_cast<std::size_t>(g.n))
                           : static_cast<int>(b / static_cast<std::size_t>(g.n));
        if (sa != sb) return sa < sb;
        return a < b;
    });
    std::size_t keep = static_cast<std::size_t>(std::llround(target_mass / vol));
    keep = std::min(keep, order.size());
    SetMask out(g);
    for (std::size_t i = 0; i < keep; ++i) out.v[order[i]] = 1;
    return out;
}

CuttingRadiusResult cutting_radius(const SetMask& E, double s, double eta) {
    if (!(eta > 0.0 && eta < 1.0)) throw std::invalid_argument("cutting_radius: need 0 < eta < 1");
    const Grid& g = E.grid;
    double vol = g.cell_volume();

    // |E \ B(0,1)| must not exceed eta
    double excess = 0.0;
    for (std::size_t k = 0; k < E.v.size(); ++k) {
        if (!E.v[k]) continue;
        auto c = g.cell_center(k);
        double r2 = c[0] * c[0] + c[1] * c[1];
        if (r2 > 1.0) excess += vol;
    }
    if (excess > eta * (1.0 + 1e-12))
        throw std::invalid_argument("cutting_radius: |E \\ B| exceeds eta");

    double base = frac_perimeter(E, s);
    const double c_search = 3.0;
    const int n_radii = 32;
    double r_hi = 1.0 + c_search * std::pow(eta, 1.0 / g.dim);

    CuttingRadiusResult best;
    double best_score = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < n_radii; ++i) {
        double r = 1.0 + (r_hi - 1.0) * i / (n_radii - 1);
        SetMask cut(g);
        double removed = 0.0;
        for (std::size_t k = 0; k < E.v.size(); ++k) {
            if (!E.v[k]) continue;
            auto c = g.cell_center(k);
            double r2 = c[0] * c[0] + c[1] * c[1];
            if (r2 <= r * r)
                cut.v[k] = 1;
            else
                removed += vol;
        }
        double score = base - frac_perimeter(cut, s) - removed / std::pow(eta, s / g.dim);
        if (score > best_score) {
            best_score = score;
            best.r = r;
            best.cut = std::move(cut);
            double denom = std::max(removed, vol);
            best.certificate = removed < 0.5 * vol
                                   ? std::numeric_limits<double>::infinity()
                                   : score / denom;
        }
    }
    return best;
}

DensityField rescale_to_mass(const DensityField& f, double m) {
    if (!(m > 0.0)) throw std::invalid_argument("rescale_to_mass: mass must be positive");
    double cur = f.mass();
    if (!(cur > 0.0)) throw std::invalid_argument("rescale_to_mass: field has zero mass");
    return dilate(f, std::pow(m / cur, 1.0 / f.grid.dim));
}

SetMask rescale_to_mass(const SetMask& f, double m) {
    if (!(m > 0.0)) throw std::invalid_argument("rescale_to_mass: mass must be positive");
    double cur = f.volume();
    if (!(cur > 0.0)) throw std::invalid_argument("rescale_to_mass: mask is empty");
    return dilate(f, std::pow(m / cur, 1.0 / f.grid.dim));
}

RoundingResult rounding(const DensityField& h, double theta) {
    if (!(theta >= 0.0 && theta <= 1.0)) throw std::invalid_argument("rounding: theta must be in [0,1]");
    const Grid& g = h.grid;
    double m = h.mass();
    if (!(m > 0.0)) throw std::invalid_argument("rounding: field has zero mass");
    double vol = g.cell_volume();
    double R = std::pow(m / unit_ball_volume(g.dim), 1.0 / g.dim);
    double r_in = (1.0 - theta) * R, r_out = (1.0 + theta) * R;

    std::size_t count = g.cell_count();
    std::vector<double> radius(count);
    for (std::size_t k = 0; k < count; ++k) {
        auto c = g.cell_center(k);
        radius[k] = std::sqrt(c[0] * c[0] + c[1] * c[1]);
    }

    RoundingResult res;
    res.theta = theta;
    std::vector<double> hp(h.v);
    double fill = 0.0, cut = 0.0;
    std::vector<std::size_t> mid_in, mid_out;  // annulus cells inside/outside B[m]
    for (std::size_t k = 0; k < count; ++k) {
        double r = radius[k];
        if (r <= r_in) {
            fill += 1.0 - h.v[k];
            hp[k] = 1.0;
        } else if (r > r_out) {
            cut += h.v[k];
            hp[k] = 0.0;
        } else if (r <= R) {
            mid_in.push_back(k);
        } else {
            mid_out.push_back(k);
        }
    }
    fill *= vol;
    cut *= vol;
    double delta = fill - cut;

    // restore the mass balance inside the annulus
    double remaining = std::abs(delta) / vol;  // in cell units
    if (delta > 0.0) {
        // remove from the outer annulus, largest radii first
        std::stable_sort(mid_out.begin(), mid_out.end(), [&](std::size_t a, std::size_t b) {
            if (radius[a] != radius[b]) return radius[a] > radius[b];
            return a < b;
        });
        for (std::size_t k : mid_out) {
            if (remaining <= 0.0) break;
            double take = std::min(hp[k], remaining);
            hp[k] -= take;
            remaining -= take;
        }
    } else if (delta < 0.0) {
        // add to the inner annulus, smallest radii first
        std::stable_sort(mid_in.begin(), mid_in.end(), [&](std::size_t a, std::size_t b) {
            if (radius[a] != radius[b]) return radius[a] < radius[b];
            return a < b;
        });
        for (std::size_t k : mid_in) {
            if (remaining <= 0.0) break;
            double put = std::min(1.0 - hp[k], remaining);
            hp[k] += put;
            remaining -= put;
        }
    }
    if (remaining * vol > 1e-12 * std::max(m, 1.0))
        throw grid_error("rounding: annulus too thin at this grid resolution to restore the mass");

    res.filled_mass = fill;
    res.cut_mass = cut;
    res.annulus_adjustment = std::abs(delta) - remaining * vol;
    res.h_prime = DensityField(g, std::move(hp));
    const std::vector<double>& out = res.h_prime.v;

    // constraint diagnostics
    double mass_resid = std::abs(res.h_prime.mass() - m) / std::max(m, 1e-300);
    double sandwich = 0.0, onesided = 0.0;
    double d_new = 0.0, d_old = 0.0;   // L1 distances to chi_B[m]
    double change = 0.0, change_e = 0.0;
    for (std::size_t k = 0; k < count; ++k) {
        double r = radius[k];
        double chi = r <= R ? 1.0 : 0.0;
        double lo_bound = r <= r_in ? 1.0 : 0.0;
        double hi_bound = r <= r_out ? 1.0 : 0.0;
        sandwich = std::max({sandwich, lo_bound - out[k], out[k] - hi_bound});
        if (r <= R)
            onesided = std::max(onesided, h.v[k] - out[k]);
        else
            onesided = std::max(onesided, out[k] - h.v[k]);
        d_new += std::abs(out[k] - chi);
        d_old += std::abs(h.v[k] - chi);
        double diff = std::abs(h.v[k] - out[k]);
        change += diff;
        if (r <= r_in || r > r_out) change_e += diff;
    }
    d_new *= vol;
    d_old *= vol;
    change *= vol;
    change_e *= vol;

    res.residual[0] = mass_resid;
    res.residual[1] = sandwich;
    res.residual[2] = onesided;
    res.residual[3] = d_new - d_old;
    res.residual[4] = change - 2.0 * change_e;
    res.constr_ok[0] = mass_resid <= 1e-12;
    res.constr_ok[1] = sandwich <= 1e-12;
    res.constr_ok[2] = onesided <= 1e-12;
    res.constr_ok[3] = res.residual[3] <= vol;
    res.constr_ok[4] = res.residual[4] <= vol;
    return res;
}

RoundingSequence rounding_sequence(const DensityField& h0, const EnergyParams& params, int k_max) {
    if (k_max < 0) throw std::invalid_argument("rounding_sequence: k_max must be nonnegative");
    const Grid& g = h0.grid;
    double m = h0.mass();
    if (!(m > 0.0)) throw std::invalid_argument("rounding_sequence: field has zero mass");
    double R = std::pow(m / unit_ball_volume(g.dim), 1.0 / g.dim);

    auto chi_dist = [&](const DensityField& f) {
        double acc = 0.0;
        for (std::size_t k = 0; k < f.v.size(); ++k) {
            auto c = g.cell_center(k);
            double chi = (c[0] * c[0] + c[1] * c[1] <= R * R) ? 1.0 : 0.0;
            acc += std::abs(f.v[k] - chi);
        }
        return acc * g.cell_volume();
    };

    RoundingSequence seq;
    DensityField cur = h0;
    double e0 = 0.0;
    for (int k = 0;; ++k) {
        double energy = total_G(cur, params).total;
        if (k == 0) e0 = energy;
        double a_k = std::ldexp(1.0, k) * std::pow(R, -g.dim) * chi_dist(cur);
        seq.steps.push_back({k, std::ldexp(1.0, -k), a_k, energy});
        if (energy < e0 - 1e-6 * std::abs(e0)) seq.minimality_violated = true;
        if (k >= k_max) {
            seq.termination = "k-max";
            break;
        }
        DensityField next;
        try {
            next = rounding(cur, std::ldexp(1.0, -k)).h_prime;
        } catch (const grid_error&) {
            seq.termination = "grid-floor";
            break;
        }
        if (next.v == cur.v) {
            seq.termination = "fixed-point";
            // record the terminal iterate once
            double a_next = std::ldexp(1.0, k + 1) * std::pow(R, -g.dim) * chi_dist(next);
            seq.steps.push_back({k + 1, std::ldexp(1.0, -(k + 1)), a_next, energy});
            cur = std::move(next);
            break;
        }
        cur = std::move(next);
    }
    seq.final = std::move(cur);
    return seq;
}

DensityField annulus_density(double R, double theta, const Grid& grid, double fill) {
    if (!(R > 0.0)) throw std::invalid_argument("annulus_density: R must be positive");
    if (!(theta >= 0.0 && theta <= 1.0))
        throw std::invalid_argument("annulus_density: theta must be in [0,1]");
    if (!(fill >= 0.0 && fill <= 1.0))
        throw std::invalid_argument("annulus_density: fill must be in [0,1]");
    if ((1.0 + theta) * R > grid.half_extent)
        throw grid_error("annulus_density: outer radius exceeds the box");
    DensityField out(grid);
    double lo = (1.0 - theta) * R, hi = (1.0 + theta) * R;
    for (std::size_t k = 0; k < out.v.size(); ++k) {
        auto c = grid.cell_center(k);
        double r = std::sqrt(c[0] * c[0] + c[1] * c[1]);
        if (r > lo && r <= hi) out.v[k] = fill;
    }
    return out;
}

}  // namespace nls
