#include "nls/kernels.hpp"

#include <cmath>
#include <limits>

#include "quadrature.hpp"

namespace nls {

namespace {

// perimeter of the circle of radius r inside the square Q_2(0, l)
double arc_in_square(double r, double l) {
    if (r <= 0.0) return 0.0;
    if (r <= l) return 2.0 * kPi * r;
    double diag = l * std::sqrt(2.0);
    if (r >= diag) return 0.0;
    return 2.0 * kPi * r - 8.0 * r * std::acos(l / r);
}

}  // namespace

Kernel::Kernel(KernelKind kind, int dim, double p0, double p1)
    : kind_(kind), dim_(dim), p0_(p0), p1_(p1) {
    if (dim != 1 && dim != 2) throw std::invalid_argument("Kernel: dim must be 1 or 2");
    switch (kind_) {
        case KernelKind::riesz:
            if (p0_ <= 0.0) throw std::invalid_argument("riesz kernel needs lambda > 0");
            homogeneity_ = -p0_;
            cutoff_ = 1.0;
            break;
        case KernelKind::indicator:
            if (p0_ <= 0.0) throw std::invalid_argument("indicator kernel needs radius > 0");
            cutoff_ = p0_;
            break;
        case KernelKind::exponential:
            if (p0_ <= 0.0) throw std::invalid_argument("exponential kernel needs rate > 0");
            cutoff_ = 1.0;
            break;
        case KernelKind::truncated_riesz:
            if (p0_ <= 0.0) throw std::invalid_argument("truncated riesz kernel needs lambda > 0");
            if (p1_ <= 0.0) throw std::invalid_argument("truncated riesz kernel needs cap > 0");
            cutoff_ = 1.0;
            break;
        case KernelKind::zero:
            cutoff_ = 1.0;
            break;
    }
}

Kernel Kernel::riesz(double lambda, int dim) { return Kernel(KernelKind::riesz, dim, lambda, 0.0); }
Kernel Kernel::indicator(double radius, int dim) {
    return Kernel(KernelKind::indicator, dim, radius, 0.0);
}
Kernel Kernel::exponential(double rate, int dim) {
    return Kernel(KernelKind::exponential, dim, rate, 0.0);
}
Kernel Kernel::truncated_riesz(double lambda, double cap, int dim) {
    return Kernel(KernelKind::truncated_riesz, dim, lambda, cap);
}
Kernel Kernel::zero(int dim) { return Kernel(KernelKind::zero, dim, 0.0, 0.0); }

Kernel Kernel::parse(std::string_view spec, int dim) {
    std::vector<std::string> parts;
    std::size_t pos = 0;
    while (pos <= spec.size()) {
        std::size_t colon = spec.find(':', pos);
        if (colon == std::string_view::npos) {
            parts.emplace_back(spec.substr(pos));
            break;
        }
        parts.emplace_back(spec.substr(pos, colon - pos));
        pos = colon + 1;
    }
    auto num = [&](std::size_t i) {
        try {
            return std::stod(parts.at(i));
        } catch (const std::exception&) {
            throw std::invalid_argument("kernel spec: bad number in `" + std::string(spec) + "`");
        }
    };
    const std::string& name = parts.at(0);
    if (name == "zero" && parts.size() == 1) return zero(dim);
    if (name == "riesz" && parts.size() == 2) return riesz(num(1), dim);
    if (name == "indicator" && parts.size() == 2) return indicator(num(1), dim);
    if (name == "exp" && parts.size() == 2) return exponential(num(1), dim);
    if (name == "trunc-riesz" && parts.size() == 3) return truncated_riesz(num(1), num(2), dim);
    throw std::invalid_argument("unrecognized kernel spec: `" + std::string(spec) + "`");
}

std::string Kernel::spec_string() const {
    switch (kind_) {
        case KernelKind::riesz: return "riesz:" + fmt(p0_);
        case KernelKind::indicator: return "indicator:" + fmt(p0_);
        case KernelKind::exponential: return "exp:" + fmt(p0_);
        case KernelKind::truncated_riesz: return "trunc-riesz:" + fmt(p0_) + ":" + fmt(p1_);
        case KernelKind::zero: return "zero";
    }
    return "";
}

double Kernel::radial_value(double r) const {
    if (r <= 0.0) throw std::domain_error("kernel evaluated at zero offset");
    switch (kind_) {
        case KernelKind::riesz: return std::pow(r, -p0_);
        case KernelKind::indicator: return r <= p0_ ? 1.0 : 0.0;
        case KernelKind::exponential: return std::exp(-p0_ * r);
        case KernelKind::truncated_riesz: return std::min(std::pow(r, -p0_), p1_);
        case KernelKind::zero: return 0.0;
    }
    return 0.0;
}

double Kernel::eval(const double* offset) const {
    double r2 = 0.0;
    for (int i = 0; i < dim_; ++i) r2 += offset[i] * offset[i];
    if (r2 == 0.0) throw std::domain_error("kernel evaluated at zero offset");
    return radial_value(std::sqrt(r2));
}

double Kernel::cell_average(double half_width) const {
    if (half_width <= 0.0) throw std::invalid_argument("cell_average: half_width must be positive");
    if (kind_ == KernelKind::zero) return 0.0;
    // local integrability gate
    auto radial_mass = [this](double r) { return radial_value(r) * std::pow(r, dim_ - 1); };
    auto probe = quad::probe_singular_integral(radial_mass, half_width);
    if (!probe.convergent)
        throw std::invalid_argument("cell_average: kernel is not locally integrable (" +
                                    spec_string() + ")");
    double l = half_width;
    double cell = std::pow(2.0 * l, dim_);
    if (dim_ == 1) {
        double integral =
            2.0 * quad::adaptive_singular_left([this](double r) { return radial_value(r); }, 0.0, l,
                                               1e-12);
        return integral / cell;
    }
    auto f = [this, l](double r) { return radial_value(r) * arc_in_square(r, l); };
    double integral = quad::adaptive_singular_left(f, 0.0, l, 1e-12) +
                      quad::adaptive(f, l, l * std::sqrt(2.0), 1e-12);
    return integral / cell;
}

double Kernel::sup_beyond_cutoff() const {
    switch (kind_) {
        case KernelKind::riesz: return std::pow(cutoff_, -p0_);
        case KernelKind::indicator: return 0.0;  // supported in [0, R_g]
        case KernelKind::exponential: return std::exp(-p0_ * cutoff_);
        case KernelKind::truncated_riesz: return std::min(std::pow(cutoff_, -p0_), p1_);
        case KernelKind::zero: return 0.0;
    }
    return 0.0;
}

double Kernel::integral_over_cutoff_ball() const {
    if (kind_ == KernelKind::zero) return 0.0;
    double sigma = unit_sphere_area(dim_);
    auto f = [this](double r) { return radial_value(r) * std::pow(r, dim_ - 1); };
    return sigma * quad::adaptive_singular_left(f, 0.0, cutoff_, 1e-12);
}

bool Kernel::satisfies_I() const {
    if (!satisfies_I_) validate();
    return *satisfies_I_;
}

ValidationReport Kernel::validate(const ProbePlan& plan) const {
    ValidationReport rep;
    auto push = [&rep](std::string name, bool ok, double value) {
        rep.rows.push_back({std::move(name), ok, value});
    };

    // sampled radii, log spaced ascending
    std::vector<double> radii(static_cast<std::size_t>(plan.n_radii));
    double lr0 = std::log(plan.r_min), lr1 = std::log(plan.r_max);
    for (int i = 0; i < plan.n_radii; ++i)
        radii[static_cast<std::size_t>(i)] =
            std::exp(lr0 + (lr1 - lr0) * i / static_cast<double>(plan.n_radii - 1));

    // (a) monotone along rays: g(t x) <= g(x) for t >= 1.  The kernel is
    // radial so every ray sees the same profile; we still sweep the directions
    // of the plan to exercise the vector entry point.
    double worst_increase = 0.0;
    for (int ray = 0; ray < plan.n_rays; ++ray) {
        double ang = 2.0 * kPi * ray / plan.n_rays;
        double dir[2] = {std::cos(ang), std::sin(ang)};
        if (dim_ == 1) dir[0] = (ray % 2 == 0) ? 1.0 : -1.0;
        double prev = std::numeric_limits<double>::infinity();
        for (double r : radii) {
            double off[2] = {dir[0] * r, dim_ == 2 ? dir[1] * r : 0.0};
            double v = eval(off);
            if (v > prev) worst_increase = std::max(worst_increase, v - prev);
            prev = v;
        }
    }
    bool mono_ok = worst_increase <= 1e-12;
    push("monotone_rays", mono_ok, worst_increase);

    // (b) local integrability: int_0^1 g(r) r^(N-1) dr
    auto mass_n = [this](double r) { return radial_value(r) * std::pow(r, dim_ - 1); };
    auto probe_h = quad::probe_singular_integral(mass_n, 1.0);
    push("local_integrability", probe_h.convergent, probe_h.value);

    // (c) bounded beyond the cutoff radius
    double sup_tail = 0.0;
    for (double r : radii)
        if (r > cutoff_) sup_tail = std::max(sup_tail, radial_value(r));
    double at_cutoff = radial_value(cutoff_);
    bool bounded_ok = std::isfinite(sup_tail) && sup_tail <= at_cutoff * (1.0 + 1e-9) + 1e-300;
    push("bounded_beyond_cutoff", bounded_ok, sup_tail);

    // (d) hypothesis (I) integrability: int_0^1 g(r) r^N dr  (= |x| g in L1_loc)
    auto mass_i = [this](double r) { return radial_value(r) * std::pow(r, dim_); };
    auto probe_i = quad::probe_singular_integral(mass_i, 1.0);
    push("I_integrability", probe_i.convergent, probe_i.value);

    // lower-dimensional integrability; in 1D this reduces to boundedness near 0
    bool lower_ok;
    double lower_val;
    if (dim_ >= 2) {
        auto mass_low = [this](double r) { return radial_value(r) * std::pow(r, dim_ - 2); };
        auto probe_low = quad::probe_singular_integral(mass_low, 1.0);
        lower_ok = probe_low.convergent;
        lower_val = probe_low.value;
        push("lower_dim_integrability", lower_ok, lower_val);
    } else {
        // bounded near zero iff the profile saturates as r -> 0
        double g1 = radial_value(plan.r_min), g2 = radial_value(2.0 * plan.r_min);
        lower_val = g1;
        lower_ok = std::isfinite(g1) && (g2 == 0.0 ? g1 == 0.0 : g1 / g2 <= 1.0 + 1e-3);
        push("bounded_near_zero", lower_ok, lower_val);
    }

    // (e) growth envelope (sup_{r <= rho} g(r) r^N must vanish as rho -> 0)
    double env_min = 0.0, env_max = 0.0;
    {
        double env = 0.0;
        for (std::size_t i = 0; i < radii.size(); ++i) {
            double r = radii[i];
            if (r > 1.0) break;
            env = std::max(env, radial_value(r) * std::pow(r, dim_));
            if (i == 0) env_min = env;
            env_max = env;
        }
    }
    bool growth_ok = env_min <= std::max(1e-3 * env_max, 1e-300);
    push("growth_envelope", growth_ok, env_max > 0.0 ? env_min / env_max : 0.0);

    rep.satisfies_H = mono_ok && probe_h.convergent && bounded_ok;
    bool i_extra = (dim_ == 1) ? probe_i.convergent : (probe_i.convergent && lower_ok);
    rep.satisfies_I = rep.satisfies_H && i_extra;
    push("satisfies_H", rep.satisfies_H, rep.satisfies_H ? 1.0 : 0.0);
    push("satisfies_I", rep.satisfies_I, rep.satisfies_I ? 1.0 : 0.0);

    satisfies_I_ = rep.satisfies_I;
    return rep;
}

std::string ValidationReport::to_csv() const {
    std::string out = "check,status,value\n";
    for (const auto& row : rows)
        out += row.check + "," + (row.ok ? "pass" : "fail") + "," + fmt(row.value) + "\n";
    return out;
}

const ValidationRow* ValidationReport::find(std::string_view check) const {
    for (const auto& row : rows)
        if (row.check == check) return &row;
    return nullptr;
}

double kernel_eval(const Kernel& k, const double* offset) { return k.eval(offset); }
double kernel_cell_average(const Kernel& k, double half_width) { return k.cell_average(half_width); }
ValidationReport validate_hypotheses(const Kernel& k, const ProbePlan& plan) {
    return k.validate(plan);
}

}  // namespace nls
