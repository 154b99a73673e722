#ifndef NLS_KERNELS_HPP
#define NLS_KERNELS_HPP

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "nls/common.hpp"

namespace nls {

enum class KernelKind { riesz, indicator, exponential, truncated_riesz, zero };

// Sampling plan for the numerical hypothesis checks.
struct ProbePlan {
    int n_radii = 64;      // log-spaced radii
    double r_min = 1e-6;
    double r_max = 1e3;
    int n_rays = 16;
};

struct ValidationRow {
    std::string check;
    bool ok;
    double value;
};

struct ValidationReport {
    std::vector<ValidationRow> rows;
    bool satisfies_H = false;
    bool satisfies_I = false;

    std::string to_csv() const;  // rows `check,status,value`
    const ValidationRow* find(std::string_view check) const;
};

// A radial interaction kernel together with its hypothesis metadata.
// Immutable after construction; validation caches the (I) flag.
class Kernel {
public:
    static Kernel riesz(double lambda, int dim);
    static Kernel indicator(double radius, int dim);
    static Kernel exponential(double rate, int dim);
    static Kernel truncated_riesz(double lambda, double cap, int dim);
    static Kernel zero(int dim);

    // Grammar: riesz:LAMBDA | indicator:A | exp:RATE | trunc-riesz:LAMBDA:CAP | zero
    static Kernel parse(std::string_view spec, int dim);

    KernelKind kind() const { return kind_; }
    int dim() const { return dim_; }
    double cutoff() const { return cutoff_; }  // R_g
    std::optional<double> homogeneity() const { return homogeneity_; }
    bool satisfies_I() const;  // runs validation on first use

    // g at radius r (r > 0; the kernel may be singular at 0).
    double radial_value(double r) const;
    // g at a nonzero offset vector of length dim().
    double eval(const double* offset) const;

    // mean value of g over the cube Q_N(0, half_width); errors if g is not
    // locally integrable
    double cell_average(double half_width) const;

    // analytic helpers used by the Lipschitz bound C1(g, m)
    double sup_beyond_cutoff() const;
    double integral_over_cutoff_ball() const;  // int_{B(0, R_g)} g

    bool is_zero() const { return kind_ == KernelKind::zero; }
    std::string spec_string() const;

    ValidationReport validate(const ProbePlan& plan = {}) const;

private:
    Kernel(KernelKind kind, int dim, double p0, double p1);

    KernelKind kind_;
    int dim_;
    double p0_ = 0.0;  // lambda / radius / rate
    double p1_ = 0.0;  // cap for truncated_riesz
    double cutoff_ = 1.0;
    std::optional<double> homogeneity_;
    mutable std::optional<bool> satisfies_I_;
};

// Free-function spellings of the kernel operations.
double kernel_eval(const Kernel& k, const double* offset);
double kernel_cell_average(const Kernel& k, double half_width);
ValidationReport validate_hypotheses(const Kernel& k, const ProbePlan& plan = {});

}  // namespace nls

#endif
