#ifndef NLS_ENERGIES_HPP
#define NLS_ENERGIES_HPP

#include <string>

#include "nls/fields.hpp"
#include "nls/kernels.hpp"

namespace nls {

struct EnergyParams {
    double s = 0.5;       // fractional perimeter order, in (0, 1)
    double alpha = 2.0;   // attraction power, > 0
    double gamma = 0.0;   // coupling, >= 0
    double mass = 1.0;    // volume / mass constraint, > 0
    Kernel kernel;
    bool deterministic = true;

    EnergyParams(double s_, double alpha_, double gamma_, double mass_, Kernel kernel_)
        : s(s_), alpha(alpha_), gamma(gamma_), mass(mass_), kernel(std::move(kernel_)) {
        validate();
    }
    void validate() const;
};

struct QuadratureMeta {
    double grid_spacing = 0.0;
    std::string diagonal_mode;  // how the zero-offset / near-field pairs were handled
    bool deterministic = true;
};

struct EnergyReport {
    double perimeter_term = 0.0;
    double repulsion_term = 0.0;
    double attraction_term = 0.0;
    double total = 0.0;
    QuadratureMeta meta;
};

// P_s(E): interaction of E with its full complement (box part summed with
// exact near-offset pair integrals, exterior tail integrated per cell).
// empty_warning (optional) is set when E is empty and 0 is returned.
double frac_perimeter(const SetMask& E, double s, bool* empty_warning = nullptr);

// R(h) and R(h1, h2); signed inputs are accepted (differences of densities).
double repulsion(const RealField& h, const Kernel& k);
double repulsion(const RealField& h1, const RealField& h2, const Kernel& k);
double repulsion(const SetMask& E, const Kernel& k);

// I_alpha(h) and I_alpha(h1, h2)
double attraction(const RealField& h, double alpha);
double attraction(const RealField& h1, const RealField& h2, double alpha);

EnergyReport total_F(const SetMask& E, const EnergyParams& p);
EnergyReport total_G(const DensityField& h, const EnergyParams& p);

// v_h at every cell center
RealField potential(const RealField& h, const Kernel& k);
// attractive potential int |x-y|^alpha h(y) dy at every cell center
RealField attraction_potential(const RealField& h, double alpha);

// psi(R, r) = int_{B(0,R)} g(r e1 - y) dy, mesh-free adaptive quadrature
double psi(const Kernel& k, double R, double r);

// phi(r) = int_B |r e1 - y|^alpha dy and its derivative
double phi(double r, double alpha, int dim);
double phi_prime(double r, double alpha, int dim);

// Phi_m(r) = R^(N+alpha) phi(r/R) + psi(R, r), R = (m/omega_N)^(1/N)
double Phi_m(double r, double m, double alpha, const Kernel& k);

struct SobolevResult {
    double seminorm_sq = 0.0;  // [u]_order^2 on the unit circle
    double l2_sq = 0.0;        // ||u||_{L^2(dB)}^2
};

// fractional Sobolev seminorm of order in (0,1) on the unit circle, chord
// distances measured in R^2; diagonal skipped, adjacent pairs refined once
SobolevResult sobolev_seminorm_circle(const BoundaryProfile& p, double order);

}  // namespace nls

#endif
