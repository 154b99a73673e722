#ifndef NLS_CONSTRUCTIONS_HPP
#define NLS_CONSTRUCTIONS_HPP

#include <array>
#include <string>

#include "nls/energies.hpp"
#include "nls/fields.hpp"

namespace nls {

// Outcome of the rounding transformation.  The five constraint slots are, in
// order: mass preservation, sandwiching between the dilated balls, one-sided
// comparison with h across the ball boundary, non-increase of the L1 distance
// to the ball, and concentration of the change on the inner/outer regions.
struct RoundingResult {
    DensityField h_prime;
    double theta = 0.0;
    double filled_mass = 0.0;
    double cut_mass = 0.0;
    double annulus_adjustment = 0.0;
    std::array<bool, 5> constr_ok{false, false, false, false, false};
    std::array<double, 5> residual{0, 0, 0, 0, 0};

    bool all_ok() const {
        for (bool b : constr_ok)
            if (!b) return false;
        return true;
    }
};

struct RoundingStep {
    int k = 0;
    double theta = 0.0;
    double a_k = 0.0;    // 2^k R^-N ||h_k - chi_B[m]||_1
    double energy = 0.0; // G(h_k)
};

struct RoundingSequence {
    std::vector<RoundingStep> steps;
    DensityField final;
    std::string termination;          // "fixed-point" | "k-max" | "grid-floor"
    bool minimality_violated = false; // some G(h_k) dropped below G(h_0)
};

// f * chi_{x_axis < t}, t chosen by bisection so the result has the target
// mass.  Densities reach the target exactly through the partially covered
// slice; masks trim boundary-slice cells in row-major order and land within
// one cell volume.
DensityField hyperplane_cut(const DensityField& f, double target_mass, int axis);
SetMask hyperplane_cut(const SetMask& f, double target_mass, int axis);

struct CuttingRadiusResult {
    double r = 1.0;
    SetMask cut;
    double certificate = 0.0;  // +inf sentinel when nothing was removed
};

// Search over 32 radii in [1, 1 + 3 eta^(1/N)] for the cut that maximizes
// P_s(E) - P_s(E cap B(0,r)) - |E \ B(0,r)| / eta^(s/N).  E must be centered
// (asymmetry-optimal ball at the origin) and volume-normalized.
CuttingRadiusResult cutting_radius(const SetMask& E, double s, double eta);

DensityField rescale_to_mass(const DensityField& f, double m);
SetMask rescale_to_mass(const SetMask& f, double m);

// The radial greedy rounding construction.  h must be translated so its
// asymmetry-optimal ball is centered at the origin.  Throws grid_error if the
// mass balance cannot be restored at this grid resolution (thin annuli).
RoundingResult rounding(const DensityField& h, double theta);

RoundingSequence rounding_sequence(const DensityField& h0, const EnergyParams& params, int k_max);

DensityField annulus_density(double R, double theta, const Grid& grid, double fill);

}  // namespace nls

#endif
