#ifndef NLS_FIELDS_HPP
#define NLS_FIELDS_HPP

#include <array>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "nls/common.hpp"

namespace nls {

// Uniform cell-centered grid on the symmetric box [-L, L]^N, N = 1 or 2.
// 2D cells are stored row-major: index = iy * n + ix.
struct Grid {
    int dim = 1;
    int n = 8;             // cells per axis
    double half_extent = 1.0;

    Grid() = default;
    Grid(int dim_, int n_, double L);

    double spacing() const { return 2.0 * half_extent / n; }
    double cell_volume() const;
    std::size_t cell_count() const;
    double center(int i) const { return -half_extent + (i + 0.5) * spacing(); }
    std::array<double, 2> cell_center(std::size_t k) const;

    bool operator==(const Grid& o) const {
        return dim == o.dim && n == o.n && half_extent == o.half_extent;
    }
};

// Real-valued cell data; no range constraint.  Gradients, potentials and
// density differences live here.
struct RealField {
    Grid grid;
    std::vector<double> v;

    RealField() = default;
    RealField(const Grid& g, double fill = 0.0)
        : grid(g), v(g.cell_count(), fill) {}
    RealField(const Grid& g, std::vector<double> values);

    double mass() const;          // sum v * h^N
    double l1_norm() const;       // sum |v| * h^N
    double sup_norm() const;
};

// Element of the class L^1(R^N; [0,1]): cell values validated to [0, 1].
struct DensityField : RealField {
    DensityField() = default;
    DensityField(const Grid& g, double fill = 0.0);
    DensityField(const Grid& g, std::vector<double> values);
    static DensityField clamped(const Grid& g, std::vector<double> values);
};

struct SetMask {
    Grid grid;
    std::vector<std::uint8_t> v;

    SetMask() = default;
    explicit SetMask(const Grid& g) : grid(g), v(g.cell_count(), 0) {}

    std::size_t count() const;
    double volume() const { return static_cast<double>(count()) * grid.cell_volume(); }
    bool empty() const { return count() == 0; }
    DensityField to_density() const;
};

// Analytic ball: |B[m]| = m exactly, radius (m / omega_N)^(1/N).
struct BallSpec {
    std::array<double, 2> center{0.0, 0.0};
    double mass = 0.0;
    int dim = 1;

    BallSpec(int dim_, double mass_, std::array<double, 2> center_ = {0.0, 0.0});
    double radius() const;
};

// --- construction and sampling ------------------------------------------------

// antialias=false: cell value 1 iff the cell center lies in the ball;
// antialias=true: fractional coverage from 4^N subsamples per cell.
DensityField ball_field(const Grid& grid, const BallSpec& ball, bool antialias);
SetMask ball_mask(const Grid& grid, const BallSpec& ball);

// f[t](x) = f(x/t); densities are resampled bilinearly, masks through a
// coverage resampling followed by a mass-matching threshold.
DensityField dilate(const DensityField& f, double t);
SetMask dilate(const SetMask& f, double t);

struct AsymmetryResult {
    double value = 0.0;                   // A in [0, 2]
    std::array<double, 2> center{0.0, 0.0};
};

// Fraenkel asymmetry: exhaustive search over all cell centers followed by one
// golden-section refinement per axis.  Ties break toward the lexicographically
// smallest center.
AsymmetryResult asymmetry(const RealField& f);
inline AsymmetryResult asymmetry(const SetMask& m) { return asymmetry(m.to_density()); }

std::array<double, 2> barycenter(const RealField& f);

// shift by whole cells, zero-filling; throws grid_error if support is clipped
RealField translate_cells(const RealField& f, const std::array<int, 2>& shift);
DensityField translate_cells(const DensityField& f, const std::array<int, 2>& shift);
SetMask translate_cells(const SetMask& f, const std::array<int, 2>& shift);

// largest |coordinate| + h/2 over supporting cells (0 for empty fields)
double support_radius(const RealField& f);
// exact diameter of the support cell centers (convex-hull based in 2D)
double support_diameter(const RealField& f);

// --- nearly spherical boundary profiles (N = 2) -------------------------------

// u: boundary of B -> (-1, 1) sampled at M uniform angles, optionally backed
// by a truncated Fourier series sum_k a_k cos(k t) + b_k sin(k t) for
// k = first_mode .. first_mode + K - 1.
class BoundaryProfile {
public:
    static BoundaryProfile from_samples(std::vector<double> samples);
    static BoundaryProfile from_fourier(int first_mode, std::vector<double> cos_coeffs,
                                        std::vector<double> sin_coeffs, int samples = 256);

    int sample_count() const { return static_cast<int>(u_.size()); }
    const std::vector<double>& samples() const { return u_; }
    bool has_fourier() const { return !cosc_.empty() || !sinc_.empty(); }
    int first_mode() const { return first_mode_; }
    const std::vector<double>& cos_coeffs() const { return cosc_; }
    const std::vector<double>& sin_coeffs() const { return sinc_; }

    double eval(double theta) const;      // Fourier-exact or linear interpolation
    double sup_norm() const { return sup_; }
    double lip_norm() const { return lip_; }   // finite differences over angles
    bool nearly_spherical() const { return sup_ + lip_ <= 1.0; }

    // radial scaling to |E| = omega_N: returns the profile of the normalized set
    BoundaryProfile volume_normalized() const;

private:
    BoundaryProfile() = default;
    void refresh_norms();

    std::vector<double> u_;
    std::vector<double> cosc_, sinc_;
    int first_mode_ = 1;
    double sup_ = 0.0, lip_ = 0.0;
};

// Rasterize the star-shaped set {r <= 1 + u(theta)} after volume
// renormalization.  Throws std::invalid_argument if sup |u| >= 1 or the
// profile is not nearly spherical, grid_error if the set leaves the box.
SetMask profile_to_mask(const BoundaryProfile& p, const Grid& grid);

// --- field files ---------------------------------------------------------------
// `NLSF1 dim=N n=<cells> L=<half_extent> kind=<density|mask>` + row-major values.

void save_field(const std::string& path, const DensityField& f);
void save_field(const std::string& path, const SetMask& f);
std::variant<DensityField, SetMask> load_field(const std::string& path);

// profile files: `NLSP1 M=<samples> first_mode=<k0> K=<modes>` + samples (+coeffs)
void save_profile(const std::string& path, const BoundaryProfile& p);
BoundaryProfile load_profile(const std::string& path);

}  // namespace nls

#endif
