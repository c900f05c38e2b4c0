#pragma once

#include <cstddef>
#include <vector>

#include "cqw/quadrature.hpp"

// Single asymmetric quantum well: bound states from the transcendental
// matching condition and the bias search that aligns neighbouring wells.
//
// Units: 2m*/hbar^2 = 1 and hbar = 1, so the Schroedinger equation reads
// -psi'' + V psi = E psi and photon frequencies equal energy differences.
// The well occupies [0, d]; the left barrier (x < 0) sits at v1 and the
// right barrier (x > d) at v1 - b.

namespace cqw {

struct WellParams {
    double v1 = 0.0;      // left barrier
    double v2 = 0.0;      // well floor
    double b = 0.0;       // right-barrier bias, >= 0
    double d = 1.0;       // well width
    double period = 2.0;  // centre-to-centre spacing of adjacent wells

    double window_top() const { return v1 - b; }

    // Throws DomainError naming the violated condition.
    void validate() const;

    // Parameters of the next well down the cascade: identical shape, every
    // potential lowered by b.
    WellParams shifted_down() const;
};

// Piecewise form
//   x < 0      : left_amp * exp(nu * x)
//   0 <= x <= d: cos_amp * cos(kappa x) + sin_amp * sin(kappa x)
//   x > d      : right_amp * exp(-delta (x - d))
// with left_amp > 0 fixing the overall sign.
struct Wavefunction {
    double nu = 0.0;
    double kappa = 0.0;
    double delta = 0.0;
    double width = 0.0;
    double left_amp = 0.0;
    double cos_amp = 0.0;
    double sin_amp = 0.0;
    double right_amp = 0.0;

    double value(double x) const;
    double derivative(double x) const;
    // Analytic integral of |psi|^2 over the real line.
    double norm_squared() const;
};

struct BoundState {
    int index = 0;
    double energy = 0.0;
    Wavefunction wave;
    bool normalized = false;

    double operator()(double x) const { return wave.value(x); }
    // Zeros of psi strictly inside the well.
    int node_count() const;
};

struct Residual {
    double value = 0.0;
    int branch = 0;
};

// g_n(E) = kappa d - atan(nu/kappa) - atan(delta/kappa) - n pi on the branch
// n closest to a root at this energy. DomainError outside (v2, v1 - b).
Residual transcendental_residual(const WellParams& params, double energy);

// Branch-0 residual g_0(E); the other branches differ by multiples of pi.
double residual_branch0(const WellParams& params, double energy);

inline constexpr std::size_t kEnergyScanPoints = 2048;
inline constexpr double kDefaultEnergyTol = 1e-12;

// All bound levels in increasing energy. Empty when the well binds nothing.
std::vector<BoundState> solve_bound_states(const WellParams& params,
                                           double tol = kDefaultEnergyTol);

int count_levels(const WellParams& params);

struct WaveSamples {
    std::vector<double> x;
    std::vector<double> psi;
};

inline constexpr std::size_t kMinPointsPerRegion = 100;

// Samples `state` translated by `offset`. The grid must reach at least five
// decay lengths into both barriers and hold >= 100 points in each of the
// three regions; otherwise ConfigError.
WaveSamples sample_wavefunction(const BoundState& state, const UniformGrid& grid,
                                double offset = 0.0);

// Grid over [-8/nu, d + 8/delta] with `count` points.
UniformGrid default_well_grid(const BoundState& state, std::size_t count = 10001);

struct AlignmentDesign {
    WellParams params;  // with b set to the aligned bias b*
    BoundState ground;
    BoundState excited;
    double residual = 0.0;  // E1 - E0 - b*
};

inline constexpr double kDefaultDesignTol = 1e-9;

// Bias b* with E1(b*) - E0(b*) = b* and exactly two bound levels. `period`
// is copied into the returned parameters. Throws InfeasibleDesign when the
// alignment has no root or every root leaves a count other than two.
AlignmentDesign design_alignment(double v1, double v2, double d, double tol = kDefaultDesignTol,
                                 double period = 0.0);

// One point of the bias scan used by design_alignment.
struct AlignmentSample {
    double bias = 0.0;
    int levels = 0;
    double mismatch = 0.0;  // E1 - E0 - bias, NaN when fewer than two levels
};

inline constexpr std::size_t kBiasScanPoints = 2048;

// Evaluates h(b) = E1 - E0 - b on a uniform bias grid over (1e-6, v1 - v2 - 1e-6).
// OpenMP-parallel over bias points; bitwise identical to the serial version.
std::vector<AlignmentSample> scan_alignment(double v1, double v2, double d,
                                            std::size_t points = kBiasScanPoints);

namespace serial {
std::vector<AlignmentSample> scan_alignment(double v1, double v2, double d,
                                            std::size_t points = kBiasScanPoints);
}  // namespace serial

}  // namespace cqw
