#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cqw/quadrature.hpp"
#include "cqw/well.hpp"

// Inter-well coupling of aligned levels, the three emission modes, dipole
// matrix elements between sublevels of consecutive well pairs, and the
// branching probabilities of the cascade.

namespace cqw {

// Sublevels of one coupled pair (j, j+1):
//   phi_+ = a_plus  phi_{j,0} + b_plus  phi_{j+1,1}
//   phi_- = a_minus phi_{j,0} + b_minus phi_{j+1,1}
// normalized under the overlap metric. `basis_phase` is the sign applied to
// phi_{j+1,1} so that the upper sublevel is the in-phase combination
// (a_plus, b_plus >= 0).
struct CoupledLevels {
    double e_plus = 0.0;
    double e_minus = 0.0;
    double delta_e = 0.0;
    double a_plus = 0.0;
    double b_plus = 0.0;
    double a_minus = 0.0;
    double b_minus = 0.0;
    double overlap = 0.0;   // S = <phi_{j,0}|phi_{j+1,1}>, after the basis phase
    double coupling = 0.0;  // K = <phi_{j,0}|V_pair - V_j|phi_{j+1,1}>, after the basis phase
    double basis_phase = 1.0;

    // a^2 + b^2 + 2abS - 1 for the requested sublevel.
    double norm_residual(bool upper) const;
    // <phi_+|phi_-> under the overlap metric.
    double cross_overlap() const;
};

// 2x2 generalized symmetric eigenproblem H v = E S v in a non-orthogonal
// two-state basis.
struct TwoStateProblem {
    double h_aa = 0.0;
    double h_bb = 0.0;
    double h_ab = 0.0;
    double overlap = 0.0;
};

// NumericError when |overlap| > 0.99.
CoupledLevels solve_two_state(const TwoStateProblem& problem);

// Integrals of two sampled basis functions against the potential
// differences of a two-well composite.
struct CouplingIntegrals {
    double overlap = 0.0;    // int phi_a phi_b
    double shift_a = 0.0;    // int phi_a (V - V_a) phi_a
    double shift_b = 0.0;    // int phi_b (V - V_b) phi_b
    double coupling = 0.0;   // int phi_a (V - V_a) phi_b
    double coupling_b = 0.0; // int phi_a (V - V_b) phi_b
};

CouplingIntegrals coupling_integrals(std::span<const double> phi_a, std::span<const double> phi_b,
                                     std::span<const double> v_pair, std::span<const double> v_a,
                                     std::span<const double> v_b, double step);

// Hamiltonian matrix in the {phi_a, phi_b} basis. With `suppress_overlap`
// the overlap and diagonal shifts are dropped, leaving [[E_a, K], [K, E_b]].
TwoStateProblem assemble_two_state(const CouplingIntegrals& ints, double e_a, double e_b,
                                   bool suppress_overlap);

struct CouplingOptions {
    bool suppress_overlap = false;
    std::size_t grid_points = 10001;
};

// Piecewise potential of wells 0..count-1 of the cascade, well i at offset
// i * period and lowered by i * b.
double cascade_potential(const WellParams& params, int count, double x);

// `left` holds {ground, excited} of well j and `right` those of well j+1.
// DomainError unless the ground of well j and the excited level of well j+1
// agree to 1e-6.
CoupledLevels couple_wells(std::span<const BoundState> left, std::span<const BoundState> right,
                           const WellParams& params, const CouplingOptions& options = {});

struct ModeFrequencies {
    double omega_minus = 0.0;
    double omega_zero = 0.0;
    double omega_plus = 0.0;
    // Terminal transitions into the unsplit ground level, DE -+ dE/2.
    double terminal_low = 0.0;
    double terminal_high = 0.0;
};

// (DE - dE, DE, DE + dE); DomainError unless 0 < dE < DE.
ModeFrequencies mode_frequencies(double delta_big, double delta_small);

// <target|x|source> for sublevel transitions between consecutive pairs.
// First letter = source sublevel, second = target (h = upper, l = lower,
// g = unsplit final ground).
struct DipoleMatrix {
    double d_hh = 0.0;
    double d_hl = 0.0;
    double d_lh = 0.0;
    double d_ll = 0.0;
    double d_hg = 0.0;
    double d_lg = 0.0;
};

// Single-well basis functions of wells j, j+1, j+2 sampled on one grid.
struct CascadeWaves {
    UniformGrid grid;
    double origin = 0.0;  // centre of the shared well j+1; dipoles are measured from here
    std::vector<double> ground_j;     // phi_{j,0}
    std::vector<double> ground_j1;    // phi_{j+1,0}
    std::vector<double> excited_j1;   // phi_{j+1,1}
    std::vector<double> excited_j2;   // phi_{j+2,1}
};

CascadeWaves sample_cascade_waves(const BoundState& ground, const BoundState& excited,
                                  const WellParams& params, std::size_t grid_points = 20001);

struct DipoleOptions {
    // Keep only the shared-well term a_y b_x <phi_{j+1,0}|x|phi_{j+1,1}>.
    bool intra_well_only = false;
};

// ConfigError when the sampled arrays do not match the grid.
DipoleMatrix dipole_matrix(const CoupledLevels& levels_j, const CoupledLevels& levels_j1,
                           const CascadeWaves& waves, const WellParams& geometry,
                           const DipoleOptions& options = {});

// <phi_{j+1,0}|x|phi_{j+1,1}> on the sampled grid.
double intra_well_dipole(const CascadeWaves& waves);

enum class Weighting { symmetric, dipole_only, physical, manual };

std::string to_string(Weighting w);
std::optional<Weighting> parse_weighting(const std::string& name);

enum class Mode { minus, zero, plus };

// Row-stochastic transition probabilities between sublevels of consecutive
// pairs. H -> H and L -> L emit omega_0, H -> L emits omega_+, L -> H emits
// omega_-. The terminal hop is deterministic: H feeds the omega_+ mode and
// L the omega_- mode.
struct BranchingModel {
    double p_hh = 0.5;
    double p_hl = 0.5;
    double p_lh = 0.5;
    double p_ll = 0.5;
    Weighting weighting = Weighting::symmetric;
    std::optional<ModeFrequencies> frequencies;

    static constexpr Mode terminal_from_high = Mode::plus;
    static constexpr Mode terminal_from_low = Mode::minus;

    static BranchingModel symmetric();
    // Rows must sum to 1 within 1e-9 and lie in [0, 1]; ValidationError
    // otherwise. Rows are renormalized exactly.
    static BranchingModel manual(double p_hh, double p_hl, double p_lh, double p_ll);

    // Throws DomainError when a row is not stochastic to 1e-15.
    void validate() const;
};

// Fermi golden-rule rates Gamma = omega^3 d^2 (physical) or d^2
// (dipole_only), normalized per source row. DomainError on an all-zero row.
BranchingModel branching_model(const ModeFrequencies& freqs, const DipoleMatrix& dipoles,
                               Weighting weighting);

// Full physics chain from an aligned design to branching probabilities.
struct LevelsReport {
    AlignmentDesign design;
    CoupledLevels coupled;
    ModeFrequencies frequencies;
    DipoleMatrix dipoles;
    BranchingModel branching;
};

LevelsReport derive_levels(const AlignmentDesign& design, Weighting weighting);

}  // namespace cqw
