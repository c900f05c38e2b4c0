#include "cqw/coupled_modes.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

#include "cqw/errors.hpp"

namespace cqw {

double CoupledLevels::norm_residual(bool upper) const {
    const double a = upper ? a_plus : a_minus;
    const double b = upper ? b_plus : b_minus;
    return a * a + b * b + 2.0 * a * b * overlap - 1.0;
}

double CoupledLevels::cross_overlap() const {
    return a_plus * a_minus + b_plus * b_minus + (a_plus * b_minus + b_plus * a_minus) * overlap;
}

namespace {

struct Eigvec {
    double a;
    double b;
};

Eigvec eigenvector(const TwoStateProblem& p, double e) {
    const double off = p.h_ab - e * p.overlap;
    // Null vector of either row of (H - E S); take the better-conditioned one.
    Eigvec r1{-off, p.h_aa - e};
    Eigvec r2{p.h_bb - e, -off};
    Eigvec v = (std::hypot(r1.a, r1.b) >= std::hypot(r2.a, r2.b)) ? r1 : r2;
    if (v.a == 0.0 && v.b == 0.0) throw NumericError("two-state eigenvector is undetermined");
    const double norm2 = v.a * v.a + v.b * v.b + 2.0 * v.a * v.b * p.overlap;
    const double s = 1.0 / std::sqrt(norm2);
    v.a *= s;
    v.b *= s;
    if (v.a < 0.0 || (v.a == 0.0 && v.b < 0.0)) {
        v.a = -v.a;
        v.b = -v.b;
    }
    return v;
}

}  // namespace

CoupledLevels solve_two_state(const TwoStateProblem& p) {
    if (!(std::abs(p.overlap) <= 0.99)) {
        std::ostringstream msg;
        msg << "overlap metric near singular (|S| = " << std::abs(p.overlap) << " > 0.99)";
        throw NumericError(msg.str());
    }
    const double s = p.overlap;
    const double disc = (p.h_aa - p.h_bb) * (p.h_aa - p.h_bb) +
                        4.0 * (p.h_ab - s * p.h_aa) * (p.h_ab - s * p.h_bb);
    const double root = std::sqrt(std::max(disc, 0.0));
    const double centre = p.h_aa + p.h_bb - 2.0 * p.h_ab * s;
    const double denom = 2.0 * (1.0 - s * s);

    CoupledLevels out;
    out.e_plus = (centre + root) / denom;
    out.e_minus = (centre - root) / denom;
    out.delta_e = out.e_plus - out.e_minus;
    if (!(out.delta_e > 0.0)) throw NumericError("coupled sublevels did not split");

    const Eigvec up = eigenvector(p, out.e_plus);
    const Eigvec down = eigenvector(p, out.e_minus);
    out.a_plus = up.a;
    out.b_plus = up.b;
    out.a_minus = down.a;
    out.b_minus = down.b;
    out.overlap = s;
    out.basis_phase = 1.0;
    if (up.b < 0.0) {
        out.b_plus = -out.b_plus;
        out.b_minus = -out.b_minus;
        out.overlap = -out.overlap;
        out.basis_phase = -1.0;
    }
    return out;
}

CouplingIntegrals coupling_integrals(std::span<const double> phi_a, std::span<const double> phi_b,
                                     std::span<const double> v_pair, std::span<const double> v_a,
                                     std::span<const double> v_b, double step) {
    const std::size_t n = phi_a.size();
    if (phi_b.size() != n || v_pair.size() != n || v_a.size() != n || v_b.size() != n) {
        throw ConfigError("coupling integrands sampled on different grids");
    }
    std::vector<double> dva(n), dvb(n);
    for (std::size_t i = 0; i < n; ++i) {
        dva[i] = v_pair[i] - v_a[i];
        dvb[i] = v_pair[i] - v_b[i];
    }
    CouplingIntegrals out;
    out.overlap = simpson_product(phi_a, phi_b, step);
    out.shift_a = simpson_product(phi_a, dva, phi_a, step);
    out.shift_b = simpson_product(phi_b, dvb, phi_b, step);
    out.coupling = simpson_product(phi_a, dva, phi_b, step);
    out.coupling_b = simpson_product(phi_a, dvb, phi_b, step);
    return out;
}

TwoStateProblem assemble_two_state(const CouplingIntegrals& ints, double e_a, double e_b,
                                   bool suppress_overlap) {
    if (suppress_overlap) return {e_a, e_b, ints.coupling, 0.0};
    // <b|H|a> = E_a S + int phi_b (V - V_a) phi_a and <a|H|b> = E_b S + int phi_a (V - V_b) phi_b
    // agree up to quadrature error; use their mean so H stays symmetric.
    const double h_ab =
        0.5 * ((e_a * ints.overlap + ints.coupling) + (e_b * ints.overlap + ints.coupling_b));
    return {e_a + ints.shift_a, e_b + ints.shift_b, h_ab, ints.overlap};
}

double cascade_potential(const WellParams& p, int count, double x) {
    if (x < 0.0) return p.v1;
    const double cell = std::floor(x / p.period);
    if (cell >= count) return p.v1 - count * p.b;
    const double local = x - cell * p.period;
    if (local <= p.d) return p.v2 - cell * p.b;
    return p.v1 - (cell + 1.0) * p.b;
}

CoupledLevels couple_wells(std::span<const BoundState> left, std::span<const BoundState> right,
                           const WellParams& params, const CouplingOptions& options) {
    if (left.size() != 2 || right.size() != 2) {
        throw DomainError("couple_wells needs the two levels of each well");
    }
    params.validate();
    const BoundState& ground = left[0];
    const BoundState& excited = right[1];
    if (std::abs(ground.energy - excited.energy) > 1e-6) {
        std::ostringstream msg;
        msg << "wells are not aligned: E0(j) = " << ground.energy << ", E1(j+1) = " << excited.energy;
        throw DomainError(msg.str());
    }

    const double L = params.period;
    const WellParams next = params.shifted_down();
    const double lo = -8.0 / ground.wave.nu;
    const double hi = L + params.d + 8.0 / excited.wave.delta;

    // The potential steps at 0, d, L and L + d; integrating each constant
    // piece separately keeps Simpson at full order.
    const std::array<double, 6> edges{lo, 0.0, params.d, L, L + params.d, hi};
    const double span = hi - lo;
    CouplingIntegrals total;
    for (std::size_t k = 0; k + 1 < edges.size(); ++k) {
        const double a = edges[k];
        const double b = edges[k + 1];
        auto points = static_cast<std::size_t>(
            std::llround(static_cast<double>(options.grid_points) * (b - a) / span));
        points = std::max<std::size_t>(points, 101);
        if (points % 2 == 0) ++points;
        const UniformGrid grid = UniformGrid::spanning(a, b, points);
        std::vector<double> phi_a(points), phi_b(points), v_pair(points), v_a(points), v_b(points);
        for (std::size_t i = 0; i < points; ++i) {
            // Potentials are read just inside the segment so both ends see this piece's value.
            const double x = grid.at(i);
            const double xv = std::clamp(x, a + 1e-12 * span, b - 1e-12 * span);
            phi_a[i] = ground(x);
            phi_b[i] = excited(x - L);
            v_pair[i] = cascade_potential(params, 2, xv);
            v_a[i] = cascade_potential(params, 1, xv);
            v_b[i] = cascade_potential(next, 1, xv - L);
        }
        const CouplingIntegrals part = coupling_integrals(phi_a, phi_b, v_pair, v_a, v_b, grid.step);
        total.overlap += part.overlap;
        total.shift_a += part.shift_a;
        total.shift_b += part.shift_b;
        total.coupling += part.coupling;
        total.coupling_b += part.coupling_b;
    }

    const TwoStateProblem problem =
        assemble_two_state(total, ground.energy, excited.energy, options.suppress_overlap);
    CoupledLevels out = solve_two_state(problem);
    out.coupling = out.basis_phase * total.coupling;
    if (options.suppress_overlap) out.overlap = 0.0;
    return out;
}

ModeFrequencies mode_frequencies(double delta_big, double delta_small) {
    if (!(delta_small > 0.0) || !(delta_small < delta_big)) {
        std::ostringstream msg;
        msg << "need 0 < dE < DE for positive mode frequencies (DE=" << delta_big
            << ", dE=" << delta_small << ")";
        throw DomainError(msg.str());
    }
    return {delta_big - delta_small, delta_big, delta_big + delta_small,
            delta_big - 0.5 * delta_small, delta_big + 0.5 * delta_small};
}

CascadeWaves sample_cascade_waves(const BoundState& ground, const BoundState& excited,
                                  const WellParams& params, std::size_t grid_points) {
    const double L = params.period;
    const double lo = -8.0 / std::min(ground.wave.nu, excited.wave.nu);
    const double hi = 2.0 * L + params.d + 8.0 / std::min(ground.wave.delta, excited.wave.delta);
    CascadeWaves w;
    w.grid = UniformGrid::spanning(lo, hi, grid_points);
    w.origin = L + 0.5 * params.d;
    w.ground_j.resize(grid_points);
    w.ground_j1.resize(grid_points);
    w.excited_j1.resize(grid_points);
    w.excited_j2.resize(grid_points);
    for (std::size_t i = 0; i < grid_points; ++i) {
        const double x = w.grid.at(i);
        w.ground_j[i] = ground(x);
        w.ground_j1[i] = ground(x - L);
        w.excited_j1[i] = excited(x - L);
        w.excited_j2[i] = excited(x - 2.0 * L);
    }
    return w;
}

namespace {

void check_waves(const CascadeWaves& w) {
    const std::size_t n = w.grid.count;
    if (w.ground_j.size() != n || w.ground_j1.size() != n || w.excited_j1.size() != n ||
        w.excited_j2.size() != n) {
        throw ConfigError("cascade wavefunctions do not match the grid");
    }
}

double position_element(const CascadeWaves& w, std::span<const double> f, std::span<const double> g) {
    std::vector<double> prod(w.grid.count);
    for (std::size_t i = 0; i < prod.size(); ++i) prod[i] = f[i] * (w.grid.at(i) - w.origin) * g[i];
    return simpson(prod, w.grid.step);
}

}  // namespace

double intra_well_dipole(const CascadeWaves& waves) {
    check_waves(waves);
    return position_element(waves, waves.ground_j1, waves.excited_j1);
}

DipoleMatrix dipole_matrix(const CoupledLevels& src, const CoupledLevels& tgt, const CascadeWaves& w,
                           const WellParams& geometry, const DipoleOptions& options) {
    check_waves(w);
    if (std::abs(w.origin - (geometry.period + 0.5 * geometry.d)) > 1e-12 * geometry.period) {
        throw ConfigError("cascade wavefunctions were sampled for a different geometry");
    }
    const double shared = position_element(w, w.ground_j1, w.excited_j1);
    double j1_j0 = 0.0, j2_j0 = 0.0, j2_j1 = 0.0;
    if (!options.intra_well_only) {
        j1_j0 = position_element(w, w.ground_j1, w.ground_j);
        j2_j0 = position_element(w, w.excited_j2, w.ground_j);
        j2_j1 = position_element(w, w.excited_j2, w.excited_j1);
    }
    const double ps = src.basis_phase;
    const double pt = tgt.basis_phase;

    auto element = [&](double a_x, double b_x, double a_y, double b_y) {
        return a_y * a_x * j1_j0 + a_y * ps * b_x * shared + pt * b_y * a_x * j2_j0 +
               pt * b_y * ps * b_x * j2_j1;
    };
    DipoleMatrix d;
    d.d_hh = element(src.a_plus, src.b_plus, tgt.a_plus, tgt.b_plus);
    d.d_hl = element(src.a_plus, src.b_plus, tgt.a_minus, tgt.b_minus);
    d.d_lh = element(src.a_minus, src.b_minus, tgt.a_plus, tgt.b_plus);
    d.d_ll = element(src.a_minus, src.b_minus, tgt.a_minus, tgt.b_minus);
    d.d_hg = src.a_plus * j1_j0 + ps * src.b_plus * shared;
    d.d_lg = src.a_minus * j1_j0 + ps * src.b_minus * shared;
    return d;
}

std::string to_string(Weighting w) {
    switch (w) {
        case Weighting::symmetric: return "symmetric";
        case Weighting::dipole_only: return "dipole-only";
        case Weighting::physical: return "physical";
        case Weighting::manual: return "manual";
    }
    return "unknown";
}

std::optional<Weighting> parse_weighting(const std::string& name) {
    if (name == "symmetric") return Weighting::symmetric;
    if (name == "dipole-only") return Weighting::dipole_only;
    if (name == "physical") return Weighting::physical;
    if (name == "manual") return Weighting::manual;
    return std::nullopt;
}

BranchingModel BranchingModel::symmetric() { return {}; }

BranchingModel BranchingModel::manual(double p_hh, double p_hl, double p_lh, double p_ll) {
    const std::array<std::pair<const char*, double>, 4> entries{
        {{"p_hh", p_hh}, {"p_hl", p_hl}, {"p_lh", p_lh}, {"p_ll", p_ll}}};
    for (const auto& [name, value] : entries) {
        if (!(value >= 0.0 && value <= 1.0)) {
            throw ValidationError(std::string("branching.") + name + " must lie in [0, 1]");
        }
    }
    if (std::abs(p_hh + p_hl - 1.0) > 1e-9) {
        std::ostringstream msg;
        msg << "branching.p_hh + branching.p_hl must be 1 (got " << p_hh + p_hl << ")";
        throw ValidationError(msg.str());
    }
    if (std::abs(p_lh + p_ll - 1.0) > 1e-9) {
        std::ostringstream msg;
        msg << "branching.p_lh + branching.p_ll must be 1 (got " << p_lh + p_ll << ")";
        throw ValidationError(msg.str());
    }
    BranchingModel m;
    m.weighting = Weighting::manual;
    m.p_hl = p_hl / (p_hh + p_hl);
    m.p_hh = 1.0 - m.p_hl;
    m.p_lh = p_lh / (p_lh + p_ll);
    m.p_ll = 1.0 - m.p_lh;
    return m;
}

void BranchingModel::validate() const {
    for (double p : {p_hh, p_hl, p_lh, p_ll}) {
        if (!(p >= 0.0 && p <= 1.0)) throw DomainError("branching probability outside [0, 1]");
    }
    if (std::abs(p_hh + p_hl - 1.0) > 1e-15 || std::abs(p_lh + p_ll - 1.0) > 1e-15) {
        throw DomainError("branching rows are not stochastic");
    }
}

BranchingModel branching_model(const ModeFrequencies& f, const DipoleMatrix& d, Weighting weighting) {
    if (weighting == Weighting::manual) throw DomainError("manual branching is not derived from dipoles");
    BranchingModel m;
    m.weighting = weighting;
    m.frequencies = f;
    if (weighting == Weighting::symmetric) return m;

    auto rate = [&](double omega, double dip) {
        const double w = weighting == Weighting::physical ? omega * omega * omega : 1.0;
        return w * dip * dip;
    };
    const double g_hh = rate(f.omega_zero, d.d_hh);
    const double g_hl = rate(f.omega_plus, d.d_hl);
    const double g_lh = rate(f.omega_minus, d.d_lh);
    const double g_ll = rate(f.omega_zero, d.d_ll);
    if (!(g_hh + g_hl > 0.0) || !(g_lh + g_ll > 0.0)) {
        throw DomainError("degenerate branching: a source sublevel has no radiative channel");
    }
    m.p_hl = g_hl / (g_hh + g_hl);
    m.p_hh = 1.0 - m.p_hl;
    m.p_lh = g_lh / (g_lh + g_ll);
    m.p_ll = 1.0 - m.p_lh;
    return m;
}

LevelsReport derive_levels(const AlignmentDesign& design, Weighting weighting) {
    const WellParams& params = design.params;
    const std::array<BoundState, 2> left{design.ground, design.excited};
    std::array<BoundState, 2> right = left;
    for (BoundState& s : right) s.energy -= params.b;

    LevelsReport r;
    r.design = design;
    r.coupled = couple_wells(left, right, params);
    r.frequencies = mode_frequencies(design.excited.energy - design.ground.energy, r.coupled.delta_e);
    const CascadeWaves waves = sample_cascade_waves(design.ground, design.excited, params);
    r.dipoles = dipole_matrix(r.coupled, r.coupled, waves, params);
    if (weighting == Weighting::symmetric) {
        r.branching = BranchingModel::symmetric();
        r.branching.frequencies = r.frequencies;
    } else {
        r.branching = branching_model(r.frequencies, r.dipoles, weighting);
    }
    return r;
}

}  // namespace cqw
