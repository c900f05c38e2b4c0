#include "cqw/well.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>

#include "cqw/errors.hpp"

namespace cqw {

namespace {

constexpr double kPi = std::numbers::pi;

struct EnergyScan {
    std::vector<double> energy;
    std::vector<double> g0;
};

EnergyScan scan_residual(const WellParams& p) {
    const double lo = p.v2;
    const double hi = p.window_top();
    const double eps = 1e-9 * (hi - lo);
    const UniformGrid grid = UniformGrid::spanning(lo + eps, hi - eps, kEnergyScanPoints);
    EnergyScan scan;
    scan.energy = grid.points();
    scan.g0.resize(scan.energy.size());
    for (std::size_t i = 0; i < scan.energy.size(); ++i) {
        scan.g0[i] = residual_branch0(p, scan.energy[i]);
    }
    return scan;
}

// Index i with a sign change of (g0 - shift) between scan points i and i+1.
std::ptrdiff_t find_bracket(const EnergyScan& scan, double shift) {
    for (std::size_t i = 0; i + 1 < scan.g0.size(); ++i) {
        const double a = scan.g0[i] - shift;
        const double b = scan.g0[i + 1] - shift;
        if ((a <= 0.0 && b > 0.0) || (a >= 0.0 && b < 0.0)) return static_cast<std::ptrdiff_t>(i);
    }
    return -1;
}

template <class F>
double bisect(F&& f, double lo, double hi, double tol) {
    double f_lo = f(lo);
    for (int iter = 0; iter < 400 && (hi - lo) > tol; ++iter) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        const double f_mid = f(mid);
        if ((f_mid <= 0.0) == (f_lo <= 0.0)) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

Wavefunction build_wave(const WellParams& p, double energy) {
    Wavefunction w;
    w.nu = std::sqrt(p.v1 - energy);
    w.kappa = std::sqrt(energy - p.v2);
    w.delta = std::sqrt(p.window_top() - energy);
    w.width = p.d;
    w.left_amp = 1.0;
    w.cos_amp = 1.0;
    w.sin_amp = w.nu / w.kappa;
    w.right_amp = w.cos_amp * std::cos(w.kappa * p.d) + w.sin_amp * std::sin(w.kappa * p.d);

    const double n2 = w.norm_squared();
    if (!std::isfinite(n2) || n2 <= 0.0) {
        std::ostringstream msg;
        msg << "normalization failed at E=" << energy << " (norm^2=" << n2 << ", nu=" << w.nu
            << ", kappa=" << w.kappa << ", delta=" << w.delta << ")";
        throw NumericError(msg.str());
    }
    const double scale = 1.0 / std::sqrt(n2);
    w.left_amp *= scale;
    w.cos_amp *= scale;
    w.sin_amp *= scale;
    w.right_amp *= scale;
    return w;
}

std::vector<BoundState> solve_impl(const WellParams& p, double tol, bool refine) {
    p.validate();
    const EnergyScan scan = scan_residual(p);
    const double g_max = *std::max_element(scan.g0.begin(), scan.g0.end());

    std::vector<BoundState> states;
    for (int n = 0; n * kPi < g_max + kPi; ++n) {
        const double shift = n * kPi;
        const std::ptrdiff_t i = find_bracket(scan, shift);
        if (i < 0) break;
        BoundState s;
        s.index = n;
        if (refine) {
            s.energy = bisect([&](double e) { return residual_branch0(p, e) - shift; },
                              scan.energy[i], scan.energy[i + 1], tol);
            s.wave = build_wave(p, s.energy);
            s.normalized = true;
        }
        states.push_back(s);
    }
    return states;
}

}  // namespace

void WellParams::validate() const {
    std::ostringstream msg;
    if (!(b >= 0.0)) msg << "bias b must be >= 0 (got " << b << ")";
    else if (!(v2 < v1 - b)) msg << "need v2 < v1 - b (v1=" << v1 << ", v2=" << v2 << ", b=" << b << ")";
    else if (!(d > 0.0)) msg << "well width d must be > 0 (got " << d << ")";
    else if (!(period > d)) msg << "period must exceed d (period=" << period << ", d=" << d << ")";
    else return;
    throw DomainError(msg.str());
}

WellParams WellParams::shifted_down() const {
    WellParams next = *this;
    next.v1 -= b;
    next.v2 -= b;
    return next;
}

double Wavefunction::value(double x) const {
    if (x < 0.0) return left_amp * std::exp(nu * x);
    if (x <= width) return cos_amp * std::cos(kappa * x) + sin_amp * std::sin(kappa * x);
    return right_amp * std::exp(-delta * (x - width));
}

double Wavefunction::derivative(double x) const {
    if (x < 0.0) return nu * left_amp * std::exp(nu * x);
    if (x <= width) return kappa * (-cos_amp * std::sin(kappa * x) + sin_amp * std::cos(kappa * x));
    return -delta * right_amp * std::exp(-delta * (x - width));
}

double Wavefunction::norm_squared() const {
    const double kd2 = 2.0 * kappa * width;
    const double well = cos_amp * cos_amp * (0.5 * width + std::sin(kd2) / (4.0 * kappa)) +
                        sin_amp * sin_amp * (0.5 * width - std::sin(kd2) / (4.0 * kappa)) +
                        cos_amp * sin_amp * (1.0 - std::cos(kd2)) / (2.0 * kappa);
    return left_amp * left_amp / (2.0 * nu) + well + right_amp * right_amp / (2.0 * delta);
}

int BoundState::node_count() const {
    // In the well psi = R cos(kappa x - phase); zeros sit at kappa x = phase + pi/2 + k pi.
    const double phase = std::atan2(wave.sin_amp, wave.cos_amp);
    const double t = (wave.kappa * wave.width - phase - 0.5 * kPi) / kPi;
    return t <= 0.0 ? 0 : static_cast<int>(std::ceil(t));
}

double residual_branch0(const WellParams& p, double energy) {
    const double nu = std::sqrt(p.v1 - energy);
    const double kappa = std::sqrt(energy - p.v2);
    const double delta = std::sqrt(p.window_top() - energy);
    return kappa * p.d - std::atan(nu / kappa) - std::atan(delta / kappa);
}

Residual transcendental_residual(const WellParams& params, double energy) {
    if (!(energy > params.v2 && energy < params.window_top())) {
        std::ostringstream msg;
        msg << "energy " << energy << " outside the bound window (" << params.v2 << ", "
            << params.window_top() << ")";
        throw DomainError(msg.str());
    }
    const double g0 = residual_branch0(params, energy);
    const int branch = std::max(0, static_cast<int>(std::lround(g0 / kPi)));
    return {g0 - branch * kPi, branch};
}

std::vector<BoundState> solve_bound_states(const WellParams& params, double tol) {
    if (!(tol > 0.0)) throw DomainError("energy tolerance must be positive");
    return solve_impl(params, tol, true);
}

int count_levels(const WellParams& params) {
    return static_cast<int>(solve_impl(params, kDefaultEnergyTol, false).size());
}

UniformGrid default_well_grid(const BoundState& state, std::size_t count) {
    return UniformGrid::spanning(-8.0 / state.wave.nu, state.wave.width + 8.0 / state.wave.delta, count);
}

WaveSamples sample_wavefunction(const BoundState& state, const UniformGrid& grid, double offset) {
    const Wavefunction& w = state.wave;
    const double left_edge = offset;
    const double right_edge = offset + w.width;
    const double slack = 1e-9 * (grid.stop() - grid.start);
    if (grid.count < 3 || grid.start > left_edge - 5.0 / w.nu + slack ||
        grid.stop() < right_edge + 5.0 / w.delta - slack) {
        throw ConfigError("grid must extend at least five decay lengths into both barriers");
    }

    WaveSamples out;
    out.x = grid.points();
    out.psi.resize(grid.count);
    std::size_t left = 0, inside = 0, right = 0;
    for (std::size_t i = 0; i < grid.count; ++i) {
        const double x = out.x[i];
        out.psi[i] = w.value(x - offset);
        if (x < left_edge) ++left;
        else if (x <= right_edge) ++inside;
        else ++right;
    }
    if (left < kMinPointsPerRegion || inside < kMinPointsPerRegion || right < kMinPointsPerRegion) {
        std::ostringstream msg;
        msg << "grid too coarse: " << left << "/" << inside << "/" << right
            << " points in left barrier/well/right barrier (need " << kMinPointsPerRegion << " each)";
        throw ConfigError(msg.str());
    }
    return out;
}

namespace {

AlignmentSample alignment_point(double v1, double v2, double d, double bias) {
    const WellParams p{v1, v2, bias, d, 2.0 * d};
    const auto levels = solve_bound_states(p, kDefaultEnergyTol);
    AlignmentSample s;
    s.bias = bias;
    s.levels = static_cast<int>(levels.size());
    s.mismatch = levels.size() >= 2 ? levels[1].energy - levels[0].energy - bias
                                    : std::numeric_limits<double>::quiet_NaN();
    return s;
}

UniformGrid bias_grid(double v1, double v2, std::size_t points) {
    return UniformGrid::spanning(1e-6, v1 - v2 - 1e-6, points);
}

}  // namespace

std::vector<AlignmentSample> serial::scan_alignment(double v1, double v2, double d,
                                                    std::size_t points) {
    const UniformGrid grid = bias_grid(v1, v2, points);
    std::vector<AlignmentSample> out(points);
    for (std::size_t i = 0; i < points; ++i) out[i] = alignment_point(v1, v2, d, grid.at(i));
    return out;
}

std::vector<AlignmentSample> scan_alignment(double v1, double v2, double d, std::size_t points) {
    const UniformGrid grid = bias_grid(v1, v2, points);
    std::vector<AlignmentSample> out(points);
    const auto count = static_cast<std::ptrdiff_t>(points);
#pragma omp parallel for schedule(dynamic, 16)
    for (std::ptrdiff_t i = 0; i < count; ++i) {
        out[i] = alignment_point(v1, v2, d, grid.at(static_cast<std::size_t>(i)));
    }
    return out;
}

AlignmentDesign design_alignment(double v1, double v2, double d, double tol, double period) {
    if (!(v2 < v1)) throw DomainError("design needs v2 < v1");
    if (!(d > 0.0)) throw DomainError("design needs d > 0");
    if (!(tol > 0.0)) throw DomainError("design tolerance must be positive");
    if (period != 0.0 && !(period > d)) throw DomainError("period must exceed d");
    const double energy_tol = std::min(kDefaultEnergyTol, 0.1 * tol);

    auto mismatch = [&](double bias) {
        const auto levels = solve_bound_states(WellParams{v1, v2, bias, d, 2.0 * d}, energy_tol);
        return levels.size() >= 2 ? levels[1].energy - levels[0].energy - bias
                                  : std::numeric_limits<double>::quiet_NaN();
    };

    const auto scan = scan_alignment(v1, v2, d);
    bool any_bracket = false;
    std::ostringstream rejected;
    for (std::size_t i = 0; i + 1 < scan.size(); ++i) {
        const AlignmentSample& a = scan[i];
        const AlignmentSample& c = scan[i + 1];
        if (a.levels < 2 || c.levels < 2) continue;
        if (!((a.mismatch <= 0.0 && c.mismatch > 0.0) || (a.mismatch >= 0.0 && c.mismatch < 0.0))) {
            continue;
        }
        any_bracket = true;

        double lo = a.bias, hi = c.bias;
        double h_lo = mismatch(lo);
        for (int iter = 0; iter < 200; ++iter) {
            const double mid = 0.5 * (lo + hi);
            if (mid <= lo || mid >= hi) break;
            const double h_mid = mismatch(mid);
            if (std::isnan(h_mid)) break;
            if ((h_mid <= 0.0) == (h_lo <= 0.0)) {
                lo = mid;
                h_lo = h_mid;
            } else {
                hi = mid;
            }
        }
        // Keep whichever end of the final bracket sits closer to the root.
        const double h_hi = mismatch(hi);
        const double bias = std::abs(h_lo) <= std::abs(h_hi) ? lo : hi;

        WellParams params{v1, v2, bias, d, period > 0.0 ? period : 2.0 * d};
        auto levels = solve_bound_states(params, energy_tol);
        if (levels.size() != 2) {
            rejected << " b~" << bias << " binds " << levels.size() << " levels;";
            continue;
        }
        const double residual = levels[1].energy - levels[0].energy - bias;
        if (!(std::abs(residual) < tol)) {
            std::ostringstream msg;
            msg << "alignment residual " << residual << " at b=" << bias << " exceeds tolerance " << tol;
            throw NumericError(msg.str());
        }

        // The next well is the same well lowered by b*: E'_n = E_n - b*.
        const auto next = solve_bound_states(params.shifted_down(), energy_tol);
        for (std::size_t n = 0; n < 2; ++n) {
            if (next.size() != 2 || std::abs(next[n].energy - (levels[n].energy - bias)) > 1e-9) {
                throw NumericError("shifted well does not reproduce E_n - b");
            }
        }
        return AlignmentDesign{params, levels[0], levels[1], residual};
    }

    std::ostringstream msg;
    if (!any_bracket) {
        msg << "no sign change of E1 - E0 - b over b in (0, " << v1 - v2
            << ") with two or more bound levels (v1=" << v1 << ", v2=" << v2 << ", d=" << d << ")";
    } else {
        msg << "two-level condition unachievable: every alignment root binds a different level count;"
            << rejected.str();
    }
    throw InfeasibleDesign(msg.str());
}

}  // namespace cqw
