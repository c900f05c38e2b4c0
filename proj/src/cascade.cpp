#include "cqw/cascade.hpp"

#include <cmath>
#include <sstream>

#include "cqw/errors.hpp"

namespace cqw {

InitialExcitation InitialExcitation::make(double c_h, double c_l) {
    if (!(c_h >= 0.0 && c_l >= 0.0)) throw DomainError("initial amplitudes must be nonnegative");
    const double norm = c_h * c_h + c_l * c_l;
    if (!(std::abs(norm - 1.0) <= 1e-12)) {
        std::ostringstream msg;
        msg.precision(17);
        msg << "initial amplitudes must satisfy c_h^2 + c_l^2 = 1 (got " << norm << ")";
        throw DomainError(msg.str());
    }
    return {c_h, c_l};
}

InitialExcitation InitialExcitation::balanced() {
    const double c = std::sqrt(0.5);
    return {c, c};
}

double CascadeState::total_mass() const {
    double sum = 0.0;
    for (const auto& [key, w] : weights) sum += w;
    return sum;
}

CascadeState initial_state(int n_total, const InitialExcitation& init) {
    if (n_total < 1) throw DomainError("the cascade must emit at least one photon (N >= 1)");
    CascadeState s;
    s.n_total = n_total;
    s.step = 0;
    const double wh = init.c_h * init.c_h;
    const double wl = init.c_l * init.c_l;
    if (wh > 0.0) s.weights[{Sublevel::high, 0, 0}] = wh;
    if (wl > 0.0) s.weights[{Sublevel::low, 0, 0}] = wl;
    return s;
}

CascadeState evolve_step(const CascadeState& state, const BranchingModel& br) {
    if (state.step >= state.n_total - 1) {
        std::ostringstream msg;
        msg << "evolve_step at step " << state.step << " of N=" << state.n_total
            << "; only the terminal transition remains";
        throw SequencingError(msg.str());
    }
    br.validate();
    CascadeState next;
    next.n_total = state.n_total;
    next.step = state.step + 1;
    auto deposit = [&](LevelKey key, double mass) {
        if (mass > 0.0) next.weights[key] += mass;
    };
    for (const auto& [key, w] : state.weights) {
        if (key.sublevel == Sublevel::high) {
            deposit({Sublevel::high, key.l, key.n}, w * br.p_hh);      // omega_0
            deposit({Sublevel::low, key.l, key.n + 1}, w * br.p_hl);   // omega_+
        } else {
            deposit({Sublevel::high, key.l + 1, key.n}, w * br.p_lh);  // omega_-
            deposit({Sublevel::low, key.l, key.n}, w * br.p_ll);       // omega_0
        }
    }
    return next;
}

double JointDistribution::probability(const PhotonCounts& c) const {
    const auto it = table.find(c);
    return it == table.end() ? 0.0 : it->second;
}

double JointDistribution::amplitude(const PhotonCounts& c) const { return std::sqrt(probability(c)); }

double JointDistribution::total() const {
    double sum = 0.0;
    for (const auto& [c, f] : table) sum += f;
    return sum;
}

JointDistribution terminal_transition(const CascadeState& state) {
    if (state.step != state.n_total - 1) {
        std::ostringstream msg;
        msg << "terminal transition needs step N-1=" << state.n_total - 1 << ", state is at step "
            << state.step;
        throw SequencingError(msg.str());
    }
    JointDistribution dist;
    dist.n_total = state.n_total;
    for (const auto& [key, w] : state.weights) {
        const int m = state.step - key.l - key.n;
        const PhotonCounts c = key.sublevel == Sublevel::high ? PhotonCounts{key.l, m, key.n + 1}
                                                              : PhotonCounts{key.l + 1, m, key.n};
        dist.table[c] += w;
    }
    return dist;
}

JointDistribution run_cascade(int n_total, const InitialExcitation& init, const BranchingModel& branching) {
    CascadeState state = initial_state(n_total, init);
    while (state.step < n_total - 1) state = evolve_step(state, branching);
    return terminal_transition(state);
}

std::vector<SupportPoint> support_set(int n_total) {
    if (n_total < 1) throw DomainError("support_set needs N >= 1");
    std::vector<SupportPoint> out;
    for (int l = 0; l <= n_total; ++l) {
        for (int m = 0; m + l <= n_total; ++m) {
            const int n = n_total - l - m;
            if (std::abs(l - n) > 1 || l + n < 1) continue;
            const Reach reach = n == l + 1 ? Reach::high_only : l == n + 1 ? Reach::low_only : Reach::both;
            out.push_back({{l, m, n}, reach});
        }
    }
    return out;
}

}  // namespace cqw
