#pragma once

#include <compare>
#include <map>
#include <vector>

#include "cqw/coupled_modes.hpp"

// Exact photon-number statistics of the cascade. The emitter state after j
// emissions is a probability mass over (sublevel, l, n); m = j - l - n is
// implied. Path weights are summed incoherently, which is the reading that
// conserves probability (see path_oracle.hpp for the literal amplitude map).

namespace cqw {

enum class Sublevel { high, low };

// Nonnegative real amplitudes of the upper/lower sublevel of the first well.
struct InitialExcitation {
    double c_h = 1.0;
    double c_l = 0.0;

    // DomainError unless c_h, c_l >= 0 and c_h^2 + c_l^2 = 1 to 1e-12.
    static InitialExcitation make(double c_h, double c_l);
    static InitialExcitation balanced();
};

// Photon numbers in the omega_-, omega_0, omega_+ accumulators.
struct PhotonCounts {
    int l = 0;
    int m = 0;
    int n = 0;

    int total() const { return l + m + n; }
    auto operator<=>(const PhotonCounts&) const = default;
};

struct LevelKey {
    Sublevel sublevel = Sublevel::high;
    int l = 0;
    int n = 0;

    auto operator<=>(const LevelKey&) const = default;
};

struct CascadeState {
    int n_total = 1;  // N, photons the full cascade emits
    int step = 0;     // emissions so far
    std::map<LevelKey, double> weights;

    double total_mass() const;
};

CascadeState initial_state(int n_total, const InitialExcitation& init);

// One inter-well emission. SequencingError once step reaches N - 1.
CascadeState evolve_step(const CascadeState& state, const BranchingModel& branching);

struct JointDistribution {
    int n_total = 0;
    std::map<PhotonCounts, double> table;  // f(l, m, n), lexicographic order

    double probability(const PhotonCounts& c) const;
    double amplitude(const PhotonCounts& c) const;  // sqrt(f)
    double total() const;
};

// Final hop into the unsplit ground level: H adds an omega_+ photon, L an
// omega_- photon. SequencingError unless step == N - 1.
JointDistribution terminal_transition(const CascadeState& state);

// N - 1 evolve steps followed by the terminal hop. DomainError for N < 1.
JointDistribution run_cascade(int n_total, const InitialExcitation& init,
                              const BranchingModel& branching);

// Which start branch can reach a support point.
enum class Reach { high_only, low_only, both };

struct SupportPoint {
    PhotonCounts counts;
    Reach reach = Reach::both;
};

// {l + m + n = N, |l - n| <= 1, l + n >= 1} in lexicographic order.
std::vector<SupportPoint> support_set(int n_total);

}  // namespace cqw
