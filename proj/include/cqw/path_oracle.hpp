#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "cqw/cascade.hpp"

// Independent checks of the cascade engine: brute-force path enumeration,
// seeded Monte Carlo walks, and the literal amplitude map with coherent
// merging of paths.
//
// The enumeration and sampling kernels are OpenMP-parallel. Work is split
// into a fixed number of chunks (enumeration) or fixed-size sample blocks
// (sampling) that do not depend on the thread count, and partial results
// are merged in chunk order, so output is identical for any number of
// threads. The `serial` namespace holds straightforward reference versions.

namespace cqw {

inline constexpr int kMaxEnumerationN = 20;
inline constexpr int kMaxAuditN = 16;
inline constexpr std::uint64_t kSampleBlock = 4096;

// One path through the cascade. choices[i] is true when step i flips the
// sublevel (emitting omega_+ or omega_-), false when it emits omega_0.
struct PathRecord {
    Sublevel start = Sublevel::high;
    std::vector<bool> choices;
    PhotonCounts counts;
    double probability = 0.0;  // start weight times branch probabilities
};

// Replays the N - 1 choices encoded in the low bits of `choice_bits`
// (bit i = step i) followed by the terminal hop.
PathRecord replay_path(int n_total, Sublevel start, std::uint64_t choice_bits,
                       const InitialExcitation& init, const BranchingModel& branching);

// Exhaustive enumeration of all 2^(N-1) choice sequences per start branch.
// SizeError for N > 20.
JointDistribution enumerate_paths(int n_total, const InitialExcitation& init,
                                  const BranchingModel& branching);

struct EmpiricalDistribution {
    int n_total = 0;
    std::uint64_t samples = 0;
    std::map<PhotonCounts, std::uint64_t> hits;

    double frequency(const PhotonCounts& c) const;
};

// `count` independent walks. Sample block b draws from std::mt19937_64
// seeded with std::seed_seq{seed_lo, seed_hi, b_lo, b_hi}; uniforms use the
// top 53 bits of each draw.
EmpiricalDistribution sample_walks(int n_total, const InitialExcitation& init,
                                   const BranchingModel& branching, std::uint64_t count,
                                   std::uint64_t seed);

namespace serial {
JointDistribution enumerate_paths(int n_total, const InitialExcitation& init,
                                  const BranchingModel& branching);
EmpiricalDistribution sample_walks(int n_total, const InitialExcitation& init,
                                   const BranchingModel& branching, std::uint64_t count,
                                   std::uint64_t seed);
}  // namespace serial

double max_abs_difference(const JointDistribution& a, const JointDistribution& b);
double total_variation(const EmpiricalDistribution& empirical, const JointDistribution& exact);

enum class SignMode { all_positive, cmt_signs };

struct CoherenceReport {
    double final_norm = 0.0;
    std::vector<PhotonCounts> colliding_states;  // final counts reached by >= 2 paths
};

// Evolves amplitudes sqrt(p) literally, letting paths that reach the same
// (sublevel, l, m, n) add coherently. With cmt_signs every transition out
// of the lower sublevel between pairs carries a factor -1; the terminal
// hop always has amplitude 1. SizeError for N > 16.
CoherenceReport coherence_audit(int n_total, const InitialExcitation& init,
                                const BranchingModel& branching, SignMode sign_mode);

}  // namespace cqw
