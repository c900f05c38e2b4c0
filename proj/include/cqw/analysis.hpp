#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cqw/cascade.hpp"

// Post-processing of the final photonic state: marginals and the (l, n)
// joint distribution, the two-mode state left after measuring the omega_0
// photon number, its entanglement entropy, purity diagnostics and the
// photon-number-parity logic between the three modes.

namespace cqw {

struct Marginals {
    std::vector<double> l;  // indexed by photon number 0..N
    std::vector<double> m;
    std::vector<double> n;
};

Marginals marginals(const JointDistribution& dist);

// (l, n) -> sum over m of f(l, m, n).
std::map<std::pair<int, int>, double> joint_pm(const JointDistribution& dist);

enum class ConditionalKind { product, entangled_pair, empty };

std::string to_string(ConditionalKind kind);

// Two-mode state after measuring m photons in omega_0. For odd s the state
// is alpha |k, k+1> + beta |k+1, k> in |l, n> notation; for even s it is
// |k, k>. alpha and beta are renormalized within the slice.
struct ConditionalState {
    int measured_m = 0;
    int s = 0;
    int k = 0;
    ConditionalKind kind = ConditionalKind::empty;
    double alpha = 0.0;
    double beta = 0.0;
    double weight = 0.0;
    // Support points of the slice as (l, n).
    std::vector<std::pair<int, int>> support;
};

// DomainError unless 0 <= m <= N. NumericError if the slice holds points
// outside the shapes allowed for its parity.
ConditionalState conditional_state(const JointDistribution& dist, int m);

// Von Neumann entropy of the conditional state in bits. DomainError for an
// empty slice.
double entanglement_entropy(const ConditionalState& cond);

struct PurityReport {
    double trace = 0.0;               // sum f
    double amplitude_norm = 0.0;      // sum |sqrt f|^2 taken from the state vector
    double trace_deviation = 0.0;     // |trace - 1|
    double idempotency_residual = 0.0;  // max |(rho^2 - rho)_ij|
    double rank_one_residual = 0.0;   // max |rho - c c^T / c_p|
    bool rank_one = false;
    bool pure = false;                // all residuals within 1e-12
};

PurityReport purity_check(const JointDistribution& dist);

enum class ParityGate { xor_gate, nxor_gate };

std::string to_string(ParityGate gate);

struct ParityRow {
    PhotonCounts counts;
    int parity_l = 0;
    int parity_n = 0;
    int parity_m = 0;
    bool holds = false;
};

struct ParityReport {
    int n_total = 0;
    ParityGate gate = ParityGate::xor_gate;
    std::vector<ParityRow> rows;
    bool all_hold = true;
};

// parity(m) = parity(l) XOR parity(n) for even N, its negation for odd N.
ParityReport parity_xor(const JointDistribution& dist);

// Logical two-qubit content (parity of l, parity of n) of the slices whose
// measured m has the requested parity.
struct LogicalProjection {
    int m_parity = 0;
    std::map<std::pair<int, int>, double> weights;  // (q_l, q_n) -> summed f

    std::vector<std::pair<int, int>> support() const;
};

LogicalProjection logical_qubit_projection(const JointDistribution& dist, int m_parity);

}  // namespace cqw
