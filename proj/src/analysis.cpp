#include "cqw/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "cqw/errors.hpp"

namespace cqw {

Marginals marginals(const JointDistribution& dist) {
    const auto size = static_cast<std::size_t>(dist.n_total + 1);
    Marginals out{std::vector<double>(size, 0.0), std::vector<double>(size, 0.0),
                  std::vector<double>(size, 0.0)};
    // Accumulate in (m, l) order. Each l-bin and each n-bin then sees its
    // points by increasing m, so mirrored tables give bit-identical l and n
    // marginals.
    std::vector<std::pair<PhotonCounts, double>> rows(dist.table.begin(), dist.table.end());
    std::stable_sort(rows.begin(), rows.end(),
                     [](const auto& a, const auto& b) { return a.first.m < b.first.m; });
    for (const auto& [c, f] : rows) {
        out.l[c.l] += f;
        out.m[c.m] += f;
        out.n[c.n] += f;
    }
    return out;
}

std::map<std::pair<int, int>, double> joint_pm(const JointDistribution& dist) {
    std::map<std::pair<int, int>, double> out;
    for (const auto& [c, f] : dist.table) out[{c.l, c.n}] += f;
    return out;
}

std::string to_string(ConditionalKind kind) {
    switch (kind) {
        case ConditionalKind::product: return "product";
        case ConditionalKind::entangled_pair: return "entangled-pair";
        case ConditionalKind::empty: return "empty";
    }
    return "unknown";
}

ConditionalState conditional_state(const JointDistribution& dist, int m) {
    if (m < 0 || m > dist.n_total) {
        std::ostringstream msg;
        msg << "measured m=" << m << " outside [0, " << dist.n_total << "]";
        throw DomainError(msg.str());
    }
    ConditionalState cs;
    cs.measured_m = m;
    cs.s = dist.n_total - m;
    cs.k = cs.s / 2;
    const int k = cs.k;

    double f_low_l = 0.0;   // f(k, m, k+1)
    double f_high_l = 0.0;  // f(k+1, m, k)
    for (const auto& [c, f] : dist.table) {
        if (c.m != m) continue;
        cs.weight += f;
        cs.support.emplace_back(c.l, c.n);
        const bool allowed = cs.s % 2 == 0 ? (c.l == k && c.n == k)
                                           : ((c.l == k && c.n == k + 1) || (c.l == k + 1 && c.n == k));
        if (!allowed) {
            std::ostringstream msg;
            msg << "slice m=" << m << " (s=" << cs.s << ") holds unexpected point (" << c.l << ", "
                << c.n << ")";
            throw NumericError(msg.str());
        }
        if (c.l == k && c.n == k + 1) f_low_l = f;
        if (c.l == k + 1 && c.n == k) f_high_l = f;
    }

    if (cs.support.empty()) {
        cs.kind = ConditionalKind::empty;
        return cs;
    }
    if (cs.s % 2 == 0) {
        cs.kind = ConditionalKind::product;
        return cs;
    }
    const double pair = f_low_l + f_high_l;
    cs.alpha = std::sqrt(f_low_l / pair);
    cs.beta = std::sqrt(f_high_l / pair);
    cs.kind = (f_low_l > 0.0 && f_high_l > 0.0) ? ConditionalKind::entangled_pair : ConditionalKind::product;
    return cs;
}

double entanglement_entropy(const ConditionalState& cond) {
    if (cond.kind == ConditionalKind::empty) throw DomainError("entropy of an empty slice is undefined");
    if (cond.kind == ConditionalKind::product) return 0.0;
    double h = 0.0;
    for (double c : {cond.alpha, cond.beta}) {
        const double p = c * c;
        if (p > 0.0) h -= p * std::log2(p);
    }
    return h;
}

PurityReport purity_check(const JointDistribution& dist) {
    std::vector<double> psi;
    psi.reserve(dist.table.size());
    PurityReport r;
    for (const auto& [c, f] : dist.table) {
        r.trace += f;
        psi.push_back(std::sqrt(f));
    }
    const std::size_t n = psi.size();
    for (double a : psi) r.amplitude_norm += a * a;
    r.trace_deviation = std::abs(r.trace - 1.0);

    std::vector<double> rho(n * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) rho[i * n + j] = psi[i] * psi[j];

    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            double sq = 0.0;
            for (std::size_t q = 0; q < n; ++q) sq += rho[i * n + q] * rho[q * n + j];
            r.idempotency_residual = std::max(r.idempotency_residual, std::abs(sq - rho[i * n + j]));
        }
    }

    if (n > 0) {
        std::size_t p = 0;
        for (std::size_t i = 1; i < n; ++i)
            if (rho[i * n + i] > rho[p * n + p]) p = i;
        const double pivot = rho[p * n + p];
        for (std::size_t i = 0; i < n && pivot > 0.0; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                const double outer = rho[i * n + p] * rho[p * n + j] / pivot;
                r.rank_one_residual = std::max(r.rank_one_residual, std::abs(rho[i * n + j] - outer));
            }
        }
        r.rank_one = pivot > 0.0 && r.rank_one_residual <= 1e-12;
    }
    r.pure = r.rank_one && r.trace_deviation <= 1e-12 && r.idempotency_residual <= 1e-12;
    return r;
}

std::string to_string(ParityGate gate) { return gate == ParityGate::xor_gate ? "XOR" : "NXOR"; }

ParityReport parity_xor(const JointDistribution& dist) {
    ParityReport r;
    r.n_total = dist.n_total;
    r.gate = dist.n_total % 2 == 0 ? ParityGate::xor_gate : ParityGate::nxor_gate;
    for (const auto& [c, f] : dist.table) {
        ParityRow row;
        row.counts = c;
        row.parity_l = c.l & 1;
        row.parity_n = c.n & 1;
        row.parity_m = c.m & 1;
        const int x = row.parity_l ^ row.parity_n;
        row.holds = row.parity_m == (r.gate == ParityGate::xor_gate ? x : 1 - x);
        r.all_hold = r.all_hold && row.holds;
        r.rows.push_back(row);
    }
    return r;
}

std::vector<std::pair<int, int>> LogicalProjection::support() const {
    std::vector<std::pair<int, int>> out;
    for (const auto& [q, w] : weights)
        if (w > 0.0) out.push_back(q);
    return out;
}

LogicalProjection logical_qubit_projection(const JointDistribution& dist, int m_parity) {
    if (m_parity != 0 && m_parity != 1) throw DomainError("m_parity must be 0 or 1");
    LogicalProjection out;
    out.m_parity = m_parity;
    for (const auto& [c, f] : dist.table) {
        if ((c.m & 1) != m_parity) continue;
        out.weights[{c.l & 1, c.n & 1}] += f;
    }
    return out;
}

}  // namespace cqw
