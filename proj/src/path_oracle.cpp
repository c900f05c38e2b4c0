#include "cqw/path_oracle.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <random>
#include <set>
#include <sstream>

#include "cqw/errors.hpp"

namespace cqw {

namespace {

constexpr std::uint64_t kEnumerationChunks = 64;

void check_enumeration_size(int n_total) {
    if (n_total < 1) throw DomainError("path enumeration needs N >= 1");
    if (n_total > kMaxEnumerationN) {
        std::ostringstream msg;
        msg << "path enumeration limited to N <= " << kMaxEnumerationN << " (got " << n_total << ")";
        throw SizeError(msg.str());
    }
}

double start_weight(const InitialExcitation& init, Sublevel s) {
    return s == Sublevel::high ? init.c_h * init.c_h : init.c_l * init.c_l;
}

// Path walk without materializing the choice vector.
struct Walk {
    PhotonCounts counts;
    double probability;
};

Walk walk_bits(int n_total, Sublevel start, std::uint64_t bits, double weight, const BranchingModel& br) {
    Sublevel cur = start;
    PhotonCounts c;
    double p = weight;
    for (int step = 0; step + 1 < n_total; ++step) {
        const bool flip = (bits >> step) & 1U;
        if (cur == Sublevel::high) {
            if (flip) { p *= br.p_hl; ++c.n; cur = Sublevel::low; }
            else      { p *= br.p_hh; ++c.m; }
        } else {
            if (flip) { p *= br.p_lh; ++c.l; cur = Sublevel::high; }
            else      { p *= br.p_ll; ++c.m; }
        }
    }
    if (cur == Sublevel::high) ++c.n;
    else ++c.l;
    return {c, p};
}

// Dense (l, n) accumulator; m is implied by N.
struct Grid2 {
    int side = 0;
    std::vector<double> mass;

    explicit Grid2(int n_total) : side(n_total + 1), mass(static_cast<std::size_t>(side * side), 0.0) {}
    double& at(int l, int n) { return mass[static_cast<std::size_t>(l * side + n)]; }
};

JointDistribution to_distribution(int n_total, Grid2& grid) {
    JointDistribution dist;
    dist.n_total = n_total;
    for (int l = 0; l <= n_total; ++l)
        for (int n = 0; l + n <= n_total; ++n)
            if (grid.at(l, n) > 0.0) dist.table[{l, n_total - l - n, n}] = grid.at(l, n);
    return dist;
}

double to_unit(std::uint64_t draw) { return static_cast<double>(draw >> 11) * 0x1.0p-53; }

// Hit counts of sample block `block`, as a dense (l, n) array.
std::vector<std::uint64_t> sample_block(int n_total, const InitialExcitation& init, const BranchingModel& br,
                                        std::uint64_t block, std::uint64_t count, std::uint64_t seed) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(block), static_cast<std::uint32_t>(block >> 32)};
    std::mt19937_64 rng(seq);
    const int side = n_total + 1;
    std::vector<std::uint64_t> hits(static_cast<std::size_t>(side * side), 0);
    const double w_high = init.c_h * init.c_h;
    const std::uint64_t begin = block * kSampleBlock;
    const std::uint64_t end = std::min(count, begin + kSampleBlock);
    for (std::uint64_t s = begin; s < end; ++s) {
        Sublevel cur = to_unit(rng()) < w_high ? Sublevel::high : Sublevel::low;
        int l = 0, n = 0;
        for (int step = 0; step + 1 < n_total; ++step) {
            const double u = to_unit(rng());
            if (cur == Sublevel::high) {
                if (!(u < br.p_hh)) { ++n; cur = Sublevel::low; }
            } else {
                if (!(u < br.p_ll)) { ++l; cur = Sublevel::high; }
            }
        }
        if (cur == Sublevel::high) ++n;
        else ++l;
        ++hits[static_cast<std::size_t>(l * side + n)];
    }
    return hits;
}

EmpiricalDistribution to_empirical(int n_total, std::uint64_t count, const std::vector<std::uint64_t>& hits) {
    EmpiricalDistribution out;
    out.n_total = n_total;
    out.samples = count;
    const int side = n_total + 1;
    for (int l = 0; l <= n_total; ++l)
        for (int n = 0; l + n <= n_total; ++n)
            if (const auto h = hits[static_cast<std::size_t>(l * side + n)]; h > 0)
                out.hits[{l, n_total - l - n, n}] = h;
    return out;
}

void check_sampling(int n_total, std::uint64_t count) {
    if (n_total < 1) throw DomainError("sampling needs N >= 1");
    if (count < 1) throw DomainError("sample count must be >= 1");
}

}  // namespace

PathRecord replay_path(int n_total, Sublevel start, std::uint64_t bits, const InitialExcitation& init,
                       const BranchingModel& branching) {
    check_enumeration_size(n_total);
    const Walk w = walk_bits(n_total, start, bits, start_weight(init, start), branching);
    PathRecord rec;
    rec.start = start;
    rec.choices.resize(static_cast<std::size_t>(n_total - 1));
    for (int i = 0; i + 1 < n_total; ++i) rec.choices[i] = (bits >> i) & 1U;
    rec.counts = w.counts;
    rec.probability = w.probability;
    return rec;
}

JointDistribution serial::enumerate_paths(int n_total, const InitialExcitation& init,
                                          const BranchingModel& branching) {
    check_enumeration_size(n_total);
    branching.validate();
    JointDistribution dist;
    dist.n_total = n_total;
    const std::uint64_t paths = std::uint64_t{1} << (n_total - 1);
    for (Sublevel start : {Sublevel::high, Sublevel::low}) {
        const double weight = start_weight(init, start);
        if (weight <= 0.0) continue;
        for (std::uint64_t bits = 0; bits < paths; ++bits) {
            const Walk w = walk_bits(n_total, start, bits, weight, branching);
            if (w.probability > 0.0) dist.table[w.counts] += w.probability;
        }
    }
    return dist;
}

JointDistribution enumerate_paths(int n_total, const InitialExcitation& init, const BranchingModel& branching) {
    check_enumeration_size(n_total);
    branching.validate();
    const std::uint64_t paths = std::uint64_t{1} << (n_total - 1);
    const std::uint64_t chunks = std::min(paths, kEnumerationChunks);
    const std::uint64_t per_chunk = paths / chunks;  // both powers of two
    const std::array<Sublevel, 2> starts{Sublevel::high, Sublevel::low};
    const auto tasks = static_cast<std::ptrdiff_t>(2 * chunks);

    std::vector<Grid2> partial(static_cast<std::size_t>(tasks), Grid2(n_total));
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t t = 0; t < tasks; ++t) {
        const Sublevel start = starts[static_cast<std::size_t>(t) / chunks];
        const double weight = start_weight(init, start);
        if (weight <= 0.0) continue;
        const std::uint64_t first = (static_cast<std::uint64_t>(t) % chunks) * per_chunk;
        Grid2& acc = partial[static_cast<std::size_t>(t)];
        for (std::uint64_t bits = first; bits < first + per_chunk; ++bits) {
            const Walk w = walk_bits(n_total, start, bits, weight, branching);
            if (w.probability > 0.0) acc.at(w.counts.l, w.counts.n) += w.probability;
        }
    }

    Grid2 total(n_total);
    for (Grid2& g : partial)
        for (std::size_t i = 0; i < total.mass.size(); ++i) total.mass[i] += g.mass[i];
    return to_distribution(n_total, total);
}

double EmpiricalDistribution::frequency(const PhotonCounts& c) const {
    const auto it = hits.find(c);
    if (it == hits.end() || samples == 0) return 0.0;
    return static_cast<double>(it->second) / static_cast<double>(samples);
}

EmpiricalDistribution serial::sample_walks(int n_total, const InitialExcitation& init,
                                           const BranchingModel& branching, std::uint64_t count,
                                           std::uint64_t seed) {
    check_sampling(n_total, count);
    branching.validate();
    const std::uint64_t blocks = (count + kSampleBlock - 1) / kSampleBlock;
    const int side = n_total + 1;
    std::vector<std::uint64_t> hits(static_cast<std::size_t>(side * side), 0);
    for (std::uint64_t b = 0; b < blocks; ++b) {
        const auto part = sample_block(n_total, init, branching, b, count, seed);
        for (std::size_t i = 0; i < hits.size(); ++i) hits[i] += part[i];
    }
    return to_empirical(n_total, count, hits);
}

EmpiricalDistribution sample_walks(int n_total, const InitialExcitation& init, const BranchingModel& branching,
                                   std::uint64_t count, std::uint64_t seed) {
    check_sampling(n_total, count);
    branching.validate();
    const auto blocks = static_cast<std::ptrdiff_t>((count + kSampleBlock - 1) / kSampleBlock);
    std::vector<std::vector<std::uint64_t>> partial(static_cast<std::size_t>(blocks));
#pragma omp parallel for schedule(dynamic, 4)
    for (std::ptrdiff_t b = 0; b < blocks; ++b) {
        partial[static_cast<std::size_t>(b)] =
            sample_block(n_total, init, branching, static_cast<std::uint64_t>(b), count, seed);
    }
    const int side = n_total + 1;
    std::vector<std::uint64_t> hits(static_cast<std::size_t>(side * side), 0);
    for (const auto& part : partial)
        for (std::size_t i = 0; i < hits.size(); ++i) hits[i] += part[i];
    return to_empirical(n_total, count, hits);
}

double max_abs_difference(const JointDistribution& a, const JointDistribution& b) {
    double worst = 0.0;
    for (const auto& [c, f] : a.table) worst = std::max(worst, std::abs(f - b.probability(c)));
    for (const auto& [c, f] : b.table) worst = std::max(worst, std::abs(f - a.probability(c)));
    return worst;
}

double total_variation(const EmpiricalDistribution& empirical, const JointDistribution& exact) {
    std::set<PhotonCounts> keys;
    for (const auto& [c, h] : empirical.hits) keys.insert(c);
    for (const auto& [c, f] : exact.table) keys.insert(c);
    double sum = 0.0;
    for (const PhotonCounts& c : keys) sum += std::abs(empirical.frequency(c) - exact.probability(c));
    return 0.5 * sum;
}

CoherenceReport coherence_audit(int n_total, const InitialExcitation& init, const BranchingModel& branching,
                                SignMode sign_mode) {
    if (n_total < 1) throw DomainError("coherence audit needs N >= 1");
    if (n_total > kMaxAuditN) {
        std::ostringstream msg;
        msg << "coherence audit limited to N <= " << kMaxAuditN << " (got " << n_total << ")";
        throw SizeError(msg.str());
    }
    branching.validate();

    struct Cell {
        std::complex<double> amp;
        std::uint64_t paths = 0;
    };
    const double low_sign = sign_mode == SignMode::cmt_signs ? -1.0 : 1.0;

    std::map<LevelKey, Cell> state;
    if (init.c_h > 0.0) state[{Sublevel::high, 0, 0}] = {init.c_h, 1};
    if (init.c_l > 0.0) state[{Sublevel::low, 0, 0}] = {init.c_l, 1};

    for (int step = 0; step + 1 < n_total; ++step) {
        std::map<LevelKey, Cell> next;
        auto emit = [&](LevelKey key, const Cell& from, double factor) {
            if (factor == 0.0) return;
            Cell& to = next[key];
            to.amp += from.amp * factor;
            to.paths += from.paths;
        };
        for (const auto& [key, cell] : state) {
            if (key.sublevel == Sublevel::high) {
                emit({Sublevel::high, key.l, key.n}, cell, std::sqrt(branching.p_hh));
                emit({Sublevel::low, key.l, key.n + 1}, cell, std::sqrt(branching.p_hl));
            } else {
                emit({Sublevel::high, key.l + 1, key.n}, cell, low_sign * std::sqrt(branching.p_lh));
                emit({Sublevel::low, key.l, key.n}, cell, low_sign * std::sqrt(branching.p_ll));
            }
        }
        state = std::move(next);
    }

    std::map<PhotonCounts, Cell> final_cells;
    const int emitted = n_total - 1;
    for (const auto& [key, cell] : state) {
        const int m = emitted - key.l - key.n;
        const bool high = key.sublevel == Sublevel::high;
        const PhotonCounts c = high ? PhotonCounts{key.l, m, key.n + 1} : PhotonCounts{key.l + 1, m, key.n};
        Cell& to = final_cells[c];
        to.amp += cell.amp;  // the terminal hop is certain: amplitude 1 in either sign mode
        to.paths += cell.paths;
    }

    CoherenceReport report;
    for (const auto& [c, cell] : final_cells) {
        report.final_norm += std::norm(cell.amp);
        if (cell.paths >= 2) report.colliding_states.push_back(c);
    }
    return report;
}

}  // namespace cqw
