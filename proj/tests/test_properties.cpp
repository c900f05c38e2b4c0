#include <doctest.h>

#include <cmath>
#include <random>

#include "cqw/analysis.hpp"
#include "cqw/cascade.hpp"
#include "test_support.hpp"

using namespace cqw;

// Randomized sweeps over the whole cascade + analysis chain.

TEST_SUITE("properties") {

TEST_CASE("normalization, support law and parity gate over random instances") {
    std::mt19937_64 rng(77);
    for (int trial = 0; trial < 200; ++trial) {
        const auto inst = testing::random_instance(rng, 1, 30);
        const int n = inst.n_total;
        const auto f = run_cascade(n, inst.init, inst.branching);
        CHECK(std::abs(f.total() - 1.0) <= 1e-12);
        CHECK(f.probability({0, n, 0}) == 0.0);
        for (const auto& [c, p] : f.table) {
            CHECK(c.total() == n);
            CHECK(std::abs(c.l - c.n) <= 1);
            CHECK(c.l + c.n >= 1);
            CHECK(p >= 0.0);
        }
        CHECK(parity_xor(f).all_hold);
        const auto pur = purity_check(f);
        CHECK(pur.trace_deviation <= 1e-12);
        CHECK(pur.idempotency_residual <= 1e-12);
    }
}

TEST_CASE("conditional slices have the allowed shape for every m") {
    std::mt19937_64 rng(78);
    for (int trial = 0; trial < 40; ++trial) {
        const auto inst = testing::random_instance(rng, 1, 22);
        const auto f = run_cascade(inst.n_total, inst.init, inst.branching);
        for (int m = 0; m <= inst.n_total; ++m) {
            const auto cs = conditional_state(f, m);
            if (cs.s % 2 == 0) CHECK(cs.support.size() <= 1);
            else CHECK(cs.support.size() <= 2);
            if (cs.kind != ConditionalKind::empty) {
                CHECK(cs.alpha * cs.alpha + cs.beta * cs.beta == doctest::Approx(cs.s % 2 ? 1.0 : 0.0));
                const double h = entanglement_entropy(cs);
                CHECK(h >= 0.0);
                CHECK(h <= 1.0 + 1e-12);
            }
        }
    }
}

TEST_CASE("start branch decides which off-diagonal is reachable") {
    std::mt19937_64 rng(79);
    for (int trial = 0; trial < 40; ++trial) {
        auto inst = testing::random_instance(rng, 1, 25);
        const auto h = run_cascade(inst.n_total, {1.0, 0.0}, inst.branching);
        const auto l = run_cascade(inst.n_total, {0.0, 1.0}, inst.branching);
        for (const auto& [c, p] : h.table) CHECK(c.l != c.n + 1);
        for (const auto& [c, p] : l.table) CHECK(c.n != c.l + 1);
    }
}

TEST_CASE("entanglement switches with the initial superposition") {
    const auto sym = BranchingModel::symmetric();
    for (int n = 1; n <= 22; ++n) {
        const auto bal = run_cascade(n, InitialExcitation::balanced(), sym);
        const auto pure_h = run_cascade(n, {1.0, 0.0}, sym);
        for (int m = 0; m <= n; ++m) {
            const auto cb = conditional_state(bal, m);
            if ((n - m) % 2 == 1 && cb.kind != ConditionalKind::empty)
                CHECK(std::abs(entanglement_entropy(cb) - 1.0) <= 1e-9);
            const auto ch = conditional_state(pure_h, m);
            if (ch.kind != ConditionalKind::empty) CHECK(entanglement_entropy(ch) == 0.0);
        }
    }
}

TEST_CASE("balanced symmetric runs have mirror-equal marginals") {
    for (int n = 1; n <= 25; ++n) {
        const auto mg = marginals(run_cascade(n, InitialExcitation::balanced(), BranchingModel::symmetric()));
        CHECK(mg.l == mg.n);
    }
}

}
