#include <doctest.h>

#include <cmath>
#include <random>

#include "cqw/cascade.hpp"
#include "cqw/errors.hpp"
#include "test_support.hpp"

using namespace cqw;

namespace {

double weight(const CascadeState& s, Sublevel sub, int l, int n) {
    const auto it = s.weights.find({sub, l, n});
    return it == s.weights.end() ? 0.0 : it->second;
}

}  // namespace

TEST_SUITE("cascade") {

TEST_CASE("first step reproduces the two-photon term weights") {
    const double ch = 0.6, cl = 0.8;
    const auto br = BranchingModel::manual(0.3, 0.7, 0.45, 0.55);
    const auto s = evolve_step(initial_state(4, InitialExcitation::make(ch, cl)), br);
    // (sublevel, l, m, n) with m = 1 - l - n
    CHECK(weight(s, Sublevel::high, 0, 0) == doctest::Approx(ch * ch * br.p_hh));
    CHECK(weight(s, Sublevel::low, 0, 1) == doctest::Approx(ch * ch * br.p_hl));
    CHECK(weight(s, Sublevel::high, 1, 0) == doctest::Approx(cl * cl * br.p_lh));
    CHECK(weight(s, Sublevel::low, 0, 0) == doctest::Approx(cl * cl * br.p_ll));
    CHECK(s.weights.size() == 4);
    CHECK(s.step == 1);
}

TEST_CASE("no cross transitions keeps the mass on the diagonal") {
    const auto br = BranchingModel::manual(1.0, 0.0, 0.0, 1.0);
    auto s = initial_state(6, {1.0, 0.0});
    for (int i = 0; i < 5; ++i) s = evolve_step(s, br);
    CHECK(s.weights.size() == 1);
    CHECK(weight(s, Sublevel::high, 0, 0) == 1.0);
    const auto f = terminal_transition(s);
    CHECK(f.probability({0, 5, 1}) == 1.0);
}

TEST_CASE("single photon: terminal only") {
    const auto init = InitialExcitation::make(0.6, 0.8);
    const auto f = run_cascade(1, init, BranchingModel::symmetric());
    CHECK(f.probability({0, 0, 1}) == doctest::Approx(0.36));
    CHECK(f.probability({1, 0, 0}) == doctest::Approx(0.64));
    CHECK(f.table.size() == 2);
    const auto u = run_cascade(1, InitialExcitation::balanced(), BranchingModel::symmetric());
    CHECK(u.probability({0, 0, 1}) == doctest::Approx(0.5));
    CHECK(u.probability({1, 0, 0}) == doctest::Approx(0.5));
}

TEST_CASE("hand-enumerated tables") {
    const auto two = run_cascade(2, {1.0, 0.0}, BranchingModel::symmetric());
    CHECK(two.table.size() == 2);
    CHECK(two.probability({0, 1, 1}) == 0.5);
    CHECK(two.probability({1, 0, 1}) == 0.5);

    const auto three = run_cascade(3, {1.0, 0.0}, BranchingModel::symmetric());
    CHECK(three.table.size() == 3);
    CHECK(three.probability({0, 2, 1}) == 0.25);
    CHECK(three.probability({1, 1, 1}) == 0.5);
    CHECK(three.probability({1, 0, 2}) == 0.25);
    CHECK(three.amplitude({1, 1, 1}) == doctest::Approx(std::sqrt(0.5)));
}

TEST_CASE("N = 22 balanced run") {
    const auto f = run_cascade(22, InitialExcitation::balanced(), BranchingModel::symmetric());
    CHECK(std::abs(f.total() - 1.0) <= 1e-12);
    for (const auto& [c, p] : f.table) {
        CHECK(c.total() == 22);
        CHECK(std::abs(c.l - c.n) <= 1);
    }
}

TEST_CASE("sequencing") {
    const auto br = BranchingModel::symmetric();
    auto s = initial_state(3, {1.0, 0.0});
    CHECK_THROWS_AS(terminal_transition(s), SequencingError);
    s = evolve_step(s, br);
    s = evolve_step(s, br);
    CHECK_THROWS_AS(evolve_step(s, br), SequencingError);
    CHECK_NOTHROW(terminal_transition(s));
    CHECK_THROWS_AS(run_cascade(0, {1.0, 0.0}, br), DomainError);
    CHECK_THROWS_AS(evolve_step(initial_state(1, {1.0, 0.0}), br), SequencingError);
}

TEST_CASE("initial amplitudes") {
    CHECK_THROWS_AS(InitialExcitation::make(0.7, 0.7), DomainError);
    CHECK_THROWS_AS(InitialExcitation::make(-1.0, 0.0), DomainError);
    CHECK_NOTHROW(InitialExcitation::make(0.0, 1.0));
    const auto b = InitialExcitation::balanced();
    CHECK(b.c_h * b.c_h + b.c_l * b.c_l == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("invalid branching rows propagate") {
    BranchingModel bad;
    bad.p_hh = 0.9;
    CHECK_THROWS_AS(run_cascade(3, {1.0, 0.0}, bad), DomainError);
}

TEST_CASE("support set") {
    const auto one = support_set(1);
    REQUIRE(one.size() == 2);
    CHECK(one[0].counts == PhotonCounts{0, 0, 1});
    CHECK(one[0].reach == Reach::high_only);
    CHECK(one[1].counts == PhotonCounts{1, 0, 0});
    CHECK(one[1].reach == Reach::low_only);

    const auto two = support_set(2);
    REQUIRE(two.size() == 3);
    CHECK(two[0].counts == PhotonCounts{0, 1, 1});
    CHECK(two[1].counts == PhotonCounts{1, 0, 1});
    CHECK(two[1].reach == Reach::both);
    CHECK(two[2].counts == PhotonCounts{1, 1, 0});
    CHECK_THROWS_AS(support_set(0), DomainError);
}

TEST_CASE("reach labels match single-branch runs") {
    const auto br = BranchingModel::manual(0.4, 0.6, 0.35, 0.65);
    for (int n = 1; n <= 9; ++n) {
        const auto from_h = run_cascade(n, {1.0, 0.0}, br);
        const auto from_l = run_cascade(n, {0.0, 1.0}, br);
        for (const auto& sp : support_set(n)) {
            const bool h = from_h.probability(sp.counts) > 0.0;
            const bool l = from_l.probability(sp.counts) > 0.0;
            CHECK(h == (sp.reach != Reach::low_only));
            CHECK(l == (sp.reach != Reach::high_only));
        }
        CHECK(from_h.table.size() + from_l.table.size() >= support_set(n).size());
    }
}

TEST_CASE("relabeling H and L mirrors the table") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        const auto inst = testing::random_instance(rng, 1, 18);
        const auto& b = inst.branching;
        const auto f = run_cascade(inst.n_total, inst.init, b);
        const auto g = run_cascade(inst.n_total, {inst.init.c_l, inst.init.c_h},
                                   BranchingModel::manual(b.p_ll, b.p_lh, b.p_hl, b.p_hh));
        REQUIRE(f.table.size() == g.table.size());
        for (const auto& [c, p] : f.table) CHECK(g.probability({c.n, c.m, c.l}) == doctest::Approx(p).epsilon(1e-12));
    }
}

}
