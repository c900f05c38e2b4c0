#include <doctest.h>

#include <omp.h>

#include <random>

#include "cqw/errors.hpp"
#include "cqw/path_oracle.hpp"
#include "test_support.hpp"

using namespace cqw;

TEST_SUITE("path_oracle") {

TEST_CASE("enumeration reproduces the hand table") {
    const auto f = enumerate_paths(3, {1.0, 0.0}, BranchingModel::symmetric());
    CHECK(f.table.size() == 3);
    CHECK(f.probability({0, 2, 1}) == 0.25);
    CHECK(f.probability({1, 1, 1}) == 0.5);
    CHECK(f.probability({1, 0, 2}) == 0.25);
}

TEST_CASE("N = 1 enumeration is the terminal transition") {
    const auto init = InitialExcitation::make(0.6, 0.8);
    const auto br = BranchingModel::symmetric();
    const auto e = enumerate_paths(1, init, br);
    const auto t = terminal_transition(initial_state(1, init));
    CHECK(e.table == t.table);
}

TEST_CASE("replayed path") {
    // H, flip (omega_+), stay (omega_0), terminal from L (omega_-)
    const auto br = BranchingModel::manual(0.3, 0.7, 0.2, 0.8);
    const auto p = replay_path(3, Sublevel::high, 0b01, {1.0, 0.0}, br);
    CHECK(p.counts == PhotonCounts{1, 1, 1});
    CHECK(p.probability == doctest::Approx(0.7 * 0.8));
    REQUIRE(p.choices.size() == 2);
    CHECK(p.choices[0]);
    CHECK_FALSE(p.choices[1]);
}

TEST_CASE("randomized equivalence with the cascade DP") {
    std::mt19937_64 rng(2024);
    for (int trial = 0; trial < 30; ++trial) {
        const auto inst = testing::random_instance(rng, 1, 12);
        const auto dp = run_cascade(inst.n_total, inst.init, inst.branching);
        const auto en = enumerate_paths(inst.n_total, inst.init, inst.branching);
        CHECK(max_abs_difference(dp, en) < 1e-12);
    }
}

TEST_CASE("OpenMP enumeration matches the serial reference bit for bit") {
    std::mt19937_64 rng(5);
    const auto inst = testing::random_instance(rng, 14, 14);
    const auto ser = serial::enumerate_paths(inst.n_total, inst.init, inst.branching);
    for (int threads : {1, 2, 3, 7}) {
        omp_set_num_threads(threads);
        const auto par = enumerate_paths(inst.n_total, inst.init, inst.branching);
        CHECK(par.table.size() == ser.table.size());
        CHECK(max_abs_difference(par, ser) < 1e-15);
    }
}

TEST_CASE("sampling is reproducible and thread-count independent") {
    const auto init = InitialExcitation::balanced();
    const auto br = BranchingModel::manual(0.4, 0.6, 0.3, 0.7);
    const auto ref = serial::sample_walks(8, init, br, 20000, 99);
    for (int threads : {1, 4}) {
        omp_set_num_threads(threads);
        const auto par = sample_walks(8, init, br, 20000, 99);
        CHECK(par.hits == ref.hits);
        CHECK(par.samples == 20000);
    }
    const auto other = sample_walks(8, init, br, 20000, 100);
    CHECK(other.hits != ref.hits);
}

TEST_CASE("sampled frequencies approach the exact table") {
    const auto init = InitialExcitation::make(0.6, 0.8);
    const auto br = BranchingModel::manual(0.25, 0.75, 0.55, 0.45);
    const auto exact = run_cascade(6, init, br);
    const auto emp = sample_walks(6, init, br, 200000, 3);
    CHECK(total_variation(emp, exact) < 0.01);
    std::uint64_t total = 0;
    for (const auto& [c, h] : emp.hits) {
        total += h;
        CHECK(exact.probability(c) > 0.0);
    }
    CHECK(total == 200000);
}

TEST_CASE("distance helpers") {
    JointDistribution a, b;
    a.n_total = b.n_total = 1;
    a.table[{0, 0, 1}] = 1.0;
    b.table[{1, 0, 0}] = 1.0;
    CHECK(max_abs_difference(a, b) == 1.0);
    EmpiricalDistribution e;
    e.n_total = 1;
    e.samples = 4;
    e.hits[{0, 0, 1}] = 3;
    e.hits[{1, 0, 0}] = 1;
    CHECK(e.frequency({0, 0, 1}) == 0.75);
    CHECK(total_variation(e, a) == doctest::Approx(0.25));
}

TEST_CASE("size and domain limits") {
    const auto br = BranchingModel::symmetric();
    CHECK_THROWS_AS(enumerate_paths(kMaxEnumerationN + 1, {1.0, 0.0}, br), SizeError);
    CHECK_THROWS_AS(coherence_audit(kMaxAuditN + 1, {1.0, 0.0}, br, SignMode::all_positive), SizeError);
    CHECK_THROWS_AS(enumerate_paths(0, {1.0, 0.0}, br), DomainError);
    CHECK_THROWS_AS(sample_walks(3, {1.0, 0.0}, br, 0, 1), DomainError);
}

TEST_CASE("coherence audit at N = 3") {
    const auto br = BranchingModel::symmetric();
    const auto pos = coherence_audit(3, {1.0, 0.0}, br, SignMode::all_positive);
    const auto cmt = coherence_audit(3, {1.0, 0.0}, br, SignMode::cmt_signs);
    CHECK(std::abs(pos.final_norm - 1.5) <= 1e-12);
    CHECK(std::abs(cmt.final_norm - 0.5) <= 1e-12);
    REQUIRE(pos.colliding_states.size() == 1);
    CHECK(pos.colliding_states[0] == PhotonCounts{1, 1, 1});
    CHECK(cmt.colliding_states == pos.colliding_states);
}

TEST_CASE("without collisions the literal map keeps the norm") {
    const auto br = BranchingModel::manual(0.3, 0.7, 0.6, 0.4);
    for (int n : {1, 2}) {
        for (auto mode : {SignMode::all_positive, SignMode::cmt_signs}) {
            const auto r = coherence_audit(n, {1.0, 0.0}, br, mode);
            CHECK(r.colliding_states.empty());
            CHECK(r.final_norm == doctest::Approx(1.0).epsilon(1e-14));
        }
    }
    // no cross transitions: a single path per start branch
    const auto diag = coherence_audit(9, InitialExcitation::balanced(), BranchingModel::manual(1, 0, 0, 1),
                                      SignMode::cmt_signs);
    CHECK(diag.colliding_states.empty());
    CHECK(diag.final_norm == doctest::Approx(1.0).epsilon(1e-14));
}

}
