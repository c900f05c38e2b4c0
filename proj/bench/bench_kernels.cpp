// Serial reference vs OpenMP kernel timings, with an agreement check per
// pair. Sampling and the bias scan must match the reference exactly;
// enumeration sums its 64 chunks separately, so it may differ from the
// path-by-path serial sum in the last bits.

#include <omp.h>

#include <chrono>
#include <cstdio>
#include <functional>

#include <CLI11.hpp>

#include "cqw/path_oracle.hpp"
#include "cqw/well.hpp"

namespace {

double best_of(int reps, const std::function<void()>& f) {
    double best = 1e300;
    for (int i = 0; i < reps; ++i) {
        const auto t0 = std::chrono::steady_clock::now();
        f();
        best = std::min(best, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
    }
    return best;
}

void row(const char* name, double serial_s, double parallel_s, bool same) {
    std::printf("%-22s %10.4f %10.4f %8.2fx  %s\n", name, serial_s, parallel_s, serial_s / parallel_s,
                same ? "agree" : "MISMATCH");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"serial vs OpenMP kernel benchmark"};
    int enum_n = 18, walk_n = 20, reps = 3;
    std::uint64_t walks = 2000000;
    std::size_t scan_points = 2048;
    bool quick = false;
    app.add_option("--enum-n", enum_n, "N for path enumeration");
    app.add_option("--walk-n", walk_n, "N for Monte Carlo walks");
    app.add_option("--walks", walks, "Monte Carlo sample count");
    app.add_option("--scan-points", scan_points, "bias scan points");
    app.add_option("--reps", reps, "repetitions, best time kept");
    app.add_flag("--quick", quick, "small sizes for a smoke run");
    CLI11_PARSE(app, argc, argv);
    if (quick) {
        enum_n = 12;
        walk_n = 8;
        walks = 50000;
        scan_points = 256;
        reps = 1;
    }

    const auto init = cqw::InitialExcitation::make(0.6, 0.8);
    const auto br = cqw::BranchingModel::manual(0.3, 0.7, 0.45, 0.55);

    std::printf("threads: %d\n", omp_get_max_threads());
    std::printf("%-22s %10s %10s %9s\n", "kernel", "serial s", "omp s", "speedup");

    cqw::JointDistribution es, ep;
    const double t_es = best_of(reps, [&] { es = cqw::serial::enumerate_paths(enum_n, init, br); });
    const double t_ep = best_of(reps, [&] { ep = cqw::enumerate_paths(enum_n, init, br); });
    const bool e_same = es.table.size() == ep.table.size() && cqw::max_abs_difference(es, ep) <= 1e-14;
    row("enumerate_paths", t_es, t_ep, e_same);

    cqw::EmpiricalDistribution ss, sp;
    const double t_ss = best_of(reps, [&] { ss = cqw::serial::sample_walks(walk_n, init, br, walks, 42); });
    const double t_sp = best_of(reps, [&] { sp = cqw::sample_walks(walk_n, init, br, walks, 42); });
    const bool s_same = ss.hits == sp.hits;
    row("sample_walks", t_ss, t_sp, s_same);

    std::vector<cqw::AlignmentSample> as, ap;
    const double t_as = best_of(reps, [&] { as = cqw::serial::scan_alignment(10.0, 0.0, 2.0, scan_points); });
    const double t_ap = best_of(reps, [&] { ap = cqw::scan_alignment(10.0, 0.0, 2.0, scan_points); });
    bool a_same = as.size() == ap.size();
    for (std::size_t i = 0; a_same && i < as.size(); ++i)
        a_same = as[i].levels == ap[i].levels && (as[i].mismatch == ap[i].mismatch ||
                                                  (std::isnan(as[i].mismatch) && std::isnan(ap[i].mismatch)));
    row("scan_alignment", t_as, t_ap, a_same);

    return e_same && s_same && a_same ? 0 : 1;
}
