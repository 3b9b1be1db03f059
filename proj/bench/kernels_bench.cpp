// kernels_bench [--size N] [--reps R]
//
// Times the parallel matrix kernels against the serial reference loops,
// then a randomized SVD against the full SVD on a Hankel matrix.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <functional>
#include <string>

#include "hokalman/hankel.hpp"
#include "hokalman/kernels.hpp"
#include "hokalman/linalg.hpp"
#include "hokalman/random.hpp"
#include "hokalman/rsvd.hpp"
#include "hokalman/sysid.hpp"

using namespace hokalman;

namespace {

double best_of(int reps, const std::function<void()>& f) {
    double best = 1e300;
    for (int r = 0; r < reps; ++r) {
        const auto t0 = std::chrono::steady_clock::now();
        f();
        const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - t0;
        best = std::min(best, dt.count());
    }
    return best;
}

DenseMatrix gaussian(std::size_t rows, std::size_t cols, std::uint64_t seed) {
    DenseMatrix a(rows, cols);
    CounterRng(seed, 0).fill_normal(a.entries());
    return a;
}

void row(const char* name, double seconds, double baseline) {
    std::printf("%-28s %10.4f s  %6.2fx\n", name, seconds, baseline / seconds);
}

} // namespace

int main(int argc, char** argv) {
    std::size_t size = 400;
    int reps = 3;
    for (int i = 1; i + 1 < argc; i += 2) {
        if (!std::strcmp(argv[i], "--size")) size = std::strtoul(argv[i + 1], nullptr, 10);
        else if (!std::strcmp(argv[i], "--reps")) reps = std::atoi(argv[i + 1]);
        else {
            std::fprintf(stderr, "usage: kernels_bench [--size N] [--reps R]\n");
            return 1;
        }
    }
    const int threads = kernel_threads();
    std::printf("threads available: %d\n\n", threads);

    const DenseMatrix a = gaussian(size, size, 1), b = gaussian(size, size, 2);
    std::printf("multiply %zux%zu\n", size, size);
    const double ref = best_of(reps, [&] { reference::multiply(a, b); });
    row("reference", ref, ref);
    set_kernel_threads(1);
    row("blocked, 1 thread", best_of(reps, [&] { multiply(a, b); }), ref);
    set_kernel_threads(threads);
    row("blocked, all threads", best_of(reps, [&] { multiply(a, b); }), ref);
    row("multiply_tn, all threads", best_of(reps, [&] { multiply_tn(a, b); }), ref);
    std::printf("max |blocked - reference| = %.3g\n\n", max_abs_diff(multiply(a, b), reference::multiply(a, b)));

    // Same geometry as the smallest desk example: n=30, m=20, p=10, T=90.
    const MarkovParams g = markov_from_ss(random_system(30, 20, 10, 1), 90);
    const DenseMatrix h = build_hankel_minus(g, HankelSplit::for_horizon(90));
    std::printf("hankel %zux%zu, rank 30\n", h.rows(), h.cols());
    const double full = best_of(reps, [&] { svd(h); });
    row("full svd", full, full);
    for (std::size_t q : {0, 1, 2}) {
        RsvdConfig cfg;
        cfg.rank = 30;
        cfg.oversampling = 10;
        cfg.power = q;
        cfg.stabilized = q > 0;
        const std::string name = "rsvd l=10 q=" + std::to_string(q);
        row(name.c_str(), best_of(reps, [&] { rsvd(h, cfg); }), full);
    }
    return 0;
}
