// hokalman: simulate, estimate, realize, bench, bounds.
//
// Exit codes: 0 success, 1 usage or malformed input, 2 numerical failure.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "hokalman/analysis.hpp"
#include "hokalman/bench.hpp"
#include "hokalman/error.hpp"
#include "hokalman/hankel.hpp"
#include "hokalman/kernels.hpp"
#include "hokalman/realize.hpp"
#include "hokalman/rsvd.hpp"
#include "hokalman/state_space.hpp"
#include "hokalman/sysid.hpp"

// Present when OpenBLAS is the BLAS; lets single-threaded timing cover LAPACK too.
extern "C" void openblas_set_num_threads(int) __attribute__((weak));

namespace {

using namespace hokalman;

void use_threads(bool parallel) {
    if (parallel) return;
    set_kernel_threads(1);
    if (openblas_set_num_threads) openblas_set_num_threads(1);
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    return out;
}

struct SimulateArgs {
    std::size_t n = 0, m = 0, p = 0, T = 0, N = 0;
    double sigma_u = 1.0, sigma_w = 0.0, sigma_v = 0.0;
    std::uint64_t seed = 0;
    std::string system, out, truth_out, markov_out;
};

int run_simulate(const SimulateArgs& a) {
    StateSpace ss;
    if (!a.system.empty()) {
        ss = read_state_space(a.system);
    } else {
        if (a.n == 0 || a.m == 0 || a.p == 0) throw DimensionError("simulate: give --system or all of --n --m --p");
        ss = random_system(a.n, a.m, a.p, a.seed);
    }
    const RolloutDataset data = simulate_rollouts(ss, a.N, a.T, {a.sigma_u, a.sigma_w, a.sigma_v}, a.seed);
    write_dataset(a.out, data);
    if (!a.truth_out.empty()) write_state_space(a.truth_out, ss);
    if (!a.markov_out.empty()) write_markov(a.markov_out, markov_from_ss(ss, a.T));
    return 0;
}

struct RealizeArgs {
    std::string markov, out, mode = "det", test_matrix = "gaussian";
    std::size_t order = 0, oversample = 10, power = 0;
    std::optional<std::size_t> t1, t2;
    std::uint64_t seed = 0;
    bool stabilized = false;
};

int run_realize(const RealizeArgs& a) {
    const MarkovParams g = read_markov(a.markov);
    HankelSplit split;
    if (a.t1 || a.t2) {
        if (!a.t1 || !a.t2) throw DimensionError("realize: give both --t1 and --t2 or neither");
        split = {*a.t1, *a.t2};
    } else {
        split = HankelSplit::for_horizon(g.horizon());
    }
    HoKalmanOptions opt;
    opt.order = a.order;
    opt.split = split;
    if (a.mode == "rsvd") {
        opt.mode = RealizationMode::stochastic;
        RsvdConfig cfg;
        cfg.oversampling = a.oversample;
        cfg.power = a.power;
        cfg.test_matrix = parse_test_matrix_kind(a.test_matrix);
        cfg.seed = a.seed;
        cfg.stabilized = a.stabilized;
        opt.rsvd = cfg;
    }
    const RealizationResult r = ho_kalman(g, opt);
    write_state_space(a.out, r.ss);
    std::cout << "mode=" << a.mode << " order=" << a.order << " T1=" << split.t1 << " T2=" << split.t2 << '\n'
              << "factor_seconds=" << format_double(r.factor_seconds) << '\n'
              << "total_seconds=" << format_double(r.total_seconds) << '\n'
              << "sigma=";
    for (std::size_t i = 0; i < r.spectrum.size(); ++i) std::cout << (i ? "," : "") << format_double(r.spectrum[i]);
    std::cout << '\n';
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Deterministic and randomized Ho-Kalman system realization"};
    app.require_subcommand(1);
    app.fallthrough();
    bool parallel = false;
    app.add_flag("--parallel", parallel, "Enable multithreaded kernels (bench: run trials concurrently)");

    SimulateArgs sim;
    auto* simulate = app.add_subcommand("simulate", "Simulate rollouts of a random (or given) system");
    simulate->add_option("--n", sim.n, "State dimension");
    simulate->add_option("--m", sim.m, "Input dimension");
    simulate->add_option("--p", sim.p, "Output dimension");
    simulate->add_option("--T", sim.T, "Rollout length")->required();
    simulate->add_option("--N", sim.N, "Number of rollouts")->required();
    simulate->add_option("--sigma-u", sim.sigma_u, "Input standard deviation")->capture_default_str();
    simulate->add_option("--sigma-w", sim.sigma_w, "Process noise standard deviation")->capture_default_str();
    simulate->add_option("--sigma-v", sim.sigma_v, "Measurement noise standard deviation")->capture_default_str();
    simulate->add_option("--seed", sim.seed, "Random seed")->capture_default_str();
    simulate->add_option("--system", sim.system, "State-space bundle to simulate instead of a random system");
    simulate->add_option("--truth-out", sim.truth_out, "Write the simulated system here");
    simulate->add_option("--markov-out", sim.markov_out, "Write its true Markov parameters here");
    simulate->add_option("--out", sim.out, "Dataset CSV")->required();

    std::string data_path, markov_out;
    auto* estimate = app.add_subcommand("estimate", "Least-squares Markov parameters from a dataset");
    estimate->add_option("--data", data_path, "Dataset CSV")->required();
    estimate->add_option("--out", markov_out, "Markov CSV")->required();

    RealizeArgs rea;
    auto* realize = app.add_subcommand("realize", "Ho-Kalman realization from Markov parameters");
    realize->add_option("--markov", rea.markov, "Markov CSV")->required();
    realize->add_option("--order", rea.order, "System order n")->required();
    realize->add_option("--t1", rea.t1, "Block rows T1");
    realize->add_option("--t2", rea.t2, "Block columns T2");
    realize->add_option("--mode", rea.mode, "det or rsvd")
        ->check(CLI::IsMember({"det", "rsvd"}))
        ->capture_default_str();
    realize->add_option("--oversample", rea.oversample, "Oversampling l")->capture_default_str();
    realize->add_option("--power", rea.power, "Power iterations q")->capture_default_str();
    realize->add_option("--test-matrix", rea.test_matrix, "gaussian or srft")
        ->check(CLI::IsMember({"gaussian", "srft"}))
        ->capture_default_str();
    realize->add_flag("--stabilized", rea.stabilized, "Re-orthonormalize between power iterations");
    realize->add_option("--seed", rea.seed, "Random seed")->capture_default_str();
    realize->add_option("--out", rea.out, "State-space bundle")->required();

    std::string bench_config, bench_out;
    auto* bench = app.add_subcommand("bench", "Deterministic vs randomized benchmark, CSV rows");
    bench->add_option("--config", bench_config, "Experiment config")->required();
    bench->add_option("--out", bench_out, "Results CSV")->required();

    std::string bounds_config, bounds_out;
    auto* bounds = app.add_subcommand("bounds", "Evaluate every perturbation bound for each experiment");
    bounds->add_option("--config", bounds_config, "Experiment config")->required();
    bounds->add_option("--out", bounds_out, "key=value report")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        use_threads(parallel);
        if (*bench) {
            const BenchConfig config = read_bench_config(bench_config);
            auto out = open_out(bench_out);
            write_bench_csv(out, run_bench(config, {parallel}));
            return 0;
        }
        if (*simulate) return run_simulate(sim);
        if (*estimate) {
            write_markov(markov_out, estimate_markov(read_dataset(data_path)));
            return 0;
        }
        if (*realize) return run_realize(rea);
        if (*bounds) {
            const BenchConfig config = read_bench_config(bounds_config);
            auto out = open_out(bounds_out);
            write_bounds(out, config, run_bounds(config));
            return 0;
        }
    } catch (const NumericalError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 1;
}
