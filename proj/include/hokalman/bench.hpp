#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "hokalman/analysis.hpp"
#include "hokalman/hankel.hpp"
#include "hokalman/rsvd.hpp"

namespace hokalman {

/// Where an experiment's Ĝ comes from: OLS on simulated rollouts, or the
/// true G plus i.i.d. N(0, perturb²) entries.
enum class MarkovSource { ols, perturb };

/// One `[experiment]` section of a bench config.
struct ExperimentConfig {
    std::string name;
    std::size_t n = 0, m = 0, p = 0, T = 0;
    std::optional<std::size_t> t1, t2;  ///< default split when absent
    double sigma_u = 1.0, sigma_w = 1.0, sigma_v = 0.5;
    std::size_t rollouts = 0;  ///< N; 0 means 4 m
    MarkovSource source = MarkovSource::ols;
    double perturb = 1e-3;
    bool run_det = true;
    bool run_rsvd = true;
    std::vector<std::size_t> l_values{10};
    std::vector<std::size_t> q_values{0};
    TestMatrixKind test_matrix = TestMatrixKind::gaussian;
    bool stabilized = false;
    std::size_t trials = 1;
    std::uint64_t seed = 0;
    // `bounds` overrides: with gnorm set no data is generated.
    std::optional<double> gnorm, sigma_min_L, hplus_norm;

    HankelSplit split() const;
    std::size_t rollout_count() const { return rollouts == 0 ? 4 * m : rollouts; }
};

enum class LerrPolicy { automatic, always, never };

struct BenchConfig {
    std::vector<ExperimentConfig> experiments;
    /// Deterministic rows are skipped (time_s=inf) when rows·cols·min(rows, cols)
    /// of H⁻ exceeds this.
    double det_cap = 1e11;
    std::size_t grid_points = 1024;
    /// automatic measures ‖L − L̃‖ only when H⁻ has at most 4e6 entries.
    LerrPolicy measure_lerr = LerrPolicy::automatic;
};

/// Flat `key=value` lines; `[experiment]` starts a section. Keys before the
/// first section set bench options or defaults for every experiment.
BenchConfig parse_bench_config(std::istream& in, const std::string& source = "<stream>");
BenchConfig read_bench_config(const std::string& path);

/// One CSV row. Optional fields print as n/a.
struct BenchRow {
    std::string example;
    std::size_t n = 0, m = 0, p = 0, T = 0;
    std::size_t rows = 0, cols = 0;  ///< dim(Ĥ⁻)
    std::string mode;                ///< det or rsvd
    std::optional<std::size_t> l, q;
    std::string seed;                ///< trial seed, or "mean"
    double time_s = 0.0;             ///< factorization wall time; inf when skipped
    std::optional<double> err_hinf, err_markov;
    std::string test_matrix;
    double gnorm = 0.0;
    std::optional<double> lerr, bound;
    std::optional<bool> within_bound;
};

struct BenchOptions {
    bool parallel = false;  ///< run trials concurrently
};

/// Runs every experiment: for each trial one det row and one rsvd row per
/// (l, q), then one mean row per (mode, l, q).
std::vector<BenchRow> run_bench(const BenchConfig& config, const BenchOptions& options = {});

void write_bench_csv(std::ostream& out, const std::vector<BenchRow>& rows);
std::string bench_csv_header();

/// Bound report per experiment, using the first l and q of its sweeps.
/// Measured inputs (‖G − Ĝ‖, σ_min(L), ‖H⁺‖, ‖H⁺ − Ĥ⁺‖) come from trial 0
/// unless gnorm is given in the config.
std::vector<BoundReport> run_bounds(const BenchConfig& config);
void write_bounds(std::ostream& out, const BenchConfig& config, const std::vector<BoundReport>& reports);

/// Ĝ for one trial of an experiment.
MarkovParams trial_markov(const ExperimentConfig& e, const StateSpace& truth, const MarkovParams& g,
                          std::uint64_t trial_seed);

/// G + i.i.d. N(0, scale²) entries drawn from `seed`.
MarkovParams perturb_markov(const MarkovParams& g, double scale, std::uint64_t seed);

} // namespace hokalman
