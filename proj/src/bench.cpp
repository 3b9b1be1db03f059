#include "hokalman/bench.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>

#include "hokalman/csv.hpp"
#include "hokalman/error.hpp"
#include "hokalman/kernels.hpp"
#include "hokalman/linalg.hpp"
#include "hokalman/random.hpp"
#include "hokalman/realize.hpp"
#include "hokalman/sysid.hpp"

namespace hokalman {

HankelSplit ExperimentConfig::split() const {
    if (t1 || t2) {
        if (!t1 || !t2) throw DimensionError("experiment " + name + ": give both t1 and t2 or neither");
        return {*t1, *t2};
    }
    return HankelSplit::for_horizon(T);
}

namespace {

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t");
    return s.substr(first, last - first + 1);
}

std::vector<std::string> split_list(const std::string& value) {
    std::vector<std::string> out;
    std::stringstream in(value);
    std::string item;
    while (std::getline(in, item, ',')) out.push_back(trim(item));
    return out;
}

class ConfigParser {
public:
    explicit ConfigParser(csv::LineReader& reader) : reader_(reader) {}

    std::size_t count(const std::string& v) const {
        std::size_t out = 0;
        const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
        if (ec != std::errc() || ptr != v.data() + v.size()) reader_.fail("expected a count, found '" + v + "'");
        return out;
    }

    std::uint64_t u64(const std::string& v) const {
        std::uint64_t out = 0;
        const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
        if (ec != std::errc() || ptr != v.data() + v.size()) reader_.fail("expected an integer, found '" + v + "'");
        return out;
    }

    double real(const std::string& v) const {
        double out = 0.0;
        const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
        if (ec != std::errc() || ptr != v.data() + v.size() || !std::isfinite(out)) {
            reader_.fail("expected a finite number, found '" + v + "'");
        }
        return out;
    }

    bool boolean(const std::string& v) const {
        if (v == "true" || v == "1" || v == "yes") return true;
        if (v == "false" || v == "0" || v == "no") return false;
        reader_.fail("expected true or false, found '" + v + "'");
    }

    std::vector<std::size_t> counts(const std::string& v) const {
        std::vector<std::size_t> out;
        for (const auto& item : split_list(v)) out.push_back(count(item));
        if (out.empty()) reader_.fail("empty list");
        return out;
    }

    // Returns false for keys that are not experiment keys.
    bool experiment_key(ExperimentConfig& e, const std::string& key, const std::string& v) const {
        if (key == "name") e.name = v;
        else if (key == "n") e.n = count(v);
        else if (key == "m") e.m = count(v);
        else if (key == "p") e.p = count(v);
        else if (key == "T") e.T = count(v);
        else if (key == "t1") e.t1 = count(v);
        else if (key == "t2") e.t2 = count(v);
        else if (key == "sigma_u") e.sigma_u = real(v);
        else if (key == "sigma_w") e.sigma_w = real(v);
        else if (key == "sigma_v") e.sigma_v = real(v);
        else if (key == "N") e.rollouts = count(v);
        else if (key == "markov_source") {
            if (v == "ols") e.source = MarkovSource::ols;
            else if (v == "perturb") e.source = MarkovSource::perturb;
            else reader_.fail("markov_source must be ols or perturb");
        } else if (key == "perturb") e.perturb = real(v);
        else if (key == "modes") {
            e.run_det = e.run_rsvd = false;
            for (const auto& mode : split_list(v)) {
                if (mode == "det") e.run_det = true;
                else if (mode == "rsvd") e.run_rsvd = true;
                else reader_.fail("unknown mode '" + mode + "' (expected det or rsvd)");
            }
        } else if (key == "l") e.l_values = counts(v);
        else if (key == "q") e.q_values = counts(v);
        else if (key == "test_matrix") {
            try {
                e.test_matrix = parse_test_matrix_kind(v);
            } catch (const std::exception&) {
                reader_.fail("test_matrix must be gaussian or srft");
            }
        } else if (key == "stabilized") e.stabilized = boolean(v);
        else if (key == "trials") e.trials = count(v);
        else if (key == "seed") e.seed = u64(v);
        else if (key == "gnorm") e.gnorm = real(v);
        else if (key == "sigma_min_L") e.sigma_min_L = real(v);
        else if (key == "hplus_norm") e.hplus_norm = real(v);
        else return false;
        return true;
    }

    bool bench_key(BenchConfig& c, const std::string& key, const std::string& v) const {
        if (key == "det_cap") c.det_cap = real(v);
        else if (key == "grid_points") c.grid_points = count(v);
        else if (key == "measure_lerr") {
            if (v == "auto") c.measure_lerr = LerrPolicy::automatic;
            else if (v == "true") c.measure_lerr = LerrPolicy::always;
            else if (v == "false") c.measure_lerr = LerrPolicy::never;
            else reader_.fail("measure_lerr must be auto, true or false");
        } else return false;
        return true;
    }

    void check(const ExperimentConfig& e, std::size_t line) const {
        auto fail = [&](const std::string& what) {
            throw ParseError(reader_.source(), line, "experiment " + e.name + ": " + what);
        };
        if (e.n == 0 || e.m == 0 || e.p == 0 || e.T == 0) fail("n, m, p and T are required and must be positive");
        HankelSplit split;
        try {
            split = e.split();
        } catch (const std::exception& ex) {
            fail(ex.what());
        }
        if (split.t1 + split.t2 + 1 != e.T) fail("t1 + t2 + 1 must equal T");
        if (e.n > std::min(split.t1, split.t2)) fail("n exceeds min(T1, T2)");
        if (e.trials == 0) fail("trials must be positive");
        for (std::size_t l : e.l_values)
            if (l < 2) fail("oversampling l must be at least 2");
        if (e.sigma_u < 0 || e.sigma_w < 0 || e.sigma_v < 0 || e.perturb < 0) fail("noise levels must be nonnegative");
        if (e.source == MarkovSource::ols && !e.gnorm) {
            if (e.sigma_u == 0) fail("OLS needs sigma_u > 0");
            if (e.rollout_count() < e.m) fail("OLS needs N >= m");
        }
    }

private:
    csv::LineReader& reader_;
};

} // namespace

BenchConfig parse_bench_config(std::istream& in, const std::string& source) {
    csv::LineReader reader(in, source);
    ConfigParser parser(reader);
    BenchConfig config;
    ExperimentConfig defaults;
    std::vector<std::size_t> section_lines;
    std::string line;
    while (reader.next(line)) {
        const std::string text = trim(line);
        if (text.empty() || text.front() == '#') continue;
        if (text.front() == '[') {
            if (text != "[experiment]") reader.fail("unknown section " + text);
            config.experiments.push_back(defaults);
            config.experiments.back().name = std::to_string(config.experiments.size());
            section_lines.push_back(reader.line());
            continue;
        }
        const auto eq = text.find('=');
        if (eq == std::string::npos || eq == 0) reader.fail("expected key=value");
        const std::string key = trim(text.substr(0, eq));
        const std::string value = trim(text.substr(eq + 1));
        if (config.experiments.empty()) {
            if (!parser.bench_key(config, key, value) && !parser.experiment_key(defaults, key, value)) {
                reader.fail("unknown key '" + key + "'");
            }
        } else if (!parser.experiment_key(config.experiments.back(), key, value)) {
            reader.fail("unknown experiment key '" + key + "'");
        }
    }
    if (config.experiments.empty()) throw ParseError(source, reader.line(), "no [experiment] section");
    for (std::size_t i = 0; i < config.experiments.size(); ++i) parser.check(config.experiments[i], section_lines[i]);
    return config;
}

BenchConfig read_bench_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    return parse_bench_config(in, path);
}

MarkovParams perturb_markov(const MarkovParams& g, double scale, std::uint64_t seed) {
    DenseMatrix flat = g.flat();
    const CounterRng rng(seed, 5);
    std::vector<double> noise(flat.size());
    rng.fill_normal(noise);
    auto entries = flat.entries();
    for (std::size_t i = 0; i < entries.size(); ++i) entries[i] += scale * noise[i];
    return MarkovParams::from_flat(flat, g.inputs());
}

MarkovParams trial_markov(const ExperimentConfig& e, const StateSpace& truth, const MarkovParams& g,
                          std::uint64_t trial_seed) {
    if (e.source == MarkovSource::perturb) return perturb_markov(g, e.perturb, trial_seed);
    const RolloutDataset data =
        simulate_rollouts(truth, e.rollout_count(), e.T, {e.sigma_u, e.sigma_w, e.sigma_v}, trial_seed);
    return estimate_markov(data);
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Setup {
    StateSpace truth;
    MarkovParams g;
    HankelSplit split;
    HankelShape shape;
    DenseMatrix L;  // rank-n part of the noise-free H⁻; empty when not measured
};

bool wants_lerr(const BenchConfig& c, const HankelShape& shape) {
    switch (c.measure_lerr) {
    case LerrPolicy::always: return true;
    case LerrPolicy::never: return false;
    default: return static_cast<double>(shape.rows) * static_cast<double>(shape.cols) <= 4e6;
    }
}

Setup prepare(const BenchConfig& c, const ExperimentConfig& e) {
    Setup s;
    s.truth = random_system(e.n, e.m, e.p, e.seed);
    s.g = markov_from_ss(s.truth, e.T);
    s.split = e.split();
    s.shape = hankel_minus_shape(e.p, e.m, s.split);
    if (wants_lerr(c, s.shape)) s.L = truncate(svd(build_hankel_minus(s.g, s.split)), e.n);
    return s;
}

std::optional<double> relative_markov(const Setup& s, const StateSpace& est, std::size_t horizon) {
    return markov_relative_error(s.g, markov_from_ss(est, horizon));
}

std::optional<double> hinf_or_none(const StateSpace& truth, const StateSpace& est, std::size_t grid) {
    try {
        return hinf_error(truth, est, grid);
    } catch (const NumericalError&) {
        return std::nullopt;  // realized model not Schur stable
    }
}

std::optional<BoundReport> bounds_for(const ExperimentConfig& e, const HankelSplit& split, std::size_t l,
                                      std::size_t q, double gnorm) {
    BoundInputs in{e.n, l, q, e.p, e.m, split.t1, split.t2, gnorm, {}, {}, {}};
    try {
        return stochastic_bounds(in);
    } catch (const DimensionError&) {
        return std::nullopt;
    }
}

BenchRow base_row(const ExperimentConfig& e, const Setup& s, const char* mode) {
    BenchRow r;
    r.example = e.name;
    r.n = e.n;
    r.m = e.m;
    r.p = e.p;
    r.T = e.T;
    r.rows = s.shape.rows;
    r.cols = s.shape.cols;
    r.mode = mode;
    return r;
}

void finish(BenchRow& r, const Setup& s, const RealizationResult& res, const BenchConfig& c, std::size_t horizon) {
    r.time_s = res.factor_seconds;
    r.err_hinf = hinf_or_none(s.truth, res.ss, c.grid_points);
    r.err_markov = relative_markov(s, res.ss, horizon);
    if (!s.L.empty()) r.lerr = spectral_norm(s.L - res.approximant());
    if (r.lerr && r.bound) r.within_bound = *r.lerr <= *r.bound;
}

std::vector<BenchRow> run_trial(const BenchConfig& c, const ExperimentConfig& e, const Setup& s, std::size_t trial) {
    const std::uint64_t trial_seed = e.seed + trial;
    const MarkovParams g_hat = trial_markov(e, s.truth, s.g, trial_seed);
    const double gnorm = markov_error(s.g, g_hat);
    std::vector<BenchRow> rows;

    if (e.run_det) {
        BenchRow r = base_row(e, s, "det");
        r.seed = std::to_string(trial_seed);
        r.gnorm = gnorm;
        r.bound = 2.0 * std::sqrt(static_cast<double>(std::min(s.split.t1, s.split.t2))) * gnorm;
        const double rows_d = static_cast<double>(s.shape.rows), cols_d = static_cast<double>(s.shape.cols);
        if (rows_d * cols_d * std::min(rows_d, cols_d) > c.det_cap) {
            r.time_s = kInf;
        } else {
            HoKalmanOptions opt;
            opt.order = e.n;
            opt.split = s.split;
            finish(r, s, ho_kalman(g_hat, opt), c, e.T);
        }
        rows.push_back(std::move(r));
    }
    if (e.run_rsvd) {
        for (std::size_t l : e.l_values) {
            for (std::size_t q : e.q_values) {
                BenchRow r = base_row(e, s, "rsvd");
                r.l = l;
                r.q = q;
                r.seed = std::to_string(trial_seed);
                r.test_matrix = to_string(e.test_matrix);
                r.gnorm = gnorm;
                if (const auto report = bounds_for(e, s.split, l, q, gnorm)) {
                    if (e.test_matrix == TestMatrixKind::gaussian) r.bound = report->avg_bound_power;
                    else if (report->srft_applicable) r.bound = report->srft_bound;
                }
                HoKalmanOptions opt;
                opt.order = e.n;
                opt.split = s.split;
                opt.mode = RealizationMode::stochastic;
                RsvdConfig cfg;
                cfg.oversampling = l;
                cfg.power = q;
                cfg.test_matrix = e.test_matrix;
                cfg.seed = trial_seed;
                cfg.stabilized = e.stabilized;
                opt.rsvd = cfg;
                finish(r, s, ho_kalman(g_hat, opt), c, e.T);
                rows.push_back(std::move(r));
            }
        }
    }
    return rows;
}

std::optional<double> mean_of(const std::vector<const BenchRow*>& group, std::optional<double> BenchRow::*field) {
    std::vector<double> values;
    for (const BenchRow* r : group)
        if (r->*field) values.push_back(*(r->*field));
    if (values.empty()) return std::nullopt;
    return summarize(values).mean;
}

BenchRow mean_row(const std::vector<const BenchRow*>& group) {
    BenchRow out = *group.front();
    out.seed = "mean";
    std::vector<double> times, gnorms;
    for (const BenchRow* r : group) {
        times.push_back(r->time_s);
        gnorms.push_back(r->gnorm);
    }
    const bool skipped = std::any_of(times.begin(), times.end(), [](double t) { return std::isinf(t); });
    out.time_s = skipped ? kInf : summarize(times).mean;
    out.gnorm = summarize(gnorms).mean;
    out.err_hinf = mean_of(group, &BenchRow::err_hinf);
    out.err_markov = mean_of(group, &BenchRow::err_markov);
    out.lerr = mean_of(group, &BenchRow::lerr);
    out.bound = mean_of(group, &BenchRow::bound);
    out.within_bound.reset();
    if (out.lerr && out.bound) out.within_bound = *out.lerr <= *out.bound;
    return out;
}

} // namespace

std::vector<BenchRow> run_bench(const BenchConfig& config, const BenchOptions& options) {
    std::vector<BenchRow> out;
    const int saved_threads = kernel_threads();
    if (!options.parallel) set_kernel_threads(1);
    try {
        for (const ExperimentConfig& e : config.experiments) {
            const Setup s = prepare(config, e);
            std::vector<std::vector<BenchRow>> per_trial(e.trials);
            std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic) if (options.parallel)
            for (std::ptrdiff_t t = 0; t < static_cast<std::ptrdiff_t>(e.trials); ++t) {
                try {
                    per_trial[static_cast<std::size_t>(t)] = run_trial(config, e, s, static_cast<std::size_t>(t));
                } catch (...) {
#pragma omp critical
                    if (!failure) failure = std::current_exception();
                }
            }
            if (failure) std::rethrow_exception(failure);
            std::vector<BenchRow> means;
            if (e.trials > 1) {
                const std::size_t per = per_trial.front().size();
                for (std::size_t k = 0; k < per; ++k) {
                    std::vector<const BenchRow*> group;
                    for (const auto& rows : per_trial) group.push_back(&rows[k]);
                    means.push_back(mean_row(group));
                }
            }
            for (auto& rows : per_trial)
                for (auto& r : rows) out.push_back(std::move(r));
            for (auto& r : means) out.push_back(std::move(r));
        }
    } catch (...) {
        set_kernel_threads(saved_threads);
        throw;
    }
    set_kernel_threads(saved_threads);
    return out;
}

std::string bench_csv_header() {
    return "example,n,m,p,T,dimHminus_rows,dimHminus_cols,mode,l,q,seed,time_s,err_hinf,err_markov,"
           "test_matrix,gnorm,lerr,bound,within_bound";
}

namespace {

std::string opt_text(const std::optional<double>& v) { return v ? format_double(*v) : "n/a"; }
std::string opt_text(const std::optional<std::size_t>& v) { return v ? std::to_string(*v) : "n/a"; }

} // namespace

void write_bench_csv(std::ostream& out, const std::vector<BenchRow>& rows) {
    out << bench_csv_header() << '\n';
    for (const BenchRow& r : rows) {
        out << r.example << ',' << r.n << ',' << r.m << ',' << r.p << ',' << r.T << ',' << r.rows << ',' << r.cols
            << ',' << r.mode << ',' << opt_text(r.l) << ',' << opt_text(r.q) << ',' << r.seed << ','
            << (std::isinf(r.time_s) ? std::string("inf") : format_double(r.time_s)) << ',' << opt_text(r.err_hinf)
            << ',' << opt_text(r.err_markov) << ',' << (r.test_matrix.empty() ? "n/a" : r.test_matrix) << ','
            << format_double(r.gnorm) << ',' << opt_text(r.lerr) << ',' << opt_text(r.bound) << ','
            << (r.within_bound ? (*r.within_bound ? "yes" : "no") : "n/a") << '\n';
    }
}

std::vector<BoundReport> run_bounds(const BenchConfig& config) {
    std::vector<BoundReport> reports;
    for (const ExperimentConfig& e : config.experiments) {
        const HankelSplit split = e.split();
        BoundInputs in{e.n, e.l_values.front(), e.q_values.front(), e.p, e.m, split.t1, split.t2, 0.0, {}, {}, {}};
        if (e.gnorm) {
            in.gnorm = *e.gnorm;
            in.sigma_min_L = e.sigma_min_L;
            in.hplus_norm = e.hplus_norm;
        } else {
            const StateSpace truth = random_system(e.n, e.m, e.p, e.seed);
            const MarkovParams g = markov_from_ss(truth, e.T);
            const MarkovParams g_hat = trial_markov(e, truth, g, e.seed);
            in.gnorm = markov_error(g, g_hat);
            const SvdFactors f = svd(build_hankel_minus(g, split));
            in.sigma_min_L = e.sigma_min_L ? e.sigma_min_L : std::optional<double>(f.S.at(e.n - 1));
            const DenseMatrix hplus = build_hankel_plus(g, split);
            in.hplus_norm = e.hplus_norm ? e.hplus_norm : std::optional<double>(spectral_norm(hplus));
            in.hplus_err = spectral_norm(hplus - build_hankel_plus(g_hat, split));
        }
        reports.push_back(stochastic_bounds(in));
    }
    return reports;
}

void write_bounds(std::ostream& out, const BenchConfig& config, const std::vector<BoundReport>& reports) {
    for (std::size_t i = 0; i < reports.size(); ++i) {
        if (i > 0) out << '\n';
        out << "[experiment " << config.experiments[i].name << "]\n" << reports[i].to_text();
    }
}

} // namespace hokalman
