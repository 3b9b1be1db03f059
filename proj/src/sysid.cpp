#include "hokalman/sysid.hpp"

#include <cmath>
#include <fstream>
#include <ostream>

#include "hokalman/csv.hpp"
#include "hokalman/error.hpp"
#include "hokalman/kernels.hpp"
#include "hokalman/linalg.hpp"
#include "hokalman/random.hpp"

namespace hokalman {

namespace {

constexpr std::uint64_t kInputStream = 0;
constexpr std::uint64_t kProcessStream = 1;
constexpr std::uint64_t kMeasurementStream = 2;

void check_noise(const NoiseLevels& noise) {
    if (!(noise.sigma_u >= 0.0) || !(noise.sigma_w >= 0.0) || !(noise.sigma_v >= 0.0)) {
        throw DimensionError("simulate: noise levels must be nonnegative");
    }
}

// Runs x_{t+1} = A x_t + B u_t + w_t, y_t = C x_t + D u_t + v_t from x_0 = 0,
// writing y_t into rows [row0, row0 + T) of `out`.
void run_rollout(const StateSpace& ss, const double* u, std::size_t horizon, double sigma_w, double sigma_v,
                 const CounterRng& rng, DenseMatrix& out, std::size_t row0) {
    const std::size_t n = ss.order(), m = ss.inputs(), p = ss.outputs();
    const CounterRng process = rng.substream(kProcessStream);
    const CounterRng measurement = rng.substream(kMeasurementStream);
    std::vector<double> x(n, 0.0), next(n);
    for (std::size_t t = 0; t < horizon; ++t) {
        const double* ut = u + t * m;
        double* yt = out.data() + (row0 + t) * p;
        for (std::size_t r = 0; r < p; ++r) {
            double s = 0.0;
            for (std::size_t c = 0; c < n; ++c) s += ss.C(r, c) * x[c];
            for (std::size_t c = 0; c < m; ++c) s += ss.D(r, c) * ut[c];
            yt[r] = s + (sigma_v > 0.0 ? sigma_v * measurement.normal(t * p + r) : 0.0);
        }
        for (std::size_t r = 0; r < n; ++r) {
            double s = 0.0;
            for (std::size_t c = 0; c < n; ++c) s += ss.A(r, c) * x[c];
            for (std::size_t c = 0; c < m; ++c) s += ss.B(r, c) * ut[c];
            next[r] = s + (sigma_w > 0.0 ? sigma_w * process.normal(t * n + r) : 0.0);
        }
        x.swap(next);
    }
}

} // namespace

RolloutDataset simulate_rollouts(const StateSpace& ss, std::size_t rollouts, std::size_t horizon,
                                 const NoiseLevels& noise, std::uint64_t seed) {
    ss.validate();
    check_noise(noise);
    if (rollouts == 0 || horizon == 0) throw DimensionError("simulate: N and T must be positive");
    const std::size_t m = ss.inputs(), p = ss.outputs();
    RolloutDataset data;
    data.rollouts = rollouts;
    data.horizon = horizon;
    data.inputs = DenseMatrix(rollouts * horizon, m);
    data.outputs = DenseMatrix(rollouts * horizon, p);
    data.sigma_u = noise.sigma_u;
    data.sigma_w = noise.sigma_w;
    data.sigma_v = noise.sigma_v;
    data.seed = seed;

    const CounterRng base(seed, 3);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t ii = 0; ii < static_cast<std::ptrdiff_t>(rollouts); ++ii) {
        const auto i = static_cast<std::size_t>(ii);
        const CounterRng rng = base.substream(i);
        double* u = data.inputs.data() + i * horizon * m;
        if (noise.sigma_u > 0.0) {
            rng.substream(kInputStream).fill_normal({u, horizon * m});
            for (std::size_t k = 0; k < horizon * m; ++k) u[k] *= noise.sigma_u;
        }
        run_rollout(ss, u, horizon, noise.sigma_w, noise.sigma_v, rng, data.outputs, i * horizon);
    }
    return data;
}

DenseMatrix simulate_with_inputs(const StateSpace& ss, const DenseMatrix& inputs, double sigma_w, double sigma_v,
                                 std::uint64_t seed) {
    ss.validate();
    check_noise({0.0, sigma_w, sigma_v});
    if (inputs.cols() != ss.inputs() || inputs.rows() == 0) throw DimensionError("simulate: inputs must be T x m");
    DenseMatrix out(inputs.rows(), ss.outputs());
    run_rollout(ss, inputs.data(), inputs.rows(), sigma_w, sigma_v, CounterRng(seed, 3).substream(0), out, 0);
    return out;
}

DenseMatrix toeplitz_inputs(const DenseMatrix& u) {
    if (u.empty()) throw DimensionError("toeplitz_inputs: empty input sequence");
    const std::size_t horizon = u.rows(), m = u.cols();
    DenseMatrix z(m * horizon, horizon);
    for (std::size_t i = 0; i < horizon; ++i)
        for (std::size_t j = i; j < horizon; ++j)
            for (std::size_t a = 0; a < m; ++a) z(i * m + a, j) = u(j - i, a);
    return z;
}

MarkovParams estimate_markov(const RolloutDataset& data) {
    const std::size_t rollouts = data.rollouts, horizon = data.horizon;
    const std::size_t m = data.input_dim(), p = data.output_dim();
    if (rollouts == 0 || horizon == 0 || m == 0 || p == 0) throw DimensionError("estimate_markov: empty dataset");
    if (data.inputs.rows() != rollouts * horizon || data.outputs.rows() != rollouts * horizon) {
        throw DimensionError("estimate_markov: dataset shape mismatch");
    }
    const std::size_t width = m * horizon;
    const std::size_t samples = rollouts * horizon;
    if (samples < width) throw NumericalError("insufficient excitation: N*T < m*T");

    // Row (i, t) of Uᵀ is column t of Toep(u^(i)): block k holds u_{t-k}.
    DenseMatrix regressor(samples, width);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t ii = 0; ii < static_cast<std::ptrdiff_t>(rollouts); ++ii) {
        const auto i = static_cast<std::size_t>(ii);
        for (std::size_t t = 0; t < horizon; ++t) {
            double* row = regressor.data() + (i * horizon + t) * width;
            for (std::size_t k = 0; k <= t; ++k)
                for (std::size_t a = 0; a < m; ++a) row[k * m + a] = data.inputs(i * horizon + t - k, a);
        }
    }
    const LeastSquares ls = least_squares(regressor, data.outputs);  // m·T x p
    if (ls.rank < width) throw NumericalError("insufficient excitation: regressor is rank deficient");
    return MarkovParams::from_flat(ls.x.transposed(), m);
}

double dominant_eigenvalue_magnitude(const DenseMatrix& a) {
    if (a.empty() || a.rows() != a.cols()) throw DimensionError("dominant eigenvalue: matrix must be square");
    constexpr std::size_t kMaxIterations = 10000;
    std::vector<double> x(a.rows(), 1.0 / std::sqrt(static_cast<double>(a.rows())));
    double lambda = 0.0;
    for (std::size_t it = 1; it <= kMaxIterations; ++it) {
        std::vector<double> y = multiply(a, x);
        const double ny = norm2(y);
        if (ny == 0.0) return 0.0;
        for (double& v : y) v /= ny;
        x.swap(y);
        if (std::abs(ny - lambda) <= 1e-14 * ny) return ny;
        lambda = ny;
    }
    throw ConvergenceError("dominant eigenvalue: power iteration did not converge", kMaxIterations);
}

StateSpace random_system(std::size_t n, std::size_t m, std::size_t p, std::uint64_t seed) {
    if (n == 0 || m == 0 || p == 0) throw DimensionError("random_system: dimensions must be positive");
    RngCursor draw(CounterRng(seed, 4));
    auto fill = [&](std::size_t rows, std::size_t cols, std::int64_t lo, std::int64_t hi) {
        DenseMatrix out(rows, cols);
        for (double& v : out.entries()) v = static_cast<double>(draw.integer(lo, hi));
        return out;
    };
    StateSpace ss;
    ss.A = fill(n, n, 1, 5);
    ss.B = fill(n, m, -2, 2);
    ss.C = fill(p, n, -2, 2);
    ss.D = fill(p, m, -2, 2);
    ss.A *= 0.9 / dominant_eigenvalue_magnitude(ss.A);
    return ss;
}

void write_dataset(std::ostream& out, const RolloutDataset& data) {
    const std::size_t m = data.input_dim(), p = data.output_dim();
    out << "# N=" << data.rollouts << " T=" << data.horizon << " m=" << m << " p=" << p << '\n';
    std::string line;
    for (std::size_t i = 0; i < data.rollouts; ++i) {
        for (std::size_t t = 0; t < data.horizon; ++t) {
            const std::size_t r = i * data.horizon + t;
            line = std::to_string(i) + ',' + std::to_string(t);
            for (std::size_t a = 0; a < m; ++a) line += ',' + format_double(data.inputs(r, a));
            for (std::size_t a = 0; a < p; ++a) line += ',' + format_double(data.outputs(r, a));
            line += '\n';
            out << line;
        }
    }
}

void write_dataset(const std::string& path, const RolloutDataset& data) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    write_dataset(out, data);
}

RolloutDataset read_dataset(std::istream& in, const std::string& source) {
    csv::LineReader reader(in, source);
    const auto fields = csv::parse_header(reader.require("dataset header"), reader);
    RolloutDataset data;
    data.rollouts = csv::header_count(fields, "N", reader);
    data.horizon = csv::header_count(fields, "T", reader);
    const std::size_t m = csv::header_count(fields, "m", reader);
    const std::size_t p = csv::header_count(fields, "p", reader);
    const std::size_t total = data.rollouts * data.horizon;
    data.inputs = DenseMatrix(total, m);
    data.outputs = DenseMatrix(total, p);
    for (std::size_t r = 0; r < total; ++r) {
        const auto values = parse_csv_values(reader.require("dataset row"), source, reader.line());
        if (values.size() != 2 + m + p) {
            reader.fail("expected " + std::to_string(2 + m + p) + " values, found " + std::to_string(values.size()));
        }
        if (values[0] != static_cast<double>(r / data.horizon) || values[1] != static_cast<double>(r % data.horizon)) {
            reader.fail("rows must be ordered by rollout then t; expected rollout " + std::to_string(r / data.horizon) +
                        ", t " + std::to_string(r % data.horizon));
        }
        for (std::size_t a = 0; a < m; ++a) data.inputs(r, a) = values[2 + a];
        for (std::size_t a = 0; a < p; ++a) data.outputs(r, a) = values[2 + m + a];
    }
    return data;
}

RolloutDataset read_dataset(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    return read_dataset(in, path);
}

} // namespace hokalman
