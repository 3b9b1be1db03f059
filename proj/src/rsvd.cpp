#include "hokalman/rsvd.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numbers>
#include <numeric>

#include "hokalman/error.hpp"
#include "hokalman/kernels.hpp"
#include "hokalman/random.hpp"

namespace hokalman {

std::string to_string(TestMatrixKind kind) { return kind == TestMatrixKind::gaussian ? "gaussian" : "srft"; }

TestMatrixKind parse_test_matrix_kind(const std::string& name) {
    if (name == "gaussian") return TestMatrixKind::gaussian;
    if (name == "srft") return TestMatrixKind::srft;
    throw DimensionError("unknown test matrix '" + name + "' (expected gaussian or srft)");
}

std::size_t RsvdConfig::samples_for(std::size_t rows, std::size_t cols) const noexcept {
    return cap_samples ? std::min(samples(), std::min(rows, cols)) : samples();
}

void RsvdConfig::validate(std::size_t rows, std::size_t cols) const {
    if (rank < 1) throw DimensionError("rsvd: target rank must be at least 1");
    if (oversampling < 2) throw DimensionError("rsvd: oversampling must be at least 2");
    if (cap_samples && rank > std::min(rows, cols)) {
        throw DimensionError("rsvd: target rank " + std::to_string(rank) + " exceeds min(rows, cols) = " +
                             std::to_string(std::min(rows, cols)));
    }
    if (samples_for(rows, cols) > std::min(rows, cols)) {
        throw DimensionError("rsvd: k + l = " + std::to_string(samples()) + " exceeds min(rows, cols) = " +
                             std::to_string(std::min(rows, cols)));
    }
}

namespace {

DenseMatrix gaussian_test_matrix(std::size_t n, std::size_t w, std::uint64_t seed) {
    DenseMatrix omega(n, w);
    const CounterRng base(seed, 0);
    // One substream per column: any column partition across threads draws the same values.
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t jj = 0; jj < static_cast<std::ptrdiff_t>(w); ++jj) {
        const auto j = static_cast<std::size_t>(jj);
        const CounterRng col = base.substream(j);
        for (std::size_t i = 0; i < n; ++i) omega(i, j) = col.normal(i);
    }
    return omega;
}

DenseMatrix srft_test_matrix(std::size_t n, std::size_t w, std::uint64_t seed) {
    if (w > n) throw DimensionError("srft: sample count exceeds dimension");
    const CounterRng base(seed, 1);
    RngCursor cursor(base.substream(0));
    std::vector<double> phase(n);
    for (double& t : phase) t = 2.0 * std::numbers::pi * cursor.uniform();

    // R: w coordinates drawn without replacement (partial Fisher-Yates).
    std::vector<std::size_t> coords(n);
    std::iota(coords.begin(), coords.end(), std::size_t{0});
    for (std::size_t j = 0; j < w; ++j) {
        const auto pick = static_cast<std::size_t>(cursor.integer(static_cast<std::int64_t>(j),
                                                                  static_cast<std::int64_t>(n - 1)));
        std::swap(coords[j], coords[pick]);
    }

    // sqrt(n/w) * d_p * n^{-1/2} e^{-2πi p r_j / n} = w^{-1/2} e^{i(θ_p − 2π (p r_j mod n)/n)}
    const double scale = 1.0 / std::sqrt(static_cast<double>(w));
    DenseMatrix omega(n, 2 * w);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t ii = 0; ii < static_cast<std::ptrdiff_t>(n); ++ii) {
        const auto p = static_cast<std::size_t>(ii);
        for (std::size_t j = 0; j < w; ++j) {
            const auto wrapped = static_cast<double>((static_cast<std::uint64_t>(p) * coords[j]) % n);
            const double angle = phase[p] - 2.0 * std::numbers::pi * wrapped / static_cast<double>(n);
            omega(p, j) = scale * std::cos(angle);
            omega(p, w + j) = scale * std::sin(angle);
        }
    }
    return omega;
}

} // namespace

DenseMatrix test_matrix(std::size_t n, std::size_t w, TestMatrixKind kind, std::uint64_t seed) {
    if (n == 0 || w == 0) throw DimensionError("test_matrix: dimensions must be positive");
    return kind == TestMatrixKind::gaussian ? gaussian_test_matrix(n, w, seed) : srft_test_matrix(n, w, seed);
}

DenseMatrix range_finder(const DenseMatrix& a, const RsvdConfig& cfg) {
    if (a.empty()) throw DimensionError("range_finder: empty matrix");
    cfg.validate(a.rows(), a.cols());
    const bool reorthonormalize = cfg.stabilized && cfg.power >= 1;
    DenseMatrix y = multiply(a, test_matrix(a.cols(), cfg.samples_for(a.rows(), a.cols()), cfg.test_matrix, cfg.seed));
    for (std::size_t i = 0; i < cfg.power; ++i) {
        if (reorthonormalize) y = orth(y);
        DenseMatrix z = multiply_tn(a, y);
        if (reorthonormalize) z = orth(z);
        y = multiply(a, z);
    }
    return orth(y);
}

SvdFactors rsvd_from_basis(const DenseMatrix& a, const DenseMatrix& basis, std::size_t rank) {
    if (basis.rows() != a.rows()) throw DimensionError("rsvd: basis row count mismatch");
    SvdFactors small = svd(multiply_tn(basis, a));
    if (small.S.size() < rank) {
        throw NumericalError("rsvd: sampled range has rank " + std::to_string(small.S.size()) +
                             ", below the target rank " + std::to_string(rank) +
                             "; the plain power scheme loses directions below eps^(1/(2q+1)) sigma_1, "
                             "the stabilized scheme keeps them");
    }
    SvdFactors f{multiply(basis, small.U), std::move(small.S), std::move(small.V)};
    f = leading(f, rank);
    normalize_signs(f);
    return f;
}

SvdFactors rsvd(const DenseMatrix& a, const RsvdConfig& cfg) {
    return rsvd_from_basis(a, range_finder(a, cfg), cfg.rank);
}

DenseMatrix adaptive_range_finder(const DenseMatrix& a, double eps, std::size_t probes, std::uint64_t seed) {
    if (a.empty()) throw DimensionError("adaptive_range_finder: empty matrix");
    if (!(eps > 0.0)) throw DimensionError("adaptive_range_finder: eps must be positive");
    if (probes < 5) throw DimensionError("adaptive_range_finder: need at least 5 probes");
    const std::size_t m = a.rows(), n = a.cols();
    const std::size_t max_cols = std::min(m, n);
    const double threshold = eps / (10.0 * std::sqrt(2.0 / std::numbers::pi));
    const CounterRng base(seed, 2);

    std::vector<std::vector<double>> basis;
    std::uint64_t drawn = 0;
    std::vector<double> omega(n);
    auto project_out = [&](std::vector<double>& y) {
        for (const auto& q : basis) {
            const double c = dot(q, y);
            for (std::size_t i = 0; i < m; ++i) y[i] -= c * q[i];
        }
    };
    auto sample = [&]() {
        base.substream(drawn++).fill_normal(omega);
        std::vector<double> y = multiply(a, omega);
        project_out(y);
        return y;
    };

    std::deque<std::vector<double>> window;
    for (std::size_t i = 0; i < probes; ++i) window.push_back(sample());

    auto largest = [&]() {
        double worst = 0.0;
        for (const auto& y : window) worst = std::max(worst, norm2(y));
        return worst;
    };

    while (largest() > threshold) {
        if (basis.size() == max_cols) throw NumericalError("adaptive_range_finder: tolerance unreachable");
        std::vector<double> y = std::move(window.front());
        window.pop_front();
        project_out(y);  // second Gram-Schmidt pass
        const double ny = norm2(y);
        if (ny > 0.0) {
            for (double& v : y) v /= ny;
            for (auto& other : window) {
                const double c = dot(y, other);
                for (std::size_t i = 0; i < m; ++i) other[i] -= c * y[i];
            }
            basis.push_back(std::move(y));
        }
        window.push_back(sample());
    }

    DenseMatrix p(m, basis.size());
    for (std::size_t j = 0; j < basis.size(); ++j)
        for (std::size_t i = 0; i < m; ++i) p(i, j) = basis[j][i];
    return p;
}

double range_error_bound(std::size_t k, std::size_t l, std::size_t q, std::size_t m, std::size_t n,
                         double sigma_next) {
    if (k < 2) throw DimensionError("range_error_bound: target rank must be at least 2");
    if (l < 2) throw DimensionError("range_error_bound: oversampling must be at least 2");
    if (k + l > std::min(m, n)) throw DimensionError("range_error_bound: k + l exceeds min(m, n)");
    if (!(sigma_next >= 0.0)) throw DimensionError("range_error_bound: sigma must be nonnegative");
    const double kd = static_cast<double>(k), ld = static_cast<double>(l);
    const double tail = std::sqrt(static_cast<double>(std::min(m, n) - k));
    const double bracket = 1.0 + std::sqrt(kd / (ld - 1.0)) + std::numbers::e * std::sqrt(kd + ld) / ld * tail;
    return std::pow(bracket, 1.0 / (2.0 * static_cast<double>(q) + 1.0)) * sigma_next;
}

double srft_error_bound(std::size_t k, std::size_t l, std::size_t n, double sigma_next) {
    if (k < 1) throw DimensionError("srft_error_bound: target rank must be positive");
    if (k + l > n) throw DimensionError("srft_error_bound: k + l exceeds the column count");
    if (!(sigma_next >= 0.0)) throw DimensionError("srft_error_bound: sigma must be nonnegative");
    return (1.0 + std::sqrt(1.0 + 7.0 * static_cast<double>(n) / static_cast<double>(k + l))) * sigma_next;
}

} // namespace hokalman
