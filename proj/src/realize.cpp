#include "hokalman/realize.hpp"

#include <chrono>
#include <cmath>

#include "hokalman/error.hpp"
#include "hokalman/kernels.hpp"

namespace hokalman {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

void require_resolvable(const SvdFactors& f, std::size_t n, std::size_t rows, std::size_t cols) {
    const double cutoff = f.S.empty() ? 0.0 : rank_tolerance(rows, cols) * f.S.front();
    if (f.S.size() < n || !(f.S[n - 1] > cutoff)) {
        throw NumericalError("order too high for data: sigma_" + std::to_string(n) + " of the Hankel matrix is below " +
                             "the rank cutoff");
    }
}

} // namespace

std::string to_string(RealizationMode mode) {
    return mode == RealizationMode::deterministic ? "deterministic" : "stochastic";
}

DenseMatrix RealizationResult::approximant() const { return multiply(O, Q); }

RealizationResult ho_kalman(const MarkovParams& g, const HoKalmanOptions& options) {
    const auto start = Clock::now();
    const std::size_t n = options.order;
    const HankelSplit split = options.split;
    if (n == 0) throw DimensionError("ho_kalman: order must be positive");
    if (n > std::min(split.t1, split.t2)) {
        throw DimensionError("order too high: n = " + std::to_string(n) + " exceeds min(T1, T2) = " +
                             std::to_string(std::min(split.t1, split.t2)));
    }
    if (options.mode == RealizationMode::stochastic && !options.rsvd) {
        throw DimensionError("ho_kalman: stochastic mode needs an RSVD configuration");
    }
    const std::size_t p = g.outputs(), m = g.inputs();

    RealizationResult result;
    result.mode = options.mode;
    result.split = split;

    // W = Uᵀ H⁻ (n x m·T2). H⁺ is H⁻ shifted left by one block column plus a
    // new last block column, so Uᵀ H⁺ needs only W and Uᵀ times that column.
    SvdFactors f;
    DenseMatrix w;
    {
        DenseMatrix hminus = build_hankel_minus(g, split);
        const std::size_t rows = hminus.rows(), cols = hminus.cols();
        const auto t0 = Clock::now();
        if (options.mode == RealizationMode::deterministic) {
            f = svd(std::move(hminus));
            result.factor_seconds = seconds_since(t0);
            require_resolvable(f, n, rows, cols);
            result.spectrum = f.S;
            f = leading(f, n);
            w = f.V.transposed();  // Uᵀ H⁻ = Σ Vᵀ for a full SVD
            for (std::size_t i = 0; i < n; ++i)
                for (double& v : w.row(i)) v *= f.S[i];
        } else {
            RsvdConfig cfg = *options.rsvd;
            cfg.rank = n;
            cfg.cap_samples = true;
            result.samples = cfg.samples_for(rows, cols);
            f = rsvd(hminus, cfg);
            result.factor_seconds = seconds_since(t0);
            require_resolvable(f, n, rows, cols);
            result.spectrum = f.S;
            w = multiply_tn(f.U, hminus);
        }
    }

    std::vector<double> root(n), inv_root(n);
    for (std::size_t i = 0; i < n; ++i) {
        root[i] = std::sqrt(f.S[i]);
        inv_root[i] = 1.0 / root[i];
    }

    result.O = f.U;
    for (std::size_t i = 0; i < result.O.rows(); ++i)
        for (std::size_t c = 0; c < n; ++c) result.O(i, c) *= root[c];
    DenseMatrix v_scaled = f.V;
    for (std::size_t i = 0; i < v_scaled.rows(); ++i)
        for (std::size_t c = 0; c < n; ++c) v_scaled(i, c) *= root[c];
    result.Q = v_scaled.transposed();

    const std::size_t width = m * split.t2;
    DenseMatrix last(p * split.t1, m);
    for (std::size_t i = 0; i < split.t1; ++i) last.set_block(i * p, 0, g.block(i + split.t2 + 1));
    DenseMatrix ut_hplus(n, width);
    ut_hplus.set_block(0, 0, w.block(0, m, n, width - m));
    ut_hplus.set_block(0, width - m, multiply_tn(f.U, last));

    // A = Σ^{-1/2} Uᵀ H⁺ V Σ^{-1/2}
    DenseMatrix a = multiply(ut_hplus, f.V);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) a(i, j) *= inv_root[i] * inv_root[j];

    result.ss.A = std::move(a);
    result.ss.B = result.Q.left_columns(m);
    result.ss.C = result.O.top_rows(p);
    result.ss.D = g.block(0);
    result.sigma = std::move(f.S);
    result.total_seconds = seconds_since(start);
    return result;
}

std::size_t estimate_order(std::span<const double> sigma) {
    if (sigma.size() < 2) return sigma.size();
    std::size_t best = 0;
    double best_ratio = 0.0;
    for (std::size_t i = 0; i + 1 < sigma.size(); ++i) {
        if (!(sigma[i] > 0.0)) break;
        if (sigma[i + 1] <= 0.0) return i + 1;
        const double ratio = sigma[i] / sigma[i + 1];
        if (ratio > best_ratio) {
            best_ratio = ratio;
            best = i;
        }
    }
    return best + 1;
}

} // namespace hokalman
