#include "hokalman/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <sstream>
#include <vector>

#include "hokalman/error.hpp"
#include "hokalman/kernels.hpp"
#include "hokalman/linalg.hpp"

namespace hokalman {

namespace {

void check_same_shape(const MarkovParams& g, const MarkovParams& g_hat) {
    if (g.outputs() != g_hat.outputs() || g.inputs() != g_hat.inputs() || g.horizon() != g_hat.horizon()) {
        throw DimensionError("Markov parameters differ in p, m or T");
    }
}

bool at_most(double lhs, double rhs, double slack) { return lhs <= rhs * (1.0 + slack) + 1e-300; }

DenseMatrix rank_n_part(DenseMatrix h, std::size_t n) { return truncate(svd(std::move(h)), n); }

} // namespace

double markov_error(const MarkovParams& g, const MarkovParams& g_hat) {
    check_same_shape(g, g_hat);
    return spectral_norm(g.flat() - g_hat.flat());
}

double markov_relative_error(const MarkovParams& g, const MarkovParams& g_hat) {
    check_same_shape(g, g_hat);
    const DenseMatrix flat = g.flat();
    const double base = frobenius_norm(flat);
    if (base == 0.0) throw NumericalError("relative Markov error: true parameters are zero");
    return frobenius_norm(flat - g_hat.flat()) / base;
}

bool HankelPerturbation::holds(double slack) const {
    return at_most(H_err, H_bound, slack) && at_most(Hplus_err, H_err, slack) && at_most(Hminus_err, H_err, slack) &&
           at_most(L_err, 2.0 * Hminus_err, slack) && at_most(L_err, L_bound, slack);
}

HankelPerturbation lemma1_bounds(const MarkovParams& g, const MarkovParams& g_hat, HankelSplit split,
                                 std::size_t order) {
    check_same_shape(g, g_hat);
    if (order == 0 || order > std::min(split.t1, split.t2)) throw DimensionError("lemma1_bounds: order out of range");
    const HankelPair h = build_hankel(g, split.t1, split.t2);
    const HankelPair h_hat = build_hankel(g_hat, split.t1, split.t2);

    HankelPerturbation out;
    out.gnorm = markov_error(g, g_hat);
    out.H_bound = std::sqrt(static_cast<double>(std::min(split.t1, split.t2 + 1))) * out.gnorm;
    out.L_bound = 2.0 * std::sqrt(static_cast<double>(std::min(split.t1, split.t2))) * out.gnorm;
    out.H_err = spectral_norm(h.H - h_hat.H);
    out.Hplus_err = spectral_norm(h.Hplus - h_hat.Hplus);
    out.Hminus_err = spectral_norm(h.Hminus - h_hat.Hminus);
    out.L_err = spectral_norm(rank_n_part(h.Hminus, order) - rank_n_part(h_hat.Hminus, order));
    return out;
}

BoundReport stochastic_bounds(const BoundInputs& in) {
    if (in.n == 0) throw DimensionError("bounds: n must be positive");
    if (in.l < 2) throw DimensionError("bounds: oversampling l must be at least 2");
    if (in.t1 == 0 || in.t2 == 0 || in.p == 0 || in.m == 0) throw DimensionError("bounds: empty Hankel geometry");
    const std::size_t rows = in.p * in.t1, cols = in.m * in.t2;
    if (in.n + in.l > std::min(rows, cols)) throw DimensionError("bounds: n + l exceeds min(p T1, m T2)");
    if (!(in.gnorm >= 0.0)) throw DimensionError("bounds: ‖G − Ĝ‖ must be nonnegative");
    if (in.sigma_min_L && !(*in.sigma_min_L > 0.0)) throw DimensionError("bounds: σ_min(L) must be positive");

    constexpr double e = std::numbers::e;
    const double n = static_cast<double>(in.n), l = static_cast<double>(in.l);
    const double g = in.gnorm;

    BoundReport r;
    r.in = in;
    r.C1 = std::sqrt(static_cast<double>(std::min(rows, cols) - in.n));
    r.C2 = std::sqrt(static_cast<double>(std::min(in.t1, in.t2)));
    r.lemma1_H = std::sqrt(static_cast<double>(std::min(in.t1, in.t2 + 1))) * g;
    r.lemma1_L = 2.0 * r.C2 * g;

    r.avg_bound = 2.0 * r.C2 * (2.0 + std::sqrt(n / (l - 1.0)) + e * std::sqrt(n + l) / l * r.C1) * g;
    const double bracket = 1.0 + 0.5 * std::sqrt(n / (l - 1.0)) + e * std::sqrt(n + l) / (2.0 * l) * r.C1;
    r.avg_bound_power = 4.0 * r.C2 * std::pow(bracket, 1.0 / (2.0 * static_cast<double>(in.q) + 1.0)) * g;

    if (in.l >= 4) {
        r.dev_bound_el =
            2.0 * r.C2 * (2.0 + 16.0 * std::sqrt(1.0 + n / (l - 1.0)) + 8.0 * std::sqrt(n + l) / (l + 1.0) * r.C1) * g;
    }
    r.dev_bound_ll = r.C2 * (2.0 + 6.0 * std::sqrt((n + l) * l * std::log(l)) + 3.0 * std::sqrt(n + l) * r.C1) * g;

    const double mt2 = static_cast<double>(cols);
    r.srft_bound = (1.0 + std::sqrt(1.0 + 7.0 * mt2 / (l + n))) * 2.0 * r.C2 * g;
    const double root = std::sqrt(n) + std::sqrt(8.0 * std::log(n * mt2));
    r.srft_applicable = 4.0 * root * root * std::log(n) <= l + n && l + n <= mt2;

    r.thm5_BC_bound = std::sqrt(5.0 * n * r.avg_bound);
    if (in.sigma_min_L) {
        const double smin = *in.sigma_min_L;
        r.C3 = 14.0 * std::sqrt(n) / smin;
        if (in.hplus_norm) {
            const double hplus_err = in.hplus_err.value_or(r.lemma1_H);
            r.thm5_A_bound = *r.C3 * (std::sqrt(r.avg_bound / smin) * (*in.hplus_norm + hplus_err) + hplus_err);
        }
    }
    return r;
}

std::string BoundReport::to_text() const {
    std::ostringstream out;
    auto put = [&](const char* key, const std::optional<double>& v) {
        out << key << '=' << (v ? format_double(*v) : std::string("n/a")) << '\n';
    };
    out << "n=" << in.n << "\nl=" << in.l << "\nq=" << in.q << "\np=" << in.p << "\nm=" << in.m << "\nT1=" << in.t1
        << "\nT2=" << in.t2 << '\n';
    put("gnorm", in.gnorm);
    put("sigma_min_L", in.sigma_min_L);
    put("hplus_norm", in.hplus_norm);
    put("hplus_err", in.hplus_err);
    put("C1", C1);
    put("C2", C2);
    put("C3", C3);
    put("lemma1_H", lemma1_H);
    put("lemma1_L", lemma1_L);
    put("avg_bound", avg_bound);
    put("avg_bound_power", avg_bound_power);
    put("dev_bound_el", dev_bound_el);
    put("dev_bound_ll", dev_bound_ll);
    put("srft_bound", srft_bound);
    out << "srft_applicable=" << (srft_applicable ? "true" : "false") << '\n';
    put("thm5_BC_bound", thm5_BC_bound);
    put("thm5_A_bound", thm5_A_bound);
    return out.str();
}

DenseMatrix align_unitary(const DenseMatrix& x, const DenseMatrix& y) {
    if (x.rows() != y.rows() || x.cols() != y.cols() || x.empty()) {
        throw DimensionError("align_unitary: X and Y must have the same nonempty shape");
    }
    const SvdFactors f = svd(multiply_tn(y, x));
    if (f.S.empty() || !(f.S.front() > 0.0)) throw NumericalError("align_unitary: YᵀX is zero");
    return multiply_nt(f.U, f.V);
}

bool Thm5Check::factors_hold() const {
    constexpr double slack = 1e-9;
    return at_most(C_err, O_err, slack) && at_most(O_err, factor_bound + roundoff, slack) &&
           at_most(B_err, Q_err, slack) && at_most(Q_err, factor_bound + roundoff, slack);
}

bool Thm5Check::a_holds() const { return at_most(A_err, A_bound + roundoff, 1e-9); }

Thm5Check thm5_check(const RealizationResult& truth, const RealizationResult& est, const BoundReport& report) {
    const std::size_t n = truth.ss.order();
    if (est.ss.order() != n || truth.O.rows() != est.O.rows() || truth.Q.cols() != est.Q.cols()) {
        throw DimensionError("thm5_check: realizations differ in shape");
    }
    if (!report.in.hplus_norm) throw DimensionError("thm5_check: report lacks ‖H⁺‖");

    Thm5Check out;
    out.sigma_min = truth.sigma_min();
    out.L_err = spectral_norm(truth.approximant() - est.approximant());
    out.applicable = out.L_err <= 0.5 * out.sigma_min;
    if (!out.applicable) return out;

    out.roundoff = 64.0 * std::numeric_limits<double>::epsilon() *
                   std::max({frobenius_norm(truth.O), frobenius_norm(truth.Q), frobenius_norm(truth.ss.A)});
    out.S = align_unitary(truth.O, est.O);
    const DenseMatrix st = out.S.transposed();
    out.C_err = frobenius_norm(truth.ss.C - multiply(est.ss.C, out.S));
    out.O_err = frobenius_norm(truth.O - multiply(est.O, out.S));
    out.B_err = frobenius_norm(truth.ss.B - multiply(st, est.ss.B));
    out.Q_err = frobenius_norm(truth.Q - multiply(st, est.Q));
    out.A_err = frobenius_norm(truth.ss.A - multiply(multiply(st, est.ss.A), out.S));

    const double nd = static_cast<double>(n);
    out.factor_bound = std::sqrt(5.0 * nd * out.L_err);
    const double hplus_err = report.in.hplus_err.value_or(report.lemma1_H);
    const double c3 = 14.0 * std::sqrt(nd) / out.sigma_min;
    out.A_bound = c3 * (std::sqrt(out.L_err / out.sigma_min) * (*report.in.hplus_norm + hplus_err) + hplus_err);
    return out;
}

namespace {

using cplx = std::complex<double>;

void require_stable(const StateSpace& ss, const char* which) {
    ss.validate();
    if (!(spectral_radius(ss.A) < 1.0)) {
        throw NumericalError(std::string("hinf_error: ") + which + " system is not Schur stable");
    }
}

// G(z) = C (zI − A)⁻¹ B + D, p x m row-major.
std::vector<cplx> transfer(const StateSpace& ss, cplx z) {
    const std::size_t n = ss.order(), m = ss.inputs(), p = ss.outputs();
    std::vector<cplx> resolvent(n * n), rhs(n * m);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) resolvent[i * n + j] = -ss.A(i, j);
        resolvent[i * n + i] += z;
        for (std::size_t j = 0; j < m; ++j) rhs[i * m + j] = ss.B(i, j);
    }
    const std::vector<cplx> x = complex_solve(std::move(resolvent), n, std::move(rhs), m);
    std::vector<cplx> g(p * m);
    for (std::size_t i = 0; i < p; ++i)
        for (std::size_t j = 0; j < m; ++j) {
            cplx s = ss.D(i, j);
            for (std::size_t k = 0; k < n; ++k) s += ss.C(i, k) * x[k * m + j];
            g[i * m + j] = s;
        }
    return g;
}

cplx grid_point(std::size_t k, std::size_t grid_points) {
    return std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(grid_points));
}

void check_grid(std::size_t grid_points) {
    if (grid_points < 64) throw DimensionError("hinf_error: need at least 64 grid points");
}

} // namespace

double hinf_norm(const StateSpace& ss, std::size_t grid_points) {
    check_grid(grid_points);
    require_stable(ss, "the");
    // Real coefficients: G(conj z) = conj G(z), so half the circle suffices.
    const std::size_t half = grid_points / 2;
    double peak = 0.0;
#pragma omp parallel for schedule(static) reduction(max : peak)
    for (std::ptrdiff_t kk = 0; kk <= static_cast<std::ptrdiff_t>(half); ++kk) {
        const auto g = transfer(ss, grid_point(static_cast<std::size_t>(kk), grid_points));
        peak = std::max(peak, complex_spectral_norm(g, ss.outputs(), ss.inputs()));
    }
    return peak;
}

double hinf_error(const StateSpace& truth, const StateSpace& est, std::size_t grid_points) {
    check_grid(grid_points);
    if (truth.inputs() != est.inputs() || truth.outputs() != est.outputs()) {
        throw DimensionError("hinf_error: systems differ in input or output dimension");
    }
    require_stable(truth, "true");
    require_stable(est, "estimated");
    const std::size_t half = grid_points / 2;
    double num = 0.0, den = 0.0;
#pragma omp parallel for schedule(static) reduction(max : num, den)
    for (std::ptrdiff_t kk = 0; kk <= static_cast<std::ptrdiff_t>(half); ++kk) {
        const cplx z = grid_point(static_cast<std::size_t>(kk), grid_points);
        const auto g = transfer(truth, z);
        auto diff = transfer(est, z);
        for (std::size_t i = 0; i < diff.size(); ++i) diff[i] -= g[i];
        den = std::max(den, complex_spectral_norm(g, truth.outputs(), truth.inputs()));
        num = std::max(num, complex_spectral_norm(std::move(diff), truth.outputs(), truth.inputs()));
    }
    if (!(den > 0.0)) throw NumericalError("hinf_error: true transfer function vanishes on the grid");
    return num / den;
}

Summary summarize(std::span<const double> values) {
    Summary s;
    s.count = values.size();
    if (values.empty()) return s;
    // Neumaier summation
    auto compensated = [&](auto term) {
        double sum = 0.0, c = 0.0;
        for (double v : values) {
            const double x = term(v);
            const double t = sum + x;
            c += std::abs(sum) >= std::abs(x) ? (sum - t) + x : (x - t) + sum;
            sum = t;
        }
        return sum + c;
    };
    const double count = static_cast<double>(values.size());
    s.mean = compensated([](double v) { return v; }) / count;
    if (values.size() > 1) {
        const double ss = compensated([&](double v) { return (v - s.mean) * (v - s.mean); });
        s.std_error = std::sqrt(ss / (count - 1.0) / count);
    }
    return s;
}

double median(std::span<const double> values) {
    if (values.empty()) throw DimensionError("median of an empty sample");
    std::vector<double> v(values.begin(), values.end());
    const std::size_t mid = v.size() / 2;
    std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
    const double upper = v[mid];
    if (v.size() % 2 == 1) return upper;
    const double lower = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
    return 0.5 * (lower + upper);
}

} // namespace hokalman
