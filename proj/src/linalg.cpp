#include "hokalman/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

#include "hokalman/error.hpp"
#include "hokalman/kernels.hpp"
#include "hokalman/random.hpp"

namespace hokalman {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

lapack_int to_lapack(std::size_t n) {
    if (n > static_cast<std::size_t>(std::numeric_limits<lapack_int>::max())) {
        throw DimensionError("matrix dimension exceeds LAPACK index range");
    }
    return static_cast<lapack_int>(n);
}

// Householder reflector for x (length len, stride 1 in `v`): on return v[0]
// is implicitly 1, v[1..] holds the tail, and H x = beta e1.
struct Reflector {
    double tau = 0.0;
    double beta = 0.0;
};

Reflector make_reflector(std::vector<double>& v) {
    const double norm = norm2(v);
    if (norm == 0.0) return {};
    const double x0 = v[0];
    const double beta = -std::copysign(norm, x0);
    const double v0 = x0 - beta;
    for (std::size_t i = 1; i < v.size(); ++i) v[i] /= v0;
    v[0] = 1.0;
    return {(beta - x0) / beta, beta};
}

} // namespace

double rank_tolerance(std::size_t rows, std::size_t cols) noexcept {
    return static_cast<double>(std::max(rows, cols)) * kEps;
}

// ---------------------------------------------------------------- PivotedQr

PivotedQr::PivotedQr(DenseMatrix a) : qr_(std::move(a)) {
    if (qr_.empty()) throw DimensionError("PivotedQr: empty matrix");
    const std::size_t m = qr_.rows(), n = qr_.cols();
    const std::size_t kmax = std::min(m, n);
    tau_.assign(kmax, 0.0);
    perm_.resize(n);
    std::iota(perm_.begin(), perm_.end(), std::size_t{0});

    std::vector<double> colnorm(n, 0.0), reference_norm(n);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) colnorm[j] += qr_(i, j) * qr_(i, j);
    reference_norm = colnorm;

    std::vector<double> v(m), w(n);
    for (std::size_t k = 0; k < kmax; ++k) {
        const auto best = static_cast<std::size_t>(
            std::max_element(colnorm.begin() + static_cast<std::ptrdiff_t>(k), colnorm.end()) - colnorm.begin());
        if (best != k) {
            for (std::size_t i = 0; i < m; ++i) std::swap(qr_(i, k), qr_(i, best));
            std::swap(perm_[k], perm_[best]);
            std::swap(colnorm[k], colnorm[best]);
            std::swap(reference_norm[k], reference_norm[best]);
        }
        v.resize(m - k);
        for (std::size_t i = k; i < m; ++i) v[i - k] = qr_(i, k);
        const Reflector h = make_reflector(v);
        tau_[k] = h.tau;
        qr_(k, k) = h.beta;
        for (std::size_t i = k + 1; i < m; ++i) qr_(i, k) = v[i - k];
        if (h.tau == 0.0) {
            // Remaining columns are zero below row k.
            continue;
        }
        // Apply H = I - tau v vᵀ to the trailing columns, row by row.
        std::fill(w.begin() + static_cast<std::ptrdiff_t>(k + 1), w.end(), 0.0);
        for (std::size_t i = k; i < m; ++i) {
            const double vi = v[i - k];
            const double* row = qr_.data() + i * n;
            for (std::size_t j = k + 1; j < n; ++j) w[j] += vi * row[j];
        }
        for (std::size_t i = k; i < m; ++i) {
            const double s = h.tau * v[i - k];
            double* row = qr_.data() + i * n;
            for (std::size_t j = k + 1; j < n; ++j) row[j] -= s * w[j];
        }
        for (std::size_t j = k + 1; j < n; ++j) {
            colnorm[j] -= qr_(k, j) * qr_(k, j);
            if (colnorm[j] <= 1e-8 * reference_norm[j]) {
                double s = 0.0;
                for (std::size_t i = k + 1; i < m; ++i) s += qr_(i, j) * qr_(i, j);
                colnorm[j] = s;
                reference_norm[j] = s;
            }
        }
    }
    const double lead = std::abs(qr_(0, 0));
    const double cutoff = rank_tolerance(m, n) * lead;
    rank_ = 0;
    if (lead > 0.0) {
        while (rank_ < kmax && std::abs(qr_(rank_, rank_)) > cutoff) ++rank_;
    }
}

std::vector<double> PivotedQr::pivots() const {
    std::vector<double> out(tau_.size());
    for (std::size_t k = 0; k < out.size(); ++k) out[k] = std::abs(qr_(k, k));
    return out;
}

DenseMatrix PivotedQr::q(std::size_t ncols) const {
    const std::size_t m = qr_.rows();
    if (ncols > m) throw DimensionError("PivotedQr::q: more columns than rows");
    DenseMatrix q(m, ncols);
    for (std::size_t j = 0; j < ncols; ++j) q(j, j) = 1.0;
    std::vector<double> w(ncols);
    // Reflectors past ncols act only on rows that start out zero.
    const std::size_t nref = std::min(tau_.size(), ncols);
    for (std::size_t kk = nref; kk-- > 0;) {
        const double tau = tau_[kk];
        if (tau == 0.0) continue;
        std::fill(w.begin(), w.end(), 0.0);
        for (std::size_t i = kk; i < m; ++i) {
            const double vi = (i == kk) ? 1.0 : qr_(i, kk);
            const double* row = q.data() + i * ncols;
            for (std::size_t j = 0; j < ncols; ++j) w[j] += vi * row[j];
        }
        for (std::size_t i = kk; i < m; ++i) {
            const double s = tau * ((i == kk) ? 1.0 : qr_(i, kk));
            double* row = q.data() + i * ncols;
            for (std::size_t j = 0; j < ncols; ++j) row[j] -= s * w[j];
        }
    }
    return q;
}

DenseMatrix PivotedQr::solve(const DenseMatrix& b) const {
    const std::size_t m = qr_.rows(), n = qr_.cols();
    if (b.rows() != m) throw DimensionError("PivotedQr::solve: right-hand side row mismatch");
    if (rank_ < n) throw NumericalError("least squares: rank-deficient regressor");
    const std::size_t nrhs = b.cols();
    DenseMatrix y = b;
    std::vector<double> w(nrhs);
    for (std::size_t k = 0; k < n; ++k) {
        const double tau = tau_[k];
        if (tau == 0.0) continue;
        std::fill(w.begin(), w.end(), 0.0);
        for (std::size_t i = k; i < m; ++i) {
            const double vi = (i == k) ? 1.0 : qr_(i, k);
            for (std::size_t j = 0; j < nrhs; ++j) w[j] += vi * y(i, j);
        }
        for (std::size_t i = k; i < m; ++i) {
            const double s = tau * ((i == k) ? 1.0 : qr_(i, k));
            for (std::size_t j = 0; j < nrhs; ++j) y(i, j) -= s * w[j];
        }
    }
    DenseMatrix z(n, nrhs);
    for (std::size_t kk = n; kk-- > 0;) {
        for (std::size_t j = 0; j < nrhs; ++j) {
            double s = y(kk, j);
            for (std::size_t c = kk + 1; c < n; ++c) s -= qr_(kk, c) * z(c, j);
            z(kk, j) = s / qr_(kk, kk);
        }
    }
    DenseMatrix x(n, nrhs);
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t j = 0; j < nrhs; ++j) x(perm_[k], j) = z(k, j);
    return x;
}

DenseMatrix orth(const DenseMatrix& a) {
    if (a.empty()) throw DimensionError("orth: empty matrix");
    if (std::all_of(a.entries().begin(), a.entries().end(), [](double v) { return v == 0.0; })) {
        throw NumericalError("orth: zero range");
    }
    PivotedQr qr(a);
    if (qr.rank() == 0) throw NumericalError("orth: zero range");
    return qr.q(qr.rank());
}

// ---------------------------------------------------------------------- SVD

void normalize_signs(SvdFactors& f) {
    const std::size_t r = f.S.size();
    for (std::size_t c = 0; c < r; ++c) {
        std::size_t best = 0;
        double mag = -1.0;
        for (std::size_t i = 0; i < f.U.rows(); ++i) {
            if (std::abs(f.U(i, c)) > mag) {
                mag = std::abs(f.U(i, c));
                best = i;
            }
        }
        if (f.U(best, c) < 0.0) {
            for (std::size_t i = 0; i < f.U.rows(); ++i) f.U(i, c) = -f.U(i, c);
            for (std::size_t i = 0; i < f.V.rows(); ++i) f.V(i, c) = -f.V(i, c);
        }
    }
}

SvdFactors svd(DenseMatrix&& a) {
    if (a.empty()) throw DimensionError("svd: empty matrix");
    a.require_finite("svd");
    const std::size_t m = a.rows(), n = a.cols();
    const std::size_t k = std::min(m, n);
    // Row-major A is column-major Aᵀ (n x m). Factor Aᵀ = U' S VT'; then
    // U_A = VT'ᵀ, whose column-major k x m storage is row-major m x k, and
    // V_A = U', whose storage is row-major Vᵀ.
    const lapack_int ln = to_lapack(n), lm = to_lapack(m), lk = to_lapack(k);
    std::vector<double> s(k);
    DenseMatrix u_out(m, k);
    std::vector<double> vt_rowmajor(k * n);
    std::vector<lapack_int> iwork(8 * k);
    double query = 0.0;
    lapack_int info = LAPACKE_dgesdd_work(LAPACK_COL_MAJOR, 'S', ln, lm, a.data(), ln, s.data(), vt_rowmajor.data(),
                                          ln, u_out.data(), lk, &query, -1, iwork.data());
    if (info != 0) throw NumericalError("svd: workspace query failed");
    {
        std::vector<double> work(static_cast<std::size_t>(query) + 1);
        info = LAPACKE_dgesdd_work(LAPACK_COL_MAJOR, 'S', ln, lm, a.data(), ln, s.data(), vt_rowmajor.data(), ln,
                                   u_out.data(), lk, work.data(), static_cast<lapack_int>(work.size()),
                                   iwork.data());
    }
    if (info > 0) throw ConvergenceError("svd: dgesdd failed to converge", static_cast<std::size_t>(info));
    if (info < 0) throw NumericalError("svd: invalid argument " + std::to_string(-info));
    a = DenseMatrix();
    DenseMatrix vt(k, n, std::move(vt_rowmajor));
    SvdFactors f{std::move(u_out), std::move(s), vt.transposed()};
    normalize_signs(f);
    return f;
}

SvdFactors svd(const DenseMatrix& a) { return svd(DenseMatrix(a)); }

SvdFactors leading(const SvdFactors& f, std::size_t r) {
    if (r == 0) throw DimensionError("truncate: rank must be positive");
    if (r > f.S.size()) throw DimensionError("truncate: rank exceeds available singular values");
    return {f.U.left_columns(r), std::vector<double>(f.S.begin(), f.S.begin() + static_cast<std::ptrdiff_t>(r)),
            f.V.left_columns(r)};
}

DenseMatrix truncate(const SvdFactors& f, std::size_t r) { return reconstruct(leading(f, r)); }

DenseMatrix reconstruct(const SvdFactors& f) {
    DenseMatrix us = f.U;
    for (std::size_t i = 0; i < us.rows(); ++i)
        for (std::size_t c = 0; c < f.S.size(); ++c) us(i, c) *= f.S[c];
    return multiply_nt(us, f.V);
}

DenseMatrix pinv(const DenseMatrix& a) {
    const SvdFactors f = svd(a);
    const double cutoff = f.S.empty() ? 0.0 : rank_tolerance(a.rows(), a.cols()) * f.S.front();
    std::size_t r = 0;
    while (r < f.S.size() && f.S[r] > cutoff) ++r;
    if (r == 0) return DenseMatrix(a.cols(), a.rows());
    DenseMatrix vs = f.V.left_columns(r);
    for (std::size_t i = 0; i < vs.rows(); ++i)
        for (std::size_t c = 0; c < r; ++c) vs(i, c) /= f.S[c];
    return multiply_nt(vs, f.U.left_columns(r));
}

// -------------------------------------------------------------------- norms

double frobenius_norm(const DenseMatrix& a) noexcept { return norm2(a.entries()); }

double spectral_norm(const DenseMatrix& a) {
    if (a.empty()) throw DimensionError("norms: empty matrix");
    if (frobenius_norm(a) == 0.0) return 0.0;
    constexpr std::size_t kMaxIterations = 10000;
    constexpr double kTol = 1e-10;
    const CounterRng rng(0x6e6f726dULL, 0);
    std::vector<double> x(a.cols());
    for (std::uint64_t attempt = 0; attempt < 4; ++attempt) {
        rng.substream(attempt).fill_normal(x);
        double nx = norm2(x);
        for (double& v : x) v /= nx;
        double sigma = 0.0;
        for (std::size_t it = 1; it <= kMaxIterations; ++it) {
            const std::vector<double> y = multiply(a, x);
            const double next = norm2(y);
            if (next == 0.0) break;  // start vector in the null space; retry
            x = multiply_tn(a, y);
            nx = norm2(x);
            if (nx == 0.0) break;
            for (double& v : x) v /= nx;
            if (std::abs(next - sigma) <= kTol * next) return next;
            sigma = next;
            if (it == kMaxIterations) throw ConvergenceError("spectral norm: power iteration did not converge", it);
        }
    }
    throw NumericalError("spectral norm: power iteration kept hitting the null space");
}

Norms norms(const DenseMatrix& a) { return {spectral_norm(a), frobenius_norm(a)}; }

std::vector<std::complex<double>> eigenvalues(const DenseMatrix& a) {
    if (a.empty() || a.rows() != a.cols()) throw DimensionError("eigenvalues: matrix must be square");
    a.require_finite("eigenvalues");
    const lapack_int n = to_lapack(a.rows());
    DenseMatrix work_a = a;  // column-major view of Aᵀ; same spectrum
    std::vector<double> wr(a.rows()), wi(a.rows());
    double query = 0.0;
    double dummy = 0.0;
    lapack_int info = LAPACKE_dgeev_work(LAPACK_COL_MAJOR, 'N', 'N', n, work_a.data(), n, wr.data(), wi.data(), &dummy,
                                         1, &dummy, 1, &query, -1);
    if (info != 0) throw NumericalError("eigenvalues: workspace query failed");
    std::vector<double> work(static_cast<std::size_t>(query) + 1);
    info = LAPACKE_dgeev_work(LAPACK_COL_MAJOR, 'N', 'N', n, work_a.data(), n, wr.data(), wi.data(), &dummy, 1, &dummy,
                              1, work.data(), static_cast<lapack_int>(work.size()));
    if (info > 0) throw ConvergenceError("eigenvalues: QR algorithm failed", static_cast<std::size_t>(info));
    std::vector<std::complex<double>> out(a.rows());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = {wr[i], wi[i]};
    return out;
}

double spectral_radius(const DenseMatrix& a) {
    double r = 0.0;
    for (const auto& z : eigenvalues(a)) r = std::max(r, std::abs(z));
    return r;
}

DenseMatrix solve(const DenseMatrix& a, const DenseMatrix& b) {
    if (a.rows() != a.cols() || a.rows() != b.rows()) throw DimensionError("solve: shape mismatch");
    DenseMatrix lu = a, x = b;
    std::vector<lapack_int> ipiv(a.rows());
    const lapack_int info = LAPACKE_dgesv(LAPACK_ROW_MAJOR, to_lapack(a.rows()), to_lapack(b.cols()), lu.data(),
                                          to_lapack(a.cols()), ipiv.data(), x.data(), to_lapack(b.cols()));
    if (info > 0) throw NumericalError("solve: singular matrix");
    if (info < 0) throw NumericalError("solve: invalid argument");
    return x;
}

LeastSquares least_squares(const DenseMatrix& a, const DenseMatrix& b) {
    if (a.empty() || a.rows() != b.rows() || b.cols() == 0) throw DimensionError("least_squares: shape mismatch");
    a.require_finite("least_squares");
    b.require_finite("least_squares");
    const std::size_t rows = a.rows(), cols = a.cols(), nrhs = b.cols();
    const std::size_t ldb = std::max(rows, cols);
    // Column-major copies; B is padded to max(rows, cols) rows as dgelsy requires.
    std::vector<double> ac(rows * cols), bc(ldb * nrhs, 0.0);
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j) ac[j * rows + i] = a(i, j);
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < nrhs; ++j) bc[j * ldb + i] = b(i, j);
    std::vector<lapack_int> jpvt(cols, 0);
    lapack_int rank = 0;
    const lapack_int info =
        LAPACKE_dgelsy(LAPACK_COL_MAJOR, to_lapack(rows), to_lapack(cols), to_lapack(nrhs), ac.data(),
                       to_lapack(rows), bc.data(), to_lapack(ldb), jpvt.data(), rank_tolerance(rows, cols), &rank);
    if (info != 0) throw NumericalError("least_squares: dgelsy failed with info " + std::to_string(info));
    LeastSquares out{DenseMatrix(cols, nrhs), static_cast<std::size_t>(rank)};
    for (std::size_t i = 0; i < cols; ++i)
        for (std::size_t j = 0; j < nrhs; ++j) out.x(i, j) = bc[j * ldb + i];
    return out;
}

double complex_spectral_norm(std::vector<std::complex<double>> a, std::size_t rows, std::size_t cols) {
    if (a.size() != rows * cols || a.empty()) throw DimensionError("complex_spectral_norm: shape mismatch");
    // Row-major rows x cols is column-major cols x rows (the transpose): same singular values.
    const lapack_int m = to_lapack(cols), n = to_lapack(rows);
    std::vector<double> s(std::min(rows, cols));
    std::vector<double> rwork(5 * s.size() + 1);
    std::complex<double> query, dummy;
    lapack_int info = LAPACKE_zgesvd_work(LAPACK_COL_MAJOR, 'N', 'N', m, n, a.data(), m, s.data(), &dummy, 1, &dummy,
                                          1, &query, -1, rwork.data());
    if (info != 0) throw NumericalError("complex_spectral_norm: workspace query failed");
    std::vector<std::complex<double>> work(static_cast<std::size_t>(query.real()) + 1);
    info = LAPACKE_zgesvd_work(LAPACK_COL_MAJOR, 'N', 'N', m, n, a.data(), m, s.data(), &dummy, 1, &dummy, 1,
                               work.data(), static_cast<lapack_int>(work.size()), rwork.data());
    if (info > 0) throw ConvergenceError("complex_spectral_norm: zgesvd failed", static_cast<std::size_t>(info));
    return s.front();
}

std::vector<std::complex<double>> complex_solve(std::vector<std::complex<double>> a, std::size_t n,
                                                std::vector<std::complex<double>> b, std::size_t nrhs) {
    if (a.size() != n * n || b.size() != n * nrhs) throw DimensionError("complex_solve: shape mismatch");
    std::vector<lapack_int> ipiv(n);
    const lapack_int info = LAPACKE_zgesv(LAPACK_ROW_MAJOR, to_lapack(n), to_lapack(nrhs), a.data(), to_lapack(n),
                                          ipiv.data(), b.data(), to_lapack(nrhs));
    if (info > 0) throw NumericalError("complex_solve: singular matrix");
    if (info < 0) throw NumericalError("complex_solve: invalid argument");
    return b;
}

// ------------------------------------------------------- reference Jacobi SVD

namespace reference {

SvdFactors jacobi_svd(const DenseMatrix& a, std::size_t max_sweeps) {
    if (a.empty()) throw DimensionError("jacobi_svd: empty matrix");
    if (a.rows() < a.cols()) {
        SvdFactors t = jacobi_svd(a.transposed(), max_sweeps);
        SvdFactors f{std::move(t.V), std::move(t.S), std::move(t.U)};
        normalize_signs(f);
        return f;
    }
    const std::size_t m = a.rows(), n = a.cols();
    DenseMatrix w = a.transposed();  // row j = column j of A
    DenseMatrix v = DenseMatrix::identity(n);
    std::size_t sweep = 0;
    for (;; ++sweep) {
        if (sweep == max_sweeps) throw ConvergenceError("jacobi_svd: no convergence", sweep);
        bool rotated = false;
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                auto wp = w.row(p), wq = w.row(q);
                const double alpha = dot(wp, wp), beta = dot(wq, wq), gamma = dot(wp, wq);
                if (std::abs(gamma) <= kEps * std::sqrt(alpha * beta) || gamma == 0.0) continue;
                rotated = true;
                const double zeta = (beta - alpha) / (2.0 * gamma);
                const double t = std::copysign(1.0, zeta) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
                const double c = 1.0 / std::sqrt(1.0 + t * t), s = c * t;
                for (std::size_t i = 0; i < m; ++i) {
                    const double x = wp[i], y = wq[i];
                    wp[i] = c * x - s * y;
                    wq[i] = s * x + c * y;
                }
                auto vp = v.row(p), vq = v.row(q);
                for (std::size_t i = 0; i < n; ++i) {
                    const double x = vp[i], y = vq[i];
                    vp[i] = c * x - s * y;
                    vq[i] = s * x + c * y;
                }
            }
        }
        if (!rotated) break;
    }
    std::vector<double> sigma(n);
    for (std::size_t j = 0; j < n; ++j) sigma[j] = norm2(w.row(j));
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return sigma[x] > sigma[y]; });

    SvdFactors f{DenseMatrix(m, n), std::vector<double>(n), DenseMatrix(n, n)};
    for (std::size_t c = 0; c < n; ++c) {
        const std::size_t j = order[c];
        f.S[c] = sigma[j];
        for (std::size_t i = 0; i < n; ++i) f.V(i, c) = v(j, i);
        if (sigma[j] > 0.0) {
            for (std::size_t i = 0; i < m; ++i) f.U(i, c) = w(j, i) / sigma[j];
        } else {
            // Complete U with a unit vector orthogonal to the columns already set.
            for (std::size_t e = 0; e < m; ++e) {
                std::vector<double> cand(m, 0.0);
                cand[e] = 1.0;
                for (std::size_t prev = 0; prev < c; ++prev) {
                    double proj = 0.0;
                    for (std::size_t i = 0; i < m; ++i) proj += f.U(i, prev) * cand[i];
                    for (std::size_t i = 0; i < m; ++i) cand[i] -= proj * f.U(i, prev);
                }
                const double nc = norm2(cand);
                if (nc > 0.5) {
                    for (std::size_t i = 0; i < m; ++i) f.U(i, c) = cand[i] / nc;
                    break;
                }
            }
        }
    }
    normalize_signs(f);
    return f;
}

} // namespace reference
} // namespace hokalman
