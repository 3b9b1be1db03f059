#include "hokalman/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>

#include <omp.h>

#include "hokalman/error.hpp"

namespace hokalman {

namespace {

constexpr std::size_t kDepthBlock = 128;  // rows of b kept hot per pass
constexpr std::size_t kWidthBlock = 512;  // output columns per pass

void require_nonempty(const DenseMatrix& a, const char* what) {
    if (a.empty()) throw DimensionError(std::string(what) + ": empty matrix");
}

// c(m x n) += a(:, p0:p1) * b(p0:p1, j0:j1), where `a_rows` yields row i of a
// as a pointer whose element p is a(i, p) (p relative to the whole depth).
template <class RowOfA>
void accumulate_panel(double* c, std::size_t m, std::size_t n, const double* b, std::size_t p0, std::size_t p1,
                      std::size_t j0, std::size_t j1, RowOfA a_row) {
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t ii = 0; ii < static_cast<std::ptrdiff_t>(m); ++ii) {
        const auto i = static_cast<std::size_t>(ii);
        const double* arow = a_row(i);
        double* crow = c + i * n;
        for (std::size_t p = p0; p < p1; ++p) {
            const double s = arow[p - p0];
            const double* brow = b + p * n;
#pragma omp simd
            for (std::size_t j = j0; j < j1; ++j) crow[j] += s * brow[j];
        }
    }
}

} // namespace

int kernel_threads() noexcept { return omp_get_max_threads(); }
void set_kernel_threads(int n) noexcept { omp_set_num_threads(std::max(1, n)); }

DenseMatrix multiply(const DenseMatrix& a, const DenseMatrix& b) {
    require_nonempty(a, "multiply");
    require_nonempty(b, "multiply");
    if (a.cols() != b.rows()) throw DimensionError("multiply: inner dimension mismatch");
    const std::size_t m = a.rows(), k = a.cols(), n = b.cols();
    DenseMatrix c(m, n);
    for (std::size_t j0 = 0; j0 < n; j0 += kWidthBlock) {
        const std::size_t j1 = std::min(n, j0 + kWidthBlock);
        for (std::size_t p0 = 0; p0 < k; p0 += kDepthBlock) {
            const std::size_t p1 = std::min(k, p0 + kDepthBlock);
            accumulate_panel(c.data(), m, n, b.data(), p0, p1, j0, j1,
                             [&](std::size_t i) { return a.data() + i * k + p0; });
        }
    }
    return c;
}

DenseMatrix multiply_tn(const DenseMatrix& a, const DenseMatrix& b) {
    require_nonempty(a, "multiply_tn");
    require_nonempty(b, "multiply_tn");
    if (a.rows() != b.rows()) throw DimensionError("multiply_tn: inner dimension mismatch");
    const std::size_t k = a.rows(), m = a.cols(), n = b.cols();
    DenseMatrix c(m, n);
    // Transpose one depth panel of a at a time so the inner kernel reads rows.
    std::vector<double> panel(m * kDepthBlock);
    for (std::size_t p0 = 0; p0 < k; p0 += kDepthBlock) {
        const std::size_t p1 = std::min(k, p0 + kDepthBlock);
        const std::size_t depth = p1 - p0;
#pragma omp parallel for schedule(static)
        for (std::ptrdiff_t ii = 0; ii < static_cast<std::ptrdiff_t>(m); ++ii) {
            const auto i = static_cast<std::size_t>(ii);
            for (std::size_t p = 0; p < depth; ++p) panel[i * depth + p] = a(p0 + p, i);
        }
        for (std::size_t j0 = 0; j0 < n; j0 += kWidthBlock) {
            const std::size_t j1 = std::min(n, j0 + kWidthBlock);
            accumulate_panel(c.data(), m, n, b.data(), p0, p1, j0, j1,
                             [&](std::size_t i) { return panel.data() + i * depth; });
        }
    }
    return c;
}

DenseMatrix multiply_nt(const DenseMatrix& a, const DenseMatrix& b) {
    if (a.cols() != b.cols()) throw DimensionError("multiply_nt: inner dimension mismatch");
    return multiply(a, b.transposed());
}

std::vector<double> multiply(const DenseMatrix& a, std::span<const double> x) {
    if (a.cols() != x.size()) throw DimensionError("multiply: vector length mismatch");
    std::vector<double> y(a.rows());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t ii = 0; ii < static_cast<std::ptrdiff_t>(a.rows()); ++ii) {
        const auto i = static_cast<std::size_t>(ii);
        y[i] = dot(a.row(i), x);
    }
    return y;
}

std::vector<double> multiply_tn(const DenseMatrix& a, std::span<const double> x) {
    if (a.rows() != x.size()) throw DimensionError("multiply_tn: vector length mismatch");
    const std::size_t n = a.cols();
    std::vector<double> y(n, 0.0);
    const auto chunks = static_cast<std::ptrdiff_t>((n + kWidthBlock - 1) / kWidthBlock);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t cb = 0; cb < chunks; ++cb) {
        const std::size_t j0 = static_cast<std::size_t>(cb) * kWidthBlock;
        const std::size_t j1 = std::min(n, j0 + kWidthBlock);
        for (std::size_t p = 0; p < a.rows(); ++p) {
            const double s = x[p];
            const double* arow = a.data() + p * n;
#pragma omp simd
            for (std::size_t j = j0; j < j1; ++j) y[j] += s * arow[j];
        }
    }
    return y;
}

double dot(std::span<const double> x, std::span<const double> y) noexcept {
    // Four independent partial sums: fixed order, so the result does not
    // depend on how callers are scheduled.
    double s0 = 0, s1 = 0, s2 = 0, s3 = 0;
    const std::size_t n = std::min(x.size(), y.size());
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        s0 += x[i] * y[i];
        s1 += x[i + 1] * y[i + 1];
        s2 += x[i + 2] * y[i + 2];
        s3 += x[i + 3] * y[i + 3];
    }
    for (; i < n; ++i) s0 += x[i] * y[i];
    return (s0 + s1) + (s2 + s3);
}

double norm2(std::span<const double> x) noexcept {
    double scale = 0.0;
    for (double v : x) scale = std::max(scale, std::abs(v));
    if (scale == 0.0) return 0.0;
    double s = 0.0;
    for (double v : x) {
        const double t = v / scale;
        s += t * t;
    }
    return scale * std::sqrt(s);
}

namespace reference {

DenseMatrix multiply(const DenseMatrix& a, const DenseMatrix& b) {
    if (a.cols() != b.rows()) throw DimensionError("reference::multiply: inner dimension mismatch");
    DenseMatrix c(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < b.cols(); ++j) {
            double s = 0.0;
            for (std::size_t p = 0; p < a.cols(); ++p) s += a(i, p) * b(p, j);
            c(i, j) = s;
        }
    return c;
}

DenseMatrix multiply_tn(const DenseMatrix& a, const DenseMatrix& b) {
    if (a.rows() != b.rows()) throw DimensionError("reference::multiply_tn: inner dimension mismatch");
    DenseMatrix c(a.cols(), b.cols());
    for (std::size_t i = 0; i < a.cols(); ++i)
        for (std::size_t j = 0; j < b.cols(); ++j) {
            double s = 0.0;
            for (std::size_t p = 0; p < a.rows(); ++p) s += a(p, i) * b(p, j);
            c(i, j) = s;
        }
    return c;
}

DenseMatrix multiply_nt(const DenseMatrix& a, const DenseMatrix& b) {
    if (a.cols() != b.cols()) throw DimensionError("reference::multiply_nt: inner dimension mismatch");
    DenseMatrix c(a.rows(), b.rows());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < b.rows(); ++j) {
            double s = 0.0;
            for (std::size_t p = 0; p < a.cols(); ++p) s += a(i, p) * b(j, p);
            c(i, j) = s;
        }
    return c;
}

} // namespace reference
} // namespace hokalman
