#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include "hokalman/matrix.hpp"

namespace hokalman {

/// Economy SVD factors A ≈ U · diag(S) · Vᵀ.
///
/// U is m x r and V is n x r with orthonormal columns; S is non-increasing
/// and nonnegative. Sign convention: the largest-magnitude entry of every
/// column of U is nonnegative (V flipped to match).
struct SvdFactors {
    DenseMatrix U;
    std::vector<double> S;
    DenseMatrix V;

    std::size_t rank() const noexcept { return S.size(); }
};

/// Relative cutoff below which singular values (or pivots) count as zero:
/// max(rows, cols) * machine epsilon.
double rank_tolerance(std::size_t rows, std::size_t cols) noexcept;

/// Orthonormal basis for range(A) from Householder QR with column pivoting.
/// Columns whose pivot falls below rank_tolerance * |R(0,0)| are dropped.
/// Throws NumericalError("zero range") for an all-zero input.
DenseMatrix orth(const DenseMatrix& a);

/// Householder QR with column pivoting, kept in compact form.
class PivotedQr {
public:
    explicit PivotedQr(DenseMatrix a);

    /// Numerical rank under rank_tolerance.
    std::size_t rank() const noexcept { return rank_; }
    /// |R(i,i)| in pivot order.
    std::vector<double> pivots() const;
    /// First `ncols` columns of the orthogonal factor (explicit).
    DenseMatrix q(std::size_t ncols) const;
    /// Least-squares solution of A x = b for each column of b. Requires full column rank.
    DenseMatrix solve(const DenseMatrix& b) const;

private:
    DenseMatrix qr_;                // R above the diagonal, reflectors below
    std::vector<double> tau_;
    std::vector<std::size_t> perm_; // column j of A·P is column perm_[j] of A
    std::size_t rank_ = 0;
};

/// Economy SVD (LAPACK dgesdd). Throws ConvergenceError if the divide-and-
/// conquer kernel fails to converge.
SvdFactors svd(const DenseMatrix& a);
/// Same as svd(const&), consuming the input to avoid one full copy.
SvdFactors svd(DenseMatrix&& a);

/// U_r diag(S_r) V_rᵀ: the best rank-r approximation carried by `f`.
DenseMatrix truncate(const SvdFactors& f, std::size_t r);
/// The factors restricted to their leading r triplets.
SvdFactors leading(const SvdFactors& f, std::size_t r);
DenseMatrix reconstruct(const SvdFactors& f);

/// Moore-Penrose pseudoinverse, reciprocating σ > rank_tolerance · σ₁.
DenseMatrix pinv(const DenseMatrix& a);

struct Norms {
    double spectral = 0.0;
    double frobenius = 0.0;
};

/// Spectral norm by power iteration on AᵀA (relative tolerance 1e-10,
/// at most 10 000 iterations) and the Frobenius norm.
Norms norms(const DenseMatrix& a);
double spectral_norm(const DenseMatrix& a);
double frobenius_norm(const DenseMatrix& a) noexcept;

/// max |λ| over the eigenvalues of a square matrix (LAPACK dgeev).
double spectral_radius(const DenseMatrix& a);
std::vector<std::complex<double>> eigenvalues(const DenseMatrix& a);

/// Solves A X = B for square A by LU with partial pivoting.
DenseMatrix solve(const DenseMatrix& a, const DenseMatrix& b);

struct LeastSquares {
    DenseMatrix x;
    std::size_t rank = 0;  ///< numerical rank of A under rank_tolerance
};

/// Minimum-norm least-squares solution of A X = B by complete orthogonal
/// factorization with column pivoting (LAPACK dgelsy).
LeastSquares least_squares(const DenseMatrix& a, const DenseMatrix& b);

/// Largest singular value of a complex matrix stored row-major (LAPACK zgesvd).
double complex_spectral_norm(std::vector<std::complex<double>> a, std::size_t rows, std::size_t cols);
/// Solves the complex n x n system A X = B (row-major, B is n x nrhs) by LU (LAPACK zgesv).
std::vector<std::complex<double>> complex_solve(std::vector<std::complex<double>> a, std::size_t n,
                                                std::vector<std::complex<double>> b, std::size_t nrhs);

namespace reference {

/// One-sided Jacobi SVD (Hestenes). Serial and slow; used to cross-check svd().
SvdFactors jacobi_svd(const DenseMatrix& a, std::size_t max_sweeps = 60);

} // namespace reference

/// Applies the sign convention in place.
void normalize_signs(SvdFactors& f);

} // namespace hokalman
