#pragma once

#include <cstddef>
#include <cstdint>
#include <string>

#include "hokalman/linalg.hpp"
#include "hokalman/matrix.hpp"

namespace hokalman {

enum class TestMatrixKind { gaussian, srft };

std::string to_string(TestMatrixKind kind);
TestMatrixKind parse_test_matrix_kind(const std::string& name);

/// Parameters of the randomized range finder / randomized SVD.
struct RsvdConfig {
    std::size_t rank = 2;         ///< target rank k
    std::size_t oversampling = 10; ///< l
    std::size_t power = 0;        ///< q: range finder runs on (AAᵀ)^q A
    TestMatrixKind test_matrix = TestMatrixKind::gaussian;
    std::uint64_t seed = 0;
    /// Re-orthonormalize after every half-step of the power scheme.
    bool stabilized = false;
    /// Draw min(k + l, rows, cols) samples instead of rejecting k + l above
    /// min(rows, cols); all of a small matrix's range is then sampled.
    bool cap_samples = false;

    std::size_t samples() const noexcept { return rank + oversampling; }
    std::size_t samples_for(std::size_t rows, std::size_t cols) const noexcept;
    /// Throws DimensionError unless k >= 1, l >= 2 and k + l <= min(rows, cols)
    /// (k <= min(rows, cols) when cap_samples is set).
    void validate(std::size_t rows, std::size_t cols) const;
};

/// Random test matrix with n rows and w sampling columns.
///
/// gaussian: n x w i.i.d. standard normals.
/// srft: the complex n x w matrix sqrt(n/w) D F R, returned as the real
/// n x 2w matrix [Re | Im]. D has unit-modulus diagonal entries at uniform
/// angles, F is the unitary DFT and R picks w distinct coordinates.
DenseMatrix test_matrix(std::size_t n, std::size_t w, TestMatrixKind kind, std::uint64_t seed);

/// Orthonormal basis P ≈ range(A): orth((AAᵀ)^q A Ω), evaluated by
/// alternating products with A and Aᵀ.
DenseMatrix range_finder(const DenseMatrix& a, const RsvdConfig& cfg);

/// Randomized SVD truncated to cfg.rank triplets.
SvdFactors rsvd(const DenseMatrix& a, const RsvdConfig& cfg);

/// Randomized SVD from a precomputed basis: svd(Pᵀ A) lifted by P, truncated to `rank`.
SvdFactors rsvd_from_basis(const DenseMatrix& a, const DenseMatrix& basis, std::size_t rank);

/// Adaptive range finder: adds one Gaussian sample at a time until
/// 10 sqrt(2/π) max_i ‖(I − PPᵀ) A ω_i‖ over the last `probes` samples is
/// at most eps. Throws NumericalError("tolerance unreachable") if the basis
/// fills min(rows, cols) columns first.
DenseMatrix adaptive_range_finder(const DenseMatrix& a, double eps, std::size_t probes, std::uint64_t seed);

/// Expected-error bound for the range finder on (AAᵀ)^q A:
/// [1 + sqrt(k/(l−1)) + e sqrt(k+l)/l · sqrt(min(m,n) − k)]^{1/(2q+1)} σ_{k+1}.
double range_error_bound(std::size_t k, std::size_t l, std::size_t q, std::size_t m, std::size_t n, double sigma_next);

/// Deviation bound for an SRFT test matrix with k + l samples of an n-column
/// input: (1 + sqrt(1 + 7 n / (k + l))) σ_{k+1}.
double srft_error_bound(std::size_t k, std::size_t l, std::size_t n, double sigma_next);

} // namespace hokalman
