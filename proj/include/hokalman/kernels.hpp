#pragma once

#include <span>
#include <vector>

#include "hokalman/matrix.hpp"

namespace hokalman {

// OpenMP-parallel products. Work is partitioned over output rows (or output
// column tiles for the transposed-left case) and every output entry is
// accumulated in the same order regardless of the thread count, so results
// are bitwise identical between serial and parallel runs.

/// a * b
DenseMatrix multiply(const DenseMatrix& a, const DenseMatrix& b);
/// aᵀ * b
DenseMatrix multiply_tn(const DenseMatrix& a, const DenseMatrix& b);
/// a * bᵀ
DenseMatrix multiply_nt(const DenseMatrix& a, const DenseMatrix& b);

/// y = a * x
std::vector<double> multiply(const DenseMatrix& a, std::span<const double> x);
/// y = aᵀ * x
std::vector<double> multiply_tn(const DenseMatrix& a, std::span<const double> x);

double dot(std::span<const double> x, std::span<const double> y) noexcept;
double norm2(std::span<const double> x) noexcept;

/// Threads used by the parallel kernels (omp_get_max_threads()).
int kernel_threads() noexcept;
void set_kernel_threads(int n) noexcept;

namespace reference {

// Textbook triple loops, serial. Kept for cross-checking the parallel kernels.
DenseMatrix multiply(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix multiply_tn(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix multiply_nt(const DenseMatrix& a, const DenseMatrix& b);

} // namespace reference

} // namespace hokalman
