#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>

#include "hokalman/matrix.hpp"

namespace hokalman {

/// Discrete-time LTI model x_{t+1} = A x_t + B u_t, y_t = C x_t + D u_t.
struct StateSpace {
    DenseMatrix A;  ///< n x n
    DenseMatrix B;  ///< n x m
    DenseMatrix C;  ///< p x n
    DenseMatrix D;  ///< p x m

    std::size_t order() const noexcept { return A.rows(); }
    std::size_t inputs() const noexcept { return B.cols(); }
    std::size_t outputs() const noexcept { return C.rows(); }

    /// Throws DimensionError on inconsistent shapes or non-finite entries.
    void validate() const;

    /// (S A S⁻¹, S B, C S⁻¹, D) for an invertible S.
    StateSpace transformed(const DenseMatrix& s) const;
};

// Bundle format: four matrix CSV sections, each introduced by a `# A`,
// `# B`, `# C` or `# D` line followed by a `# rows=.. cols=..` header.
void write_state_space(std::ostream& out, const StateSpace& ss);
void write_state_space(const std::string& path, const StateSpace& ss);
StateSpace read_state_space(std::istream& in, const std::string& source = "<stream>");
StateSpace read_state_space(const std::string& path);

} // namespace hokalman
