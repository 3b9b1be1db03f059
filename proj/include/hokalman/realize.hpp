#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hokalman/hankel.hpp"
#include "hokalman/linalg.hpp"
#include "hokalman/rsvd.hpp"
#include "hokalman/state_space.hpp"

namespace hokalman {

enum class RealizationMode { deterministic, stochastic };

std::string to_string(RealizationMode mode);

/// Output of the Ho-Kalman algorithm.
///
/// The rank-n approximant of H⁻ is L = O · Q, where O = U Σ^{1/2} and
/// Q = Σ^{1/2} Vᵀ; it is rebuilt on demand by approximant().
struct RealizationResult {
    StateSpace ss;
    DenseMatrix O;               ///< p·T1 x n observability factor
    DenseMatrix Q;               ///< n x m·T2 controllability factor
    std::vector<double> sigma;   ///< the n singular values behind O and Q
    std::vector<double> spectrum; ///< every singular value of H⁻ the factorization produced
    RealizationMode mode = RealizationMode::deterministic;
    HankelSplit split;
    std::size_t samples = 0;     ///< test-matrix columns drawn (stochastic mode)
    double factor_seconds = 0.0; ///< wall time of the SVD / RSVD call
    double total_seconds = 0.0;  ///< wall time of the whole realization

    DenseMatrix approximant() const;
    /// Smallest retained singular value, σ_min(L).
    double sigma_min() const { return sigma.back(); }
};

struct HoKalmanOptions {
    std::size_t order = 0;                 ///< n
    HankelSplit split;                     ///< T1, T2
    RealizationMode mode = RealizationMode::deterministic;
    std::optional<RsvdConfig> rsvd;        ///< required for stochastic mode; its rank is forced to n and k + l capped at min(p T1, m T2)
};

/// Ho-Kalman realization from (estimated) Markov parameters.
///
/// Deterministic: full SVD of H⁻ truncated to rank n. Stochastic: randomized
/// SVD of H⁻ with target rank n. Then C = O(1:p, :), B = Q(:, 1:m),
/// A = O† H⁺ Q† with O† = Σ^{-1/2} Uᵀ and Q† = V Σ^{-1/2}, D = G_0.
///
/// Throws NumericalError("order too high ...") when n > min(T1, T2) or when σ_n
/// of the factorization falls below the rank cutoff.
RealizationResult ho_kalman(const MarkovParams& g, const HoKalmanOptions& options);

/// Order estimate from the largest ratio σ_i / σ_{i+1} among nonzero
/// singular values (σ sorted non-increasing). Never applied implicitly.
std::size_t estimate_order(std::span<const double> sigma);

} // namespace hokalman
