#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>

#include "hokalman/hankel.hpp"
#include "hokalman/matrix.hpp"
#include "hokalman/state_space.hpp"

namespace hokalman {

/// N rollouts of length T, each started from x_0 = 0.
///
/// Row i·T + t of `inputs` (N·T x m) and `outputs` (N·T x p) holds u_t and
/// y_t of rollout i.
struct RolloutDataset {
    std::size_t rollouts = 0;  ///< N
    std::size_t horizon = 0;   ///< T
    DenseMatrix inputs;
    DenseMatrix outputs;
    double sigma_u = 0.0;
    double sigma_w = 0.0;
    double sigma_v = 0.0;
    std::uint64_t seed = 0;

    std::size_t input_dim() const noexcept { return inputs.cols(); }
    std::size_t output_dim() const noexcept { return outputs.cols(); }
};

struct NoiseLevels {
    double sigma_u = 1.0;
    double sigma_w = 0.0;
    double sigma_v = 0.0;
};

/// Simulates N independent rollouts with u ~ N(0, σ_u² I), w ~ N(0, σ_w² I)
/// and v ~ N(0, σ_v² I). Rollout i draws from its own substream, so the
/// result does not depend on the thread count.
RolloutDataset simulate_rollouts(const StateSpace& ss, std::size_t rollouts, std::size_t horizon,
                                 const NoiseLevels& noise, std::uint64_t seed);

/// One rollout driven by the given inputs (T x m), with process/measurement
/// noise drawn from `seed`. Returns the T x p outputs.
DenseMatrix simulate_with_inputs(const StateSpace& ss, const DenseMatrix& inputs, double sigma_w, double sigma_v,
                                 std::uint64_t seed);

/// Block upper-triangular Toeplitz regressor (m·T x T): block (i, j) = u_{j−i}
/// for i <= j, zero below. `u` is T x m, one input vector per row.
DenseMatrix toeplitz_inputs(const DenseMatrix& u);

/// Least-squares Markov estimate argmin_X ‖Y − X U‖_F over all rollouts,
/// solved by QR with column pivoting on Uᵀ. Throws NumericalError("insufficient
/// excitation") when the regressor is rank deficient.
MarkovParams estimate_markov(const RolloutDataset& data);

/// Random system with A entries in {1..5} and B, C, D entries in {−2..2},
/// then A rescaled to spectral radius 0.9 (power iteration on A).
StateSpace random_system(std::size_t n, std::size_t m, std::size_t p, std::uint64_t seed);

/// Dominant eigenvalue magnitude by power iteration; valid for matrices with
/// a unique dominant real eigenvalue such as entrywise-positive A.
double dominant_eigenvalue_magnitude(const DenseMatrix& a);

// Dataset CSV: `# N=<N> T=<T> m=<m> p=<p>` header, then one row per sample:
// rollout,t,u_1..u_m,y_1..y_p
void write_dataset(std::ostream& out, const RolloutDataset& data);
void write_dataset(const std::string& path, const RolloutDataset& data);
RolloutDataset read_dataset(std::istream& in, const std::string& source = "<stream>");
RolloutDataset read_dataset(const std::string& path);

} // namespace hokalman
