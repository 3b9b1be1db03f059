#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>

#include "hokalman/hankel.hpp"
#include "hokalman/matrix.hpp"
#include "hokalman/realize.hpp"
#include "hokalman/state_space.hpp"

namespace hokalman {

/// Spectral norm of the flattened difference G − Ĝ (p x m·T).
double markov_error(const MarkovParams& g, const MarkovParams& g_hat);

/// ‖G − Ĝ‖_F / ‖G‖_F over the flattened blocks.
double markov_relative_error(const MarkovParams& g, const MarkovParams& g_hat);

/// Deterministic perturbation bounds and the norms they control.
struct HankelPerturbation {
    double gnorm = 0.0;        ///< ‖G − Ĝ‖
    double H_bound = 0.0;      ///< sqrt(min(T1, T2 + 1)) ‖G − Ĝ‖
    double L_bound = 0.0;      ///< 2 sqrt(min(T1, T2)) ‖G − Ĝ‖
    double H_err = 0.0;        ///< ‖H − Ĥ‖
    double Hplus_err = 0.0;    ///< ‖H⁺ − Ĥ⁺‖
    double Hminus_err = 0.0;   ///< ‖H⁻ − Ĥ⁻‖
    double L_err = 0.0;        ///< ‖L − L̂‖, both rank-n truncations by full SVD

    /// Every measured norm against its bound, including the chain
    /// max(‖H⁺ − Ĥ⁺‖, ‖H⁻ − Ĥ⁻‖) <= ‖H − Ĥ‖ and ‖L − L̂‖ <= 2 ‖H⁻ − Ĥ⁻‖.
    /// `slack` is a relative allowance for rounding in the measured norms.
    bool holds(double slack = 1e-9) const;
};

HankelPerturbation lemma1_bounds(const MarkovParams& g, const MarkovParams& g_hat, HankelSplit split,
                                 std::size_t order);

/// Inputs of the a-priori bound evaluation.
struct BoundInputs {
    std::size_t n = 0;
    std::size_t l = 2;
    std::size_t q = 0;
    std::size_t p = 0;
    std::size_t m = 0;
    std::size_t t1 = 0;
    std::size_t t2 = 0;
    double gnorm = 0.0;                 ///< ‖G − Ĝ‖
    std::optional<double> sigma_min_L;  ///< σ_n of the noise-free Hankel matrix
    std::optional<double> hplus_norm;   ///< ‖H⁺‖
    std::optional<double> hplus_err;    ///< ‖H⁺ − Ĥ⁺‖; the H bound is used when absent
};

/// Evaluated constants and right-hand sides. Absent values are bounds whose
/// preconditions or inputs are missing.
struct BoundReport {
    BoundInputs in;
    double C1 = 0.0;  ///< sqrt(min(p T1, m T2) − n)
    double C2 = 0.0;  ///< sqrt(min(T1, T2))
    std::optional<double> C3;  ///< 14 sqrt(n) / σ_min(L)
    double lemma1_H = 0.0;
    double lemma1_L = 0.0;
    double avg_bound = 0.0;        ///< E‖L − L̃‖, Gaussian test matrix
    double avg_bound_power = 0.0;  ///< same, power scheme with q
    std::optional<double> dev_bound_el;  ///< failure probability 3 e^{−l}; needs l >= 4
    double dev_bound_ll = 0.0;           ///< failure probability 3 l^{−l}
    double srft_bound = 0.0;
    bool srft_applicable = false;  ///< 4[√n + √(8 log(n m T2))]² log n <= l + n <= m T2
    double thm5_BC_bound = 0.0;    ///< sqrt(5 n avg_bound)
    std::optional<double> thm5_A_bound;

    /// Flat `key=value` lines in a fixed order; absent values print as n/a.
    std::string to_text() const;
};

/// Throws DimensionError unless n >= 1, l >= 2, n + l <= min(p T1, m T2)
/// and gnorm >= 0.
BoundReport stochastic_bounds(const BoundInputs& in);

/// Orthogonal S minimizing ‖X − Y S‖_F (Procrustes: S = W Zᵀ where
/// Yᵀ X = W Σ Zᵀ). Throws NumericalError when Yᵀ X vanishes.
DenseMatrix align_unitary(const DenseMatrix& x, const DenseMatrix& y);

/// Per-trial check of the factor and A-matrix robustness inequalities.
struct Thm5Check {
    bool applicable = false;  ///< ‖L − L̃‖ <= σ_min(L) / 2
    double L_err = 0.0;
    double sigma_min = 0.0;
    double C_err = 0.0;  ///< ‖C − C̃ S‖_F
    double O_err = 0.0;  ///< ‖O − Õ S‖_F
    double B_err = 0.0;  ///< ‖B − Sᵀ B̃‖_F
    double Q_err = 0.0;  ///< ‖Q − Sᵀ Q̃‖_F
    double A_err = 0.0;  ///< ‖A − Sᵀ Ã S‖_F
    double factor_bound = 0.0;  ///< sqrt(5 n ‖L − L̃‖)
    double A_bound = 0.0;
    double roundoff = 0.0;  ///< absolute slack: 64 ε times the largest true factor norm
    DenseMatrix S;

    bool factors_hold() const;
    bool a_holds() const;
    bool pass() const { return applicable && factors_hold() && a_holds(); }
};

/// `truth` must come from the exact G and `est` from Ĝ; `report` supplies
/// ‖H⁺‖ and ‖H⁺ − Ĥ⁺‖. Returns applicable = false (and nothing else) when
/// the robustness condition fails.
Thm5Check thm5_check(const RealizationResult& truth, const RealizationResult& est, const BoundReport& report);

/// max_θ σ₁(Ĝ(e^{iθ}) − G(e^{iθ})) / max_θ σ₁(G(e^{iθ})) on `grid_points`
/// uniformly spaced points of the unit circle, G(z) = C (zI − A)⁻¹ B + D.
/// Throws NumericalError unless both systems are Schur stable.
double hinf_error(const StateSpace& truth, const StateSpace& est, std::size_t grid_points = 1024);

/// Largest σ₁(G(e^{iθ})) on the grid; the denominator of hinf_error.
double hinf_norm(const StateSpace& ss, std::size_t grid_points = 1024);

/// Mean with compensated summation and its standard error.
struct Summary {
    double mean = 0.0;
    double std_error = 0.0;
    std::size_t count = 0;
};

Summary summarize(std::span<const double> values);
double median(std::span<const double> values);

} // namespace hokalman
