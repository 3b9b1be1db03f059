#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "hokalman/matrix.hpp"
#include "hokalman/state_space.hpp"

namespace hokalman {

/// Impulse-response blocks G_0 = D, G_k = C A^{k-1} B, each p x m.
class MarkovParams {
public:
    MarkovParams() = default;
    MarkovParams(std::size_t p, std::size_t m, std::vector<DenseMatrix> blocks);

    /// Splits the flattened p x (T·m) matrix [G_0 G_1 ... G_{T-1}].
    static MarkovParams from_flat(const DenseMatrix& flat, std::size_t m);

    std::size_t outputs() const noexcept { return p_; }
    std::size_t inputs() const noexcept { return m_; }
    std::size_t horizon() const noexcept { return blocks_.size(); }

    const DenseMatrix& block(std::size_t k) const { return blocks_.at(k); }
    const std::vector<DenseMatrix>& blocks() const noexcept { return blocks_; }

    DenseMatrix flat() const;

private:
    std::size_t p_ = 0;
    std::size_t m_ = 0;
    std::vector<DenseMatrix> blocks_;
};

/// Block geometry of the Hankel matrix: T1 block rows, T2 + 1 block columns,
/// with T1 + T2 + 1 = T.
struct HankelSplit {
    std::size_t t1 = 0;
    std::size_t t2 = 0;

    /// T1 = ceil((T − 1) / 2), T2 = T − 1 − T1.
    static HankelSplit for_horizon(std::size_t horizon);
};

/// Shape of H⁻ (and H⁺): p·T1 x m·T2.
struct HankelShape {
    std::size_t rows = 0;
    std::size_t cols = 0;
};
HankelShape hankel_minus_shape(std::size_t p, std::size_t m, HankelSplit split);

/// H and its two shifted sub-matrices.
///
/// Block (i, j) of H (0-based) is G_{i+j+1}. H⁻ drops the last block column
/// of H and H⁺ drops the first; both are p·T1 x m·T2.
struct HankelPair {
    std::size_t t1 = 0;
    std::size_t t2 = 0;
    DenseMatrix H;
    DenseMatrix Hminus;
    DenseMatrix Hplus;
};

/// Markov parameters of `ss` up to horizon T, by iterating B, AB, A²B, ...
MarkovParams markov_from_ss(const StateSpace& ss, std::size_t horizon);

/// Assembles H, H⁻, H⁺. Requires T1 + T2 + 1 = T and T1, T2 >= 1.
HankelPair build_hankel(const MarkovParams& g, std::size_t t1, std::size_t t2);

/// H⁻ alone (p·T1 x m·T2); avoids materializing H and H⁺ for large problems.
DenseMatrix build_hankel_minus(const MarkovParams& g, HankelSplit split);
/// H⁺ alone.
DenseMatrix build_hankel_plus(const MarkovParams& g, HankelSplit split);

// Markov CSV: `# p=<p> m=<m> T=<T>` header, then the flattened p x (T·m) body.
void write_markov(std::ostream& out, const MarkovParams& g);
void write_markov(const std::string& path, const MarkovParams& g);
MarkovParams read_markov(std::istream& in, const std::string& source = "<stream>");
MarkovParams read_markov(const std::string& path);

} // namespace hokalman
