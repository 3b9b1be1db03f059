#include "hokalman/hankel.hpp"

#include <fstream>
#include <ostream>

#include "hokalman/csv.hpp"
#include "hokalman/error.hpp"
#include "hokalman/kernels.hpp"

namespace hokalman {

MarkovParams::MarkovParams(std::size_t p, std::size_t m, std::vector<DenseMatrix> blocks)
    : p_(p), m_(m), blocks_(std::move(blocks)) {
    if (p == 0 || m == 0) throw DimensionError("MarkovParams: p and m must be positive");
    if (blocks_.empty()) throw DimensionError("MarkovParams: horizon must be positive");
    for (const auto& b : blocks_) {
        if (b.rows() != p || b.cols() != m) throw DimensionError("MarkovParams: every block must be p x m");
        b.require_finite("MarkovParams");
    }
}

MarkovParams MarkovParams::from_flat(const DenseMatrix& flat, std::size_t m) {
    if (m == 0 || flat.cols() % m != 0) throw DimensionError("MarkovParams: width is not a multiple of m");
    std::vector<DenseMatrix> blocks;
    const std::size_t horizon = flat.cols() / m;
    blocks.reserve(horizon);
    for (std::size_t k = 0; k < horizon; ++k) blocks.push_back(flat.block(0, k * m, flat.rows(), m));
    return {flat.rows(), m, std::move(blocks)};
}

DenseMatrix MarkovParams::flat() const {
    DenseMatrix out(p_, m_ * blocks_.size());
    for (std::size_t k = 0; k < blocks_.size(); ++k) out.set_block(0, k * m_, blocks_[k]);
    return out;
}

HankelSplit HankelSplit::for_horizon(std::size_t horizon) {
    if (horizon < 3) throw DimensionError("Hankel split needs a horizon of at least 3");
    const std::size_t t1 = horizon / 2;  // ceil((T - 1) / 2)
    return {t1, horizon - 1 - t1};
}

HankelShape hankel_minus_shape(std::size_t p, std::size_t m, HankelSplit split) {
    return {p * split.t1, m * split.t2};
}

MarkovParams markov_from_ss(const StateSpace& ss, std::size_t horizon) {
    ss.validate();
    if (horizon == 0) throw DimensionError("markov_from_ss: horizon must be positive");
    std::vector<DenseMatrix> blocks;
    blocks.reserve(horizon);
    blocks.push_back(ss.D);
    DenseMatrix ak_b = ss.B;  // A^{k-1} B
    for (std::size_t k = 1; k < horizon; ++k) {
        blocks.push_back(multiply(ss.C, ak_b));
        if (k + 1 < horizon) ak_b = multiply(ss.A, ak_b);
    }
    return {ss.outputs(), ss.inputs(), std::move(blocks)};
}

namespace {

void check_split(const MarkovParams& g, HankelSplit split) {
    if (split.t1 < 1 || split.t2 < 1) throw DimensionError("build_hankel: T1 and T2 must be at least 1");
    if (split.t1 + split.t2 + 1 != g.horizon()) {
        throw DimensionError("build_hankel: T1 + T2 + 1 = " + std::to_string(split.t1 + split.t2 + 1) +
                             " does not match horizon T = " + std::to_string(g.horizon()));
    }
}

// Block (i, j) of the result is G_{i + j + offset}; block_cols block columns.
DenseMatrix assemble(const MarkovParams& g, std::size_t block_rows, std::size_t block_cols, std::size_t offset) {
    const std::size_t p = g.outputs(), m = g.inputs();
    DenseMatrix h(p * block_rows, m * block_cols);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t ii = 0; ii < static_cast<std::ptrdiff_t>(block_rows); ++ii) {
        const auto i = static_cast<std::size_t>(ii);
        for (std::size_t j = 0; j < block_cols; ++j) h.set_block(i * p, j * m, g.block(i + j + offset));
    }
    return h;
}

} // namespace

DenseMatrix build_hankel_minus(const MarkovParams& g, HankelSplit split) {
    check_split(g, split);
    return assemble(g, split.t1, split.t2, 1);
}

DenseMatrix build_hankel_plus(const MarkovParams& g, HankelSplit split) {
    check_split(g, split);
    return assemble(g, split.t1, split.t2, 2);
}

HankelPair build_hankel(const MarkovParams& g, std::size_t t1, std::size_t t2) {
    const HankelSplit split{t1, t2};
    check_split(g, split);
    HankelPair pair;
    pair.t1 = t1;
    pair.t2 = t2;
    pair.H = assemble(g, t1, t2 + 1, 1);
    const std::size_t width = g.inputs() * t2;
    pair.Hminus = pair.H.block(0, 0, pair.H.rows(), width);
    pair.Hplus = pair.H.block(0, g.inputs(), pair.H.rows(), width);
    return pair;
}

void write_markov(std::ostream& out, const MarkovParams& g) {
    out << "# p=" << g.outputs() << " m=" << g.inputs() << " T=" << g.horizon() << '\n';
    write_csv_body(out, g.flat());
}

void write_markov(const std::string& path, const MarkovParams& g) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    write_markov(out, g);
}

MarkovParams read_markov(std::istream& in, const std::string& source) {
    csv::LineReader reader(in, source);
    const auto fields = csv::parse_header(reader.require("Markov header"), reader);
    const std::size_t p = csv::header_count(fields, "p", reader);
    const std::size_t m = csv::header_count(fields, "m", reader);
    const std::size_t horizon = csv::header_count(fields, "T", reader);
    return MarkovParams::from_flat(csv::read_body(reader, p, horizon * m), m);
}

MarkovParams read_markov(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    return read_markov(in, path);
}

} // namespace hokalman
