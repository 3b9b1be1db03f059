#include "hokalman/state_space.hpp"

#include <fstream>
#include <ostream>

#include "hokalman/csv.hpp"
#include "hokalman/error.hpp"
#include "hokalman/kernels.hpp"
#include "hokalman/linalg.hpp"

namespace hokalman {

void StateSpace::validate() const {
    const std::size_t n = A.rows();
    if (n == 0 || A.cols() != n) throw DimensionError("state space: A must be square and nonempty");
    if (B.rows() != n || B.cols() == 0) throw DimensionError("state space: B must have n rows");
    if (C.cols() != n || C.rows() == 0) throw DimensionError("state space: C must have n columns");
    if (D.rows() != C.rows() || D.cols() != B.cols()) throw DimensionError("state space: D must be p x m");
    A.require_finite("state space A");
    B.require_finite("state space B");
    C.require_finite("state space C");
    D.require_finite("state space D");
}

StateSpace StateSpace::transformed(const DenseMatrix& s) const {
    validate();
    if (s.rows() != order() || s.cols() != order()) throw DimensionError("transformed: S must be n x n");
    const DenseMatrix s_inv = solve(s, DenseMatrix::identity(order()));
    return {multiply(multiply(s, A), s_inv), multiply(s, B), multiply(C, s_inv), D};
}

void write_state_space(std::ostream& out, const StateSpace& ss) {
    const std::pair<const char*, const DenseMatrix*> parts[] = {{"A", &ss.A}, {"B", &ss.B}, {"C", &ss.C}, {"D", &ss.D}};
    for (const auto& [name, m] : parts) {
        out << "# " << name << '\n';
        write_matrix_csv(out, *m);
    }
}

void write_state_space(const std::string& path, const StateSpace& ss) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    write_state_space(out, ss);
}

StateSpace read_state_space(std::istream& in, const std::string& source) {
    csv::LineReader reader(in, source);
    StateSpace ss;
    DenseMatrix* slots[] = {&ss.A, &ss.B, &ss.C, &ss.D};
    const char* names[] = {"# A", "# B", "# C", "# D"};
    for (int s = 0; s < 4; ++s) {
        std::string line = reader.require(names[s]);
        while (line.empty()) line = reader.require(names[s]);
        if (line != names[s]) reader.fail(std::string("expected section '") + names[s] + "'");
        const auto fields = csv::parse_header(reader.require("matrix header"), reader);
        const std::size_t rows = csv::header_count(fields, "rows", reader);
        const std::size_t cols = csv::header_count(fields, "cols", reader);
        *slots[s] = csv::read_body(reader, rows, cols);
    }
    try {
        ss.validate();
    } catch (const DimensionError& e) {
        reader.fail(e.what());
    }
    return ss;
}

StateSpace read_state_space(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    return read_state_space(in, path);
}

} // namespace hokalman
