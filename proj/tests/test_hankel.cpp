#include <doctest.h>

#include <sstream>

#include "hokalman/error.hpp"
#include "hokalman/hankel.hpp"
#include "hokalman/kernels.hpp"
#include "hokalman/linalg.hpp"
#include "hokalman/state_space.hpp"
#include "hokalman/sysid.hpp"

using namespace hokalman;

namespace {

StateSpace scalar_system() {
    return {DenseMatrix::from_rows({{0.5}}), DenseMatrix::from_rows({{1}}), DenseMatrix::from_rows({{1}}),
            DenseMatrix::from_rows({{0}})};
}

MarkovParams scalar_markov() {
    return MarkovParams(1, 1, {DenseMatrix::from_rows({{0}}), DenseMatrix::from_rows({{1}}),
                               DenseMatrix::from_rows({{0.5}})});
}

} // namespace

TEST_CASE("markov parameters of a scalar chain") {
    const MarkovParams g = markov_from_ss(scalar_system(), 3);
    REQUIRE(g.horizon() == 3);
    CHECK(g.block(0)(0, 0) == 0.0);
    CHECK(g.block(1)(0, 0) == 1.0);
    CHECK(g.block(2)(0, 0) == 0.5);
}

TEST_CASE("markov parameters follow D, CB, CAB, ...") {
    const StateSpace ss = random_system(3, 2, 4, 1);
    const MarkovParams g = markov_from_ss(ss, 5);
    CHECK(g.outputs() == 4);
    CHECK(g.inputs() == 2);
    CHECK(g.block(0) == ss.D);
    CHECK(max_abs_diff(g.block(3), multiply(ss.C, multiply(ss.A, multiply(ss.A, ss.B)))) < 1e-14);
    const DenseMatrix flat = g.flat();
    CHECK(flat.rows() == 4);
    CHECK(flat.cols() == 10);
    const MarkovParams back = MarkovParams::from_flat(flat, 2);
    for (std::size_t k = 0; k < 5; ++k) CHECK(back.block(k) == g.block(k));

    StateSpace bad = ss;
    bad.B = DenseMatrix(2, 2);
    CHECK_THROWS_AS(markov_from_ss(bad, 5), DimensionError);
    CHECK_THROWS_AS(MarkovParams::from_flat(flat, 3), DimensionError);
}

TEST_CASE("scalar hankel matrices") {
    const HankelPair h = build_hankel(scalar_markov(), 1, 1);
    CHECK(h.H == DenseMatrix::from_rows({{1, 0.5}}));
    CHECK(h.Hminus == DenseMatrix::from_rows({{1}}));
    CHECK(h.Hplus == DenseMatrix::from_rows({{0.5}}));
    CHECK_THROWS_AS(build_hankel(scalar_markov(), 1, 2), DimensionError);
    CHECK_THROWS_AS(build_hankel(scalar_markov(), 2, 0), DimensionError);
}

TEST_CASE("default split and example geometry") {
    const HankelSplit s = HankelSplit::for_horizon(90);
    CHECK(s.t1 == 45);
    CHECK(s.t2 == 44);
    const HankelShape shape = hankel_minus_shape(10, 20, s);
    CHECK(shape.rows == 450);
    CHECK(shape.cols == 880);
    const HankelShape s3 = hankel_minus_shape(40, 50, HankelSplit::for_horizon(360));
    CHECK(s3.rows == 7200);
    CHECK(s3.cols == 8950);
    const HankelShape s4 = hankel_minus_shape(50, 80, HankelSplit::for_horizon(500));
    CHECK(s4.rows == 12500);
    CHECK(s4.cols == 19920);
    CHECK(HankelSplit::for_horizon(3).t1 == 1);
    CHECK(HankelSplit::for_horizon(3).t2 == 1);
    CHECK_THROWS_AS(HankelSplit::for_horizon(2), DimensionError);

    const MarkovParams g = markov_from_ss(random_system(4, 20, 10, 2), 90);
    const DenseMatrix hm = build_hankel_minus(g, s);
    CHECK(hm.rows() == 450);
    CHECK(hm.cols() == 880);
}

TEST_CASE("hankel block structure and shift") {
    const MarkovParams g = markov_from_ss(random_system(3, 2, 3, 3), 12);
    const HankelPair h = build_hankel(g, 5, 6);
    const std::size_t p = 3, m = 2;
    CHECK(h.H.rows() == p * 5);
    CHECK(h.H.cols() == m * 7);
    for (std::size_t i = 0; i < 5; ++i)
        for (std::size_t j = 0; j < 7; ++j) CHECK(h.H.block(i * p, j * m, p, m) == g.block(i + j + 1));
    for (std::size_t i = 0; i < 5; ++i)
        for (std::size_t j = 0; j + 1 < 6; ++j) {
            CHECK(h.Hplus.block(i * p, j * m, p, m) == h.Hminus.block(i * p, (j + 1) * m, p, m));
        }
    for (std::size_t i = 0; i + 1 < 5; ++i)
        for (std::size_t j = 0; j < 6; ++j) {
            CHECK(h.Hplus.block(i * p, j * m, p, m) == h.H.block((i + 1) * p, j * m, p, m));
        }
    const HankelSplit split{5, 6};
    CHECK(build_hankel_minus(g, split) == h.Hminus);
    CHECK(build_hankel_plus(g, split) == h.Hplus);
}

TEST_CASE("noise-free hankel has rank n") {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const std::size_t n = 2 + seed;
        const MarkovParams g = markov_from_ss(random_system(n, 2, 2, seed), 2 * n + 3);
        const SvdFactors f = svd(build_hankel_minus(g, HankelSplit::for_horizon(2 * n + 3)));
        const double cutoff = 1e-9 * f.S[0];
        std::size_t rank = 0;
        for (double s : f.S) rank += s > cutoff ? 1 : 0;
        CHECK(rank == n);
    }
}

TEST_CASE("markov csv round trip and errors") {
    const MarkovParams g = markov_from_ss(random_system(3, 2, 2, 4), 6);
    std::stringstream ss;
    write_markov(ss, g);
    CHECK(ss.str().rfind("# p=2 m=2 T=6\n", 0) == 0);
    const MarkovParams back = read_markov(ss);
    for (std::size_t k = 0; k < 6; ++k) CHECK(back.block(k) == g.block(k));

    std::istringstream bad_header("# p=2 m=2\n1,2\n");
    CHECK_THROWS_AS(read_markov(bad_header), ParseError);
    std::istringstream bad_value("# p=1 m=1 T=2\n1,abc\n");
    try {
        read_markov(bad_value, "g.csv");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line() == 2);
    }
}
