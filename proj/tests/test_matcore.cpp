#include <doctest.h>

#include <cmath>
#include <sstream>
#include <vector>

#include "hokalman/error.hpp"
#include "hokalman/kernels.hpp"
#include "hokalman/linalg.hpp"
#include "hokalman/matrix.hpp"
#include "hokalman/random.hpp"

using namespace hokalman;

namespace {

DenseMatrix gaussian(std::size_t rows, std::size_t cols, std::uint64_t seed) {
    DenseMatrix a(rows, cols);
    CounterRng(seed, 77).fill_normal(a.entries());
    return a;
}

DenseMatrix diag(std::vector<double> d) { return DenseMatrix::diagonal(d); }

double orthonormality_residual(const DenseMatrix& q) {
    return max_abs_diff(multiply_tn(q, q), DenseMatrix::identity(q.cols()));
}

} // namespace

TEST_CASE("philox4x32-10 known answers") {
    using W = std::array<std::uint32_t, 4>;
    CHECK(philox4x32({0, 0, 0, 0}, {0, 0}) == W{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
    CHECK(philox4x32({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}) ==
          W{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
    CHECK(philox4x32({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}) ==
          W{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("counter rng is a pure function of (seed, stream, index)") {
    const CounterRng a(5, 1), b(5, 1), c(5, 2), d(6, 1);
    std::vector<double> x(101), y(101);
    a.fill_normal(x);
    b.fill_normal(y);
    CHECK(x == y);
    CHECK(a.normal(40) == x[40]);
    CHECK(c.normal(0) != a.normal(0));
    CHECK(d.normal(0) != a.normal(0));
    CHECK(a.substream(3).normal(0) != a.substream(4).normal(0));

    std::vector<double> tail(51);
    a.fill_normal(tail, 50);
    CHECK(tail[0] == x[50]);
    CHECK(tail[50] == x[100]);
}

TEST_CASE("normal draws have unit variance") {
    std::vector<double> x(200000);
    CounterRng(1, 0).fill_normal(x);
    double s = 0.0, s2 = 0.0;
    for (double v : x) {
        s += v;
        s2 += v * v;
    }
    const double n = static_cast<double>(x.size());
    CHECK(std::abs(s / n) < 4.0 / std::sqrt(n));
    CHECK(std::abs(s2 / n - 1.0) < 0.02);

    std::vector<double> u(1000);
    CounterRng(1, 0).fill_uniform(u);
    for (double v : u) {
        CHECK(v >= 0.0);
        CHECK(v < 1.0);
    }
}

TEST_CASE("rng cursor integers stay in range and cover it") {
    RngCursor cur(CounterRng(3, 0));
    std::vector<int> seen(5, 0);
    for (int i = 0; i < 500; ++i) {
        const auto k = cur.integer(-2, 2);
        REQUIRE(k >= -2);
        REQUIRE(k <= 2);
        ++seen[static_cast<std::size_t>(k + 2)];
    }
    for (int c : seen) CHECK(c > 50);
}

TEST_CASE("dense matrix basics") {
    const DenseMatrix a = DenseMatrix::from_rows({{1, 2, 3}, {4, 5, 6}});
    CHECK(a.rows() == 2);
    CHECK(a.cols() == 3);
    CHECK(a(1, 2) == 6);
    CHECK(a.transposed() == DenseMatrix::from_rows({{1, 4}, {2, 5}, {3, 6}}));
    CHECK(a.block(0, 1, 2, 2) == DenseMatrix::from_rows({{2, 3}, {5, 6}}));
    CHECK(hconcat(a, a).cols() == 6);
    CHECK_THROWS_AS(DenseMatrix::from_rows({{1, 2}, {3}}), DimensionError);
    CHECK_THROWS_AS(DenseMatrix(2, 2) += DenseMatrix(2, 3), DimensionError);
    DenseMatrix bad = a;
    bad(0, 0) = std::nan("");
    CHECK_FALSE(bad.all_finite());
    CHECK_THROWS_AS(bad.require_finite("test"), DimensionError);
}

TEST_CASE("matrix csv round trips exactly") {
    const DenseMatrix a = gaussian(4, 3, 1);
    std::stringstream ss;
    write_matrix_csv(ss, a);
    CHECK(read_matrix_csv(ss) == a);
}

TEST_CASE("matrix csv reports the offending line") {
    std::istringstream bad("# rows=2 cols=2\n1,2\n3,x\n");
    try {
        read_matrix_csv(bad, "m.csv");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line() == 3);
        CHECK(std::string(e.what()).find("m.csv:3") != std::string::npos);
    }
    std::istringstream short_body("# rows=3 cols=2\n1,2\n3,4\n");
    CHECK_THROWS_AS(read_matrix_csv(short_body), ParseError);
    std::istringstream wide("# rows=1 cols=2\n1,2,3\n");
    CHECK_THROWS_AS(read_matrix_csv(wide), ParseError);
}

TEST_CASE("parallel kernels agree bitwise with themselves and with the reference") {
    const DenseMatrix a = gaussian(37, 23, 2), b = gaussian(23, 19, 3), c = gaussian(37, 19, 4);
    const DenseMatrix d = gaussian(41, 23, 5);
    CHECK(max_abs_diff(multiply(a, b), reference::multiply(a, b)) < 1e-12);
    CHECK(max_abs_diff(multiply_tn(a, c), reference::multiply_tn(a, c)) < 1e-12);
    CHECK(max_abs_diff(multiply_nt(a, d), reference::multiply_nt(a, d)) < 1e-12);

    const int threads = kernel_threads();
    set_kernel_threads(1);
    const DenseMatrix serial = multiply(a, b);
    set_kernel_threads(4);
    CHECK(multiply(a, b) == serial);
    set_kernel_threads(threads);

    const std::vector<double> x = b.column_copy(0);
    const std::vector<double> y = multiply(a, x);
    const DenseMatrix ab = multiply(a, b);
    for (std::size_t i = 0; i < y.size(); ++i) CHECK(y[i] == doctest::Approx(ab(i, 0)).epsilon(1e-12));
    CHECK_THROWS_AS(multiply(a, a), DimensionError);
}

TEST_CASE("orth examples") {
    const DenseMatrix e = DenseMatrix::identity(3).left_columns(2);
    const DenseMatrix q = orth(e);
    CHECK(q.cols() == 2);
    CHECK(std::abs(q(0, 0)) == doctest::Approx(1.0));
    CHECK(std::abs(q(1, 1)) == doctest::Approx(1.0));
    CHECK(q(2, 0) == 0.0);

    const DenseMatrix v = orth(DenseMatrix::from_rows({{3}, {4}}));
    CHECK(std::abs(v(0, 0)) == doctest::Approx(0.6));
    CHECK(std::abs(v(1, 0)) == doctest::Approx(0.8));
    CHECK(v(0, 0) * v(1, 0) > 0.0);

    const DenseMatrix g = orth(gaussian(100, 10, 6));
    CHECK(g.cols() == 10);
    CHECK(orthonormality_residual(g) <= 1e-10);

    CHECK_THROWS_WITH_AS(orth(DenseMatrix(3, 2)), doctest::Contains("zero range"), NumericalError);
}

TEST_CASE("orth drops dependent columns") {
    DenseMatrix a = gaussian(20, 3, 7);
    DenseMatrix b(20, 5);
    b.set_block(0, 0, a);
    for (std::size_t i = 0; i < 20; ++i) {
        b(i, 3) = a(i, 0) + 2 * a(i, 1);
        b(i, 4) = a(i, 2) - a(i, 1);
    }
    const DenseMatrix q = orth(b);
    CHECK(q.cols() == 3);
    CHECK(max_abs_diff(multiply(q, multiply_tn(q, b)), b) < 1e-12);
}

TEST_CASE("pivoted qr least squares") {
    const DenseMatrix a = gaussian(30, 4, 8);
    const DenseMatrix x = gaussian(4, 2, 9);
    const DenseMatrix b = multiply(a, x);
    const PivotedQr qr(a);
    CHECK(qr.rank() == 4);
    CHECK(max_abs_diff(qr.solve(b), x) < 1e-12);
    const auto piv = qr.pivots();
    for (std::size_t i = 1; i < piv.size(); ++i) CHECK(piv[i] <= piv[i - 1] * (1 + 1e-12));
}

TEST_CASE("svd examples") {
    const SvdFactors f = svd(diag({3, 2, 1}));
    CHECK(f.S == std::vector<double>{3, 2, 1});
    CHECK(max_abs_diff(f.U, DenseMatrix::identity(3)) < 1e-15);
    CHECK(max_abs_diff(f.V, DenseMatrix::identity(3)) < 1e-15);

    const SvdFactors g = svd(DenseMatrix::from_rows({{0, 2}, {1, 0}}));
    CHECK(g.S[0] == doctest::Approx(2.0));
    CHECK(g.S[1] == doctest::Approx(1.0));
}

TEST_CASE("svd reconstructs and follows the sign convention") {
    const DenseMatrix a = gaussian(12, 7, 10);
    const SvdFactors f = svd(a);
    CHECK(f.rank() == 7);
    CHECK(max_abs_diff(reconstruct(f), a) < 1e-12);
    CHECK(orthonormality_residual(f.U) < 1e-12);
    CHECK(orthonormality_residual(f.V) < 1e-12);
    for (std::size_t c = 0; c < f.U.cols(); ++c) {
        double big = 0.0;
        for (std::size_t i = 0; i < f.U.rows(); ++i)
            if (std::abs(f.U(i, c)) > std::abs(big)) big = f.U(i, c);
        CHECK(big > 0.0);
    }
    // Wide input goes through the same path.
    const DenseMatrix w = a.transposed();
    const SvdFactors fw = svd(w);
    for (std::size_t i = 0; i < 7; ++i) CHECK(fw.S[i] == doctest::Approx(f.S[i]).epsilon(1e-13));
}

TEST_CASE("lapack svd matches the jacobi reference") {
    const DenseMatrix a = gaussian(15, 9, 11);
    const SvdFactors f = svd(a), r = reference::jacobi_svd(a);
    REQUIRE(r.S.size() == f.S.size());
    for (std::size_t i = 0; i < f.S.size(); ++i) CHECK(r.S[i] == doctest::Approx(f.S[i]).epsilon(1e-12));
    CHECK(max_abs_diff(f.U, r.U) < 1e-10);
    CHECK(max_abs_diff(f.V, r.V) < 1e-10);
}

TEST_CASE("truncate examples") {
    const SvdFactors f = svd(diag({3, 2, 1}));
    const DenseMatrix t = truncate(f, 1);
    CHECK(max_abs_diff(t, diag({3, 0, 0})) < 1e-15);
    CHECK(spectral_norm(diag({3, 2, 1}) - t) == doctest::Approx(2.0));
    CHECK(max_abs_diff(truncate(f, 3), diag({3, 2, 1})) < 1e-10);

    const DenseMatrix d4 = diag({5, 4, 3, 2});
    CHECK(spectral_norm(d4 - truncate(svd(d4), 2)) == doctest::Approx(3.0));
    CHECK_THROWS_AS(truncate(f, 0), DimensionError);
    CHECK_THROWS_AS(truncate(f, 4), DimensionError);
}

TEST_CASE("truncation error equals the next singular value") {
    const DenseMatrix a = gaussian(20, 14, 12);
    const SvdFactors f = svd(a);
    for (std::size_t r : {1, 5, 13}) {
        CHECK(svd(a - truncate(f, r)).S[0] == doctest::Approx(f.S[r]).epsilon(1e-10));
    }
}

TEST_CASE("pinv examples") {
    CHECK(max_abs_diff(pinv(diag({2, 0})), diag({0.5, 0})) < 1e-15);
    CHECK(max_abs_diff(pinv(DenseMatrix::identity(4)), DenseMatrix::identity(4)) < 1e-15);
    const DenseMatrix a = gaussian(9, 4, 13);
    const DenseMatrix p = pinv(a);
    CHECK(max_abs_diff(multiply(p, a), DenseMatrix::identity(4)) < 1e-12);
    CHECK(max_abs_diff(multiply(multiply(a, p), a), a) < 1e-12);
}

TEST_CASE("norms examples") {
    const Norms n = norms(diag({3, 1}));
    CHECK(n.spectral == doctest::Approx(3.0));
    CHECK(n.frobenius == doctest::Approx(std::sqrt(10.0)));
    const Norms z = norms(DenseMatrix(3, 4));
    CHECK(z.spectral == 0.0);
    CHECK(z.frobenius == 0.0);
    const DenseMatrix a = gaussian(30, 20, 14);
    CHECK(spectral_norm(a) == doctest::Approx(svd(a).S[0]).epsilon(1e-8));
}

TEST_CASE("eigenvalues and solves") {
    const DenseMatrix r = DenseMatrix::from_rows({{0, -1}, {1, 0}});
    const auto ev = eigenvalues(r);
    CHECK(std::abs(ev[0]) == doctest::Approx(1.0));
    CHECK(spectral_radius(DenseMatrix::from_rows({{0.5, 3}, {0, -0.7}})) == doctest::Approx(0.7));
    CHECK_THROWS_AS(eigenvalues(DenseMatrix(2, 3)), DimensionError);

    const DenseMatrix a = gaussian(6, 6, 15), x = gaussian(6, 2, 16);
    CHECK(max_abs_diff(solve(a, multiply(a, x)), x) < 1e-10);

    const LeastSquares ls = least_squares(gaussian(20, 5, 17), gaussian(20, 2, 18));
    CHECK(ls.rank == 5);
    CHECK(ls.x.rows() == 5);
    DenseMatrix dep = gaussian(20, 3, 19);
    DenseMatrix wide(20, 4);
    wide.set_block(0, 0, dep);
    for (std::size_t i = 0; i < 20; ++i) wide(i, 3) = dep(i, 0);
    CHECK(least_squares(wide, gaussian(20, 1, 20)).rank == 3);
}

TEST_CASE("complex kernels") {
    using C = std::complex<double>;
    const std::vector<C> a{C(2, 0), C(0, 0), C(0, 0), C(0, 3)};
    CHECK(complex_spectral_norm(a, 2, 2) == doctest::Approx(3.0));
    const auto x = complex_solve(a, 2, {C(4, 0), C(0, 6)}, 1);
    CHECK(std::abs(x[0] - C(2, 0)) < 1e-15);
    CHECK(std::abs(x[1] - C(2, 0)) < 1e-15);
}
