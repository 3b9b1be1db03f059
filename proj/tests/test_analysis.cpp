#include <doctest.h>

#include <cmath>
#include <vector>

#include "hokalman/analysis.hpp"
#include "hokalman/bench.hpp"
#include "hokalman/error.hpp"
#include "hokalman/kernels.hpp"
#include "hokalman/linalg.hpp"
#include "hokalman/random.hpp"
#include "hokalman/realize.hpp"
#include "hokalman/sysid.hpp"

using namespace hokalman;

namespace {

DenseMatrix gaussian(std::size_t rows, std::size_t cols, std::uint64_t seed) {
    DenseMatrix a(rows, cols);
    CounterRng(seed, 55).fill_normal(a.entries());
    return a;
}

DenseMatrix random_orthogonal(std::size_t n, std::uint64_t seed) { return orth(gaussian(n, n, seed)); }

MarkovParams scalar(double g0, double g1, double g2) {
    return MarkovParams(1, 1, {DenseMatrix(1, 1, g0), DenseMatrix(1, 1, g1), DenseMatrix(1, 1, g2)});
}

BoundInputs example1_inputs(double gnorm) {
    BoundInputs in;
    in.n = 30;
    in.l = 10;
    in.p = 10;
    in.m = 20;
    in.t1 = 45;
    in.t2 = 44;
    in.gnorm = gnorm;
    return in;
}

RealizationResult realize(const MarkovParams& g, std::size_t n, HankelSplit split, bool stochastic,
                          std::uint64_t seed = 0) {
    HoKalmanOptions o;
    o.order = n;
    o.split = split;
    if (stochastic) {
        o.mode = RealizationMode::stochastic;
        RsvdConfig cfg;
        cfg.seed = seed;
        o.rsvd = cfg;
    }
    return ho_kalman(g, o);
}

} // namespace

TEST_CASE("hankel bounds vanish without perturbation") {
    const MarkovParams g = markov_from_ss(random_system(3, 2, 2, 1), 11);
    const HankelPerturbation r = lemma1_bounds(g, g, HankelSplit::for_horizon(11), 3);
    CHECK(r.gnorm == 0.0);
    CHECK(r.H_bound == 0.0);
    CHECK(r.L_bound == 0.0);
    CHECK(r.H_err == 0.0);
    CHECK(r.Hplus_err == 0.0);
    CHECK(r.Hminus_err == 0.0);
    CHECK(r.L_err < 1e-12);
    CHECK(r.holds());
}

TEST_CASE("scalar hankel perturbation by hand") {
    const double eps = 1e-3;
    const HankelPerturbation r = lemma1_bounds(scalar(0, 1, 0.5), scalar(0, 1 + eps, 0.5), {1, 1}, 1);
    CHECK(r.gnorm == doctest::Approx(eps).epsilon(1e-12));
    CHECK(r.Hminus_err == doctest::Approx(eps).epsilon(1e-12));
    CHECK(r.H_err == doctest::Approx(eps).epsilon(1e-12));
    CHECK(r.H_bound == doctest::Approx(eps).epsilon(1e-12));
    CHECK(r.L_bound == doctest::Approx(2 * eps).epsilon(1e-12));
    CHECK(r.holds());
    CHECK_THROWS_AS(lemma1_bounds(scalar(0, 1, 0.5), scalar(0, 1, 0.5), {1, 1}, 2), DimensionError);
}

TEST_CASE("hankel bounds hold under random perturbations") {
    const MarkovParams g = markov_from_ss(random_system(4, 2, 3, 2), 15);
    for (std::uint64_t t = 0; t < 20; ++t) {
        const HankelPerturbation r = lemma1_bounds(g, perturb_markov(g, 0.05, t), HankelSplit::for_horizon(15), 4);
        CHECK(r.holds());
    }
}

TEST_CASE("stochastic bound constants") {
    const BoundReport r = stochastic_bounds(example1_inputs(1.0));
    CHECK(r.C1 == doctest::Approx(std::sqrt(420.0)).epsilon(1e-15));
    CHECK(r.C2 == doctest::Approx(std::sqrt(44.0)).epsilon(1e-15));
    CHECK(r.avg_bound == doctest::Approx(518.172226838396160020572641019).epsilon(1e-14));
    CHECK(r.dev_bound_el.value() == doctest::Approx(1718.96650087882493286525741496).epsilon(1e-14));
    CHECK(r.dev_bound_ll == doctest::Approx(3800.42547475636857639611507892).epsilon(1e-14));
    CHECK(r.srft_bound == doctest::Approx(178.433081737922224891170969823).epsilon(1e-14));
    CHECK_FALSE(r.srft_applicable);
    CHECK(r.lemma1_H == doctest::Approx(std::sqrt(45.0)).epsilon(1e-15));
    CHECK(r.lemma1_L == doctest::Approx(2 * std::sqrt(44.0)).epsilon(1e-15));
    CHECK_FALSE(r.C3.has_value());
    CHECK_FALSE(r.thm5_A_bound.has_value());

    BoundInputs in = example1_inputs(1.0);
    in.q = 1;
    CHECK(stochastic_bounds(in).avg_bound_power == doctest::Approx(71.4521986521026192071392092898).epsilon(1e-14));
}

TEST_CASE("every bound is zero when G is exact") {
    BoundInputs in = example1_inputs(0.0);
    in.sigma_min_L = 2.0;
    in.hplus_norm = 10.0;
    in.hplus_err = 0.0;
    const BoundReport r = stochastic_bounds(in);
    CHECK(r.lemma1_H == 0.0);
    CHECK(r.lemma1_L == 0.0);
    CHECK(r.avg_bound == 0.0);
    CHECK(r.avg_bound_power == 0.0);
    CHECK(*r.dev_bound_el == 0.0);
    CHECK(r.dev_bound_ll == 0.0);
    CHECK(r.srft_bound == 0.0);
    CHECK(r.thm5_BC_bound == 0.0);
    CHECK(*r.thm5_A_bound == 0.0);
}

TEST_CASE("power bound is non-increasing in q and below the plain bound") {
    BoundInputs in = example1_inputs(0.3);
    const double plain = stochastic_bounds(in).avg_bound;
    double prev = plain;
    for (std::size_t q = 1; q < 8; ++q) {
        in.q = q;
        const BoundReport r = stochastic_bounds(in);
        CHECK(r.avg_bound_power <= prev);
        CHECK(r.avg_bound_power >= 0.0);
        prev = r.avg_bound_power;
    }
}

TEST_CASE("bound preconditions") {
    BoundInputs in = example1_inputs(1.0);
    in.l = 3;
    CHECK_FALSE(stochastic_bounds(in).dev_bound_el.has_value());
    CHECK(stochastic_bounds(in).to_text().find("dev_bound_el=n/a") != std::string::npos);
    in.l = 1;
    CHECK_THROWS_AS(stochastic_bounds(in), DimensionError);
    in.l = 500;
    CHECK_THROWS_AS(stochastic_bounds(in), DimensionError);
    in = example1_inputs(-1.0);
    CHECK_THROWS_AS(stochastic_bounds(in), DimensionError);
    in = example1_inputs(1.0);
    in.n = 0;
    CHECK_THROWS_AS(stochastic_bounds(in), DimensionError);
}

TEST_CASE("bound report text") {
    BoundInputs in = example1_inputs(0.5);
    in.sigma_min_L = 1.5;
    const std::string text = stochastic_bounds(in).to_text();
    CHECK(text.rfind("n=30\nl=10\nq=0\n", 0) == 0);
    CHECK(text.find("C3=") != std::string::npos);
    CHECK(text.find("thm5_A_bound=n/a") != std::string::npos);
    CHECK(text.find("srft_applicable=false") != std::string::npos);
}

TEST_CASE("procrustes alignment") {
    const DenseMatrix x = gaussian(12, 4, 1);
    const DenseMatrix s0 = random_orthogonal(4, 2);
    const DenseMatrix y = multiply_nt(x, s0);
    const DenseMatrix s = align_unitary(x, y);
    CHECK(max_abs_diff(s, s0) < 1e-12);
    CHECK(frobenius_norm(x - multiply(y, s)) < 1e-12);
    CHECK(max_abs_diff(align_unitary(x, x), DenseMatrix::identity(4)) < 1e-12);
    CHECK_THROWS_AS(align_unitary(x, DenseMatrix(12, 4)), NumericalError);
    CHECK_THROWS_AS(align_unitary(x, DenseMatrix(12, 3)), DimensionError);

    const DenseMatrix a = gaussian(10, 3, 3), b = gaussian(10, 3, 4);
    const double best = frobenius_norm(a - multiply(b, align_unitary(a, b)));
    for (std::uint64_t t = 0; t < 100; ++t) {
        CHECK(best <= frobenius_norm(a - multiply(b, random_orthogonal(3, 100 + t))) + 1e-12);
    }
}

TEST_CASE("robustness check on exact data is zero") {
    const MarkovParams g = markov_from_ss(random_system(4, 2, 2, 5), 17);
    const HankelSplit split = HankelSplit::for_horizon(17);
    const RealizationResult truth = realize(g, 4, split, false);
    BoundInputs in;
    in.n = 4;
    in.l = 10;
    in.p = 2;
    in.m = 2;
    in.t1 = split.t1;
    in.t2 = split.t2;
    in.hplus_norm = 1.0;
    const Thm5Check c = thm5_check(truth, realize(g, 4, split, false), stochastic_bounds(in));
    CHECK(c.applicable);
    CHECK(c.C_err < 1e-12);
    CHECK(c.O_err < 1e-12);
    CHECK(c.B_err < 1e-12);
    CHECK(c.Q_err < 1e-12);
    CHECK(c.A_err < 1e-12);
    CHECK(c.pass());
    CHECK_THROWS_AS(thm5_check(truth, truth, stochastic_bounds([&] {
                                   BoundInputs b = in;
                                   b.hplus_norm.reset();
                                   return b;
                               }())),
                    DimensionError);
}

TEST_CASE("robustness check holds for small perturbations and gates large ones") {
    const StateSpace ss = random_system(5, 2, 2, 6);
    const MarkovParams g = markov_from_ss(ss, 21);
    const HankelSplit split = HankelSplit::for_horizon(21);
    const RealizationResult truth = realize(g, 5, split, false);
    const DenseMatrix hplus = build_hankel_plus(g, split);
    BoundInputs in;
    in.n = 5;
    in.l = 10;
    in.p = 2;
    in.m = 2;
    in.t1 = split.t1;
    in.t2 = split.t2;
    in.hplus_norm = spectral_norm(hplus);
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const MarkovParams gh = perturb_markov(g, 1e-6, seed);
        in.gnorm = markov_error(g, gh);
        in.hplus_err = spectral_norm(hplus - build_hankel_plus(gh, split));
        const Thm5Check c = thm5_check(truth, realize(gh, 5, split, true, seed), stochastic_bounds(in));
        CHECK(c.applicable);
        CHECK(c.pass());
    }
    const MarkovParams far = perturb_markov(g, 10.0, 1);
    CHECK_FALSE(thm5_check(truth, realize(far, 5, split, false), stochastic_bounds(in)).applicable);
}

TEST_CASE("L error obeys the triangle sandwich") {
    const MarkovParams g = markov_from_ss(random_system(5, 2, 2, 7), 21);
    const HankelSplit split = HankelSplit::for_horizon(21);
    const DenseMatrix l = realize(g, 5, split, false).approximant();
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const MarkovParams gh = perturb_markov(g, 1e-2, seed);
        const DenseMatrix lt = realize(gh, 5, split, true, seed).approximant();
        const DenseMatrix hm = build_hankel_minus(g, split), hmh = build_hankel_minus(gh, split);
        const double lhs = svd(l - lt).S[0];
        CHECK(lhs <= svd(hm - hmh).S[0] + svd(hmh - lt).S[0] + 1e-12);
    }
}

TEST_CASE("H-infinity error") {
    const StateSpace s{DenseMatrix(1, 1, 0.5), DenseMatrix(1, 1, 1.0), DenseMatrix(1, 1, 1.0), DenseMatrix(1, 1, 0.0)};
    CHECK(hinf_norm(s, 64) == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(hinf_error(s, s) == 0.0);

    const StateSpace ss = random_system(4, 2, 3, 8);
    const DenseMatrix t = DenseMatrix::from_rows({{1, 2, 0, 0}, {0, 1, 0, 0}, {0, 0, 3, 0}, {1, 0, 0, 1}});
    CHECK(hinf_error(ss, ss.transformed(t)) < 1e-12);

    StateSpace est = ss;
    est.A *= 0.98;
    const double e1 = hinf_error(ss, est, 1024), e2 = hinf_error(ss, est, 2048);
    CHECK(e1 > 0.0);
    CHECK(std::abs(e2 - e1) / e1 < 1e-3);
    CHECK(hinf_error(ss.transformed(t), est) == doctest::Approx(e1).epsilon(1e-10));

    StateSpace unstable = s;
    unstable.A(0, 0) = 1.5;
    CHECK_THROWS_AS(hinf_error(s, unstable), NumericalError);
    CHECK_THROWS_AS(hinf_error(s, s, 32), DimensionError);
}

TEST_CASE("summaries") {
    const std::vector<double> v{1, 2, 3, 4};
    const Summary s = summarize(v);
    CHECK(s.mean == 2.5);
    CHECK(s.count == 4);
    CHECK(s.std_error == doctest::Approx(std::sqrt(5.0 / 3.0 / 4.0)));
    CHECK(median(v) == 2.5);
    const std::vector<double> odd{5, 1, 3};
    CHECK(median(odd) == 3.0);
    const std::vector<double> tiny{1e16, 1.0, -1e16};
    CHECK(summarize(tiny).mean == doctest::Approx(1.0 / 3.0));
}
