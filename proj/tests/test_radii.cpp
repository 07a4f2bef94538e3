#include <cmath>
#include <complex>

#include "doctest.h"
#include "floquet/io.hpp"
#include "floquet/radii.hpp"
#include "test_util.hpp"

using namespace floquet;
using cd = std::complex<double>;

namespace {

GalerkinProblem problem(const std::string& name, std::size_t m) {
    GalerkinProblem p;
    p.A = load_problem(testutil::fixture(name)).A;
    p.m = m;
    return p;
}

VerifierParams params(std::size_t m, std::size_t M) {
    VerifierParams v;
    v.m = m;
    v.M = M;
    return v;
}

FloquetCandidate solved(const GalerkinProblem& p) { return newton_refine(init_guess(p), p, 1e-14); }

// Synthetic coefficients with every bound zero.
RadiiCoefficients blank(std::size_t n, std::size_t M, double s) {
    RadiiCoefficients c;
    c.n = n;
    c.m = M - 1;
    c.M = M;
    c.s = s;
    const std::size_t B = 2 * n * n;
    c.Y.assign(M, std::vector<double>(B, 0.0));
    c.lin = c.quad = c.Z0 = c.Z1 = c.Z2 = c.Y;
    c.kc.K = 1;
    c.kc.C_Lambda = 1.0;
    return c;
}

double winv(long k, double s) { return std::pow(double(weight(k)), -s); }

}  // namespace

TEST_CASE("zeta and eta") {
    CHECK(zeta(3, 2.0) >= 0.3025);
    CHECK(zeta(3, 2.0) == doctest::Approx(0.3025).epsilon(1e-15));
    for (long M = 1; M <= 50; ++M) {
        // Partial sum to 10^6 plus the integral remainder 1/10^6.
        long double sum = 1e-6L;
        for (long k = 1000000; k > M; --k) sum += 1.0L / ((long double)k * k);
        REQUIRE(zeta(M, 2.0) >= double(sum));
    }
    for (double s : {2.5, 3.0}) {
        long double sum = 0;
        for (long k = 200000; k > 7; --k) sum += std::pow((long double)k, -(long double)s);
        CHECK(zeta(7, s) >= double(sum));
    }
    // High-precision evaluations of the formula (mpmath, 25 digits).
    CHECK(eta(10, 2.0) >= 4.590780552837523046714645);
    CHECK(eta(10, 2.0) == doctest::Approx(4.590780552837523046714645).epsilon(1e-14));
    CHECK(eta(50, 2.5) >= 3.279042805451565327350615);
    CHECK(eta(50, 2.5) == doctest::Approx(3.279042805451565327350615).epsilon(1e-14));
    CHECK_THROWS_AS(eta(2, 2.0), Error);
    CHECK_THROWS_AS(zeta(0, 2.0), Error);
}

TEST_CASE("convolution constant dominates the weighted convolution sums") {
    // sum over l != +-k of (w_k / (w_l w_{k-l}))^s
    for (long M : {5L, 20L, 80L})
        for (double s : {2.0, 2.5}) {
            const double C1 = convolution_constant_C1(M, s);
            for (long k : {M, M + 1, 2 * M + 3, 10 * M}) {
                long double sum = 0;
                for (long l = -100000; l <= 100000; ++l) {
                    if (l == k || l == -k) continue;
                    const long double a = weight(l), b = weight(k - l);
                    sum += std::pow((long double)weight(k) / (a * b), (long double)s);
                }
                REQUIRE(C1 >= double(sum));
            }
        }
}

TEST_CASE("radii polynomial assembly on synthetic data") {
    const std::size_t M = 5;
    const double s = 2.0;
    VerifierParams vp = params(M - 1, M);

    // p_k(r) = -r / (2 w_k^s): every positive r works.
    RadiiCoefficients c = blank(1, M, s);
    for (std::size_t k = 0; k < M; ++k)
        for (auto& v : c.lin[k]) v = 0.5 * winv(long(k), s);
    c.z1_M = 0.5 * winv(long(M), s);
    VerificationReport rep = assemble_and_solve(c, vp);
    CHECK(rep.success);
    CHECK(rep.r_min == 0.0);
    CHECK(rep.r_max == vp.r_cap);
    CHECK(rep.r > 0.0);

    // p_k(r) = (1 - r) / w_k^s: interval (1, cap).
    RadiiCoefficients d = blank(1, M, s);
    for (std::size_t k = 0; k < M; ++k)
        for (auto& v : d.Y[k]) v = winv(long(k), s);
    d.Y_M = winv(long(M), s);
    rep = assemble_and_solve(d, vp);
    CHECK(rep.success);
    CHECK(rep.r_min >= 1.0);
    CHECK(rep.r_min <= 1.0 + 1e-12);
    CHECK(rep.r_max == vp.r_cap);

    // Y too large for the quadratic: empty.
    RadiiCoefficients e = blank(1, M, s);
    for (std::size_t k = 0; k < M; ++k)
        for (auto& v : e.quad[k]) v = 1.0;
    for (auto& v : e.Y[2]) v = 1.0;
    rep = assemble_and_solve(e, vp);
    CHECK_FALSE(rep.success);
    CHECK_FALSE(rep.margins[2].has_interval);
    CHECK(rep.margins[2].value_at_rmin > 0.0);
}

TEST_CASE("negativity interval of a quadratic") {
    double lo, hi;
    // r^2 - 3 r + 2 < 0 on (1, 2).
    REQUIRE(negativity_interval(1.0, -3.0, 2.0, 1e6, lo, hi));
    CHECK(lo >= 1.0);
    CHECK(hi <= 2.0);
    CHECK(lo == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(hi == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(eval_quadratic_up(1.0, -3.0, 2.0, lo) <= 1e-14);
    CHECK_FALSE(negativity_interval(1.0, -1.0, 1.0, 1e6, lo, hi));
    // Linear fallback: 0 r^2 - 2 r + 1.
    REQUIRE(negativity_interval(0.0, -2.0, 1.0, 10.0, lo, hi));
    CHECK(lo >= 0.5);
    CHECK(hi == 10.0);
}

TEST_CASE("bounds for an exact constant solution") {
    GalerkinProblem p = problem("constant_random3.json", 4);
    FloquetCandidate x = solved(p);
    VerifierParams vp = params(4, 8);
    RadiiCoefficients c = radii_coefficients(x, p, vp);
    for (std::size_t k = 0; k < c.M; ++k)
        for (double v : c.Y[k]) CHECK(v < 1e-14);
    CHECK(c.Y_M < 1e-14);
    // Z2_k = 2 n w_k^{-s}.
    for (double v : c.Z2[2]) {
        CHECK(v >= 1.5);
        CHECK(v == doctest::Approx(1.5).epsilon(1e-15));
    }
    CHECK(c.kc.K <= 4);
}

TEST_CASE("zero coefficients give a vanishing Z0") {
    MatrixFourierSeq A(2, Interval(1.0), 1);
    GalerkinProblem p;
    p.A = A;
    p.m = 4;
    FloquetCandidate x(2, 4, Interval(1.0));
    x.R.setZero();
    x.Q1[0].setIdentity();
    RadiiCoefficients c = radii_coefficients(x, p, params(4, 6));
    for (std::size_t k = 0; k < 4; ++k)
        for (double v : c.Z0[k]) CHECK(v < 1e-13);
}

TEST_CASE("verification of exactly solvable problems") {
    {
        GalerkinProblem p = problem("constant_diag.json", 4);
        VerificationReport rep;
        VerifiedFloquetForm f = verify(solved(p), p, params(4, 8), false, &rep);
        CHECK(rep.success);
        CHECK(f.r < 1e-10);
        Eigen::MatrixXd A0(2, 2);
        A0 << -1, 0, 0, -2;
        CHECK(f.R_enclosure().contains(A0));
        CHECK_FALSE(rep.conditional);
    }
    {
        GalerkinProblem p = problem("scalar_cosine.json", 30);
        VerificationReport rep;
        VerifiedFloquetForm f = verify(solved(p), p, params(30, 40), false, &rep);
        CHECK(rep.success);
        CHECK(f.r < 1e-6);
        CHECK(f.R_enclosure()(0, 0).contains(-0.5));
        MatrixFourierSeq Q = f.Q_enclosure();
        for (int j = 0; j <= 7; ++j) {
            const cd c = std::pow(cd(0, -1), j) * testutil::bessel_I_c(j);
            CoeffPair q = Q.at(2 * j);
            CHECK(q.re(0, 0).contains(c.real()));
            CHECK(q.im(0, 0).contains(c.imag()));
            CHECK(Q.at(2 * j + 1).re(0, 0).contains(0.0));
        }
        CHECK(rep.residual < 1e-13);
    }
}

TEST_CASE("first Lorenz orbit needs at most 100 modes for dominance") {
    GalerkinProblem p = problem("lorenz_sol1.json", 100);
    FloquetCandidate x = solved(p);
    KCLambda kc = compute_K_CLambda(x.R, p.A, p.tau(), 100);
    CHECK(kc.K <= 100);
    CHECK(std::isfinite(kc.C_Lambda));
}

TEST_CASE("tail bounds tighten as M and L grow") {
    GalerkinProblem p = problem("lorenz_sol4.json", 20);
    FloquetCandidate x = solved(p);
    RadiiCoefficients prev;
    for (std::size_t M : {30u, 40u, 60u}) {
        RadiiCoefficients c = radii_coefficients(x, p, params(20, M));
        if (prev.M) {
            CHECK(c.Y_M <= prev.Y_M);
            CHECK(c.z1_M <= prev.z1_M);
            CHECK(c.z2_M <= prev.z2_M);
        }
        prev = c;
    }
    VerifierParams a = params(20, 30), b = params(20, 30);
    for (long k = 0; k < 30; ++k) {
        a.l_override[k] = std::max<long>(k, 20) + 5;
        b.l_override[k] = std::max<long>(k, 20) + 50;
    }
    RadiiCoefficients ca = radii_coefficients(x, p, a), cb = radii_coefficients(x, p, b);
    for (std::size_t k = 0; k < 30; ++k) CHECK(cb.h[k] <= ca.h[k]);
}

TEST_CASE("tail residual bound dominates the computed tail residuals") {
    GalerkinProblem p = problem("scalar_cosine.json", 6);
    FloquetCandidate x = solved(p);
    VerifierParams vp = params(6, 7);
    RadiiCoefficients c = radii_coefficients(x, p, vp);
    PointSequence A = PointSequence::from(p.A);
    Eigen::VectorXd f = f_eval_point(x, A, 40);
    double worst = 0.0;
    for (long k = 7; k < 40; ++k) {
        Eigen::MatrixXd L = lambda_k(k, x.R, p.A, p.tau()).mid();
        Eigen::VectorXd fk = f.segment(2 * k, 2);
        worst = std::max(worst, (L.inverse() * fk).cwiseAbs().maxCoeff());
    }
    CHECK(worst > 0.0);
    CHECK(c.Y_M >= worst);
}

TEST_CASE("sampled contraction and reproducible reports") {
    GalerkinProblem p = problem("scalar_cosine.json", 30);
    FloquetCandidate x = solved(p);
    VerifierParams vp = params(30, 40);
    BlockOperator op;
    RadiiCoefficients c = radii_coefficients(x, p, vp, &op);
    VerificationReport rep = assemble_and_solve(c, vp);
    REQUIRE(rep.success);
    const double ratio = sample_contraction(x, p, op, rep.r, vp.s, 100, 7);
    CHECK(ratio < 1.0);
    CHECK(sample_contraction(x, p, op, rep.r, vp.s, 100, 7) == ratio);
    VerificationReport r1, r2;
    verify(x, p, vp, false, &r1);
    verify(x, p, vp, false, &r2);
    CHECK(report_to_json(r1) == report_to_json(r2));
}

TEST_CASE("failure reports name the violating modes") {
    GalerkinProblem p = problem("lorenz_sol4.json", 20);
    FloquetCandidate x = solved(p);
    VerifierParams vp = params(20, 21);
    vp.l_policy = LPolicy::Fixed;
    vp.l_fixed = 1;
    VerificationReport rep;
    CHECK_THROWS_AS(verify(x, p, vp, true, &rep), Error);
    CHECK_FALSE(rep.success);
    bool positive = false;
    for (const Margin& mg : rep.margins) positive = positive || mg.value_at_rmin > 0.0;
    CHECK(positive);
    CHECK_FALSE(rep.message.empty());
    CHECK(report_to_json(rep).find("\"success\": false") != std::string::npos);
}

TEST_CASE("parameter validation") {
    MatrixFourierSeq A(2, Interval(1.0), 1);
    CHECK_THROWS_AS(params(10, 10).validate(A), Error);
    CHECK_THROWS_AS(params(1, 10).validate(A), Error);
    VerifierParams v = params(10, 20);
    v.s = 1.5;
    CHECK_THROWS_AS(v.validate(A), Error);
    A.tail = TailBound{1.0, 2.0};
    v.s = 2.5;
    try {
        v.validate(A);
        FAIL("accepted s above the decay rate");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::DecayTooWeak);
    }
    CHECK(params(10, 20).L(3) == 20 + 3);
}
