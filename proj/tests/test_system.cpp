#include <cmath>
#include <random>

#include "doctest.h"
#include "floquet/io.hpp"
#include "floquet/system.hpp"
#include "test_util.hpp"

using namespace floquet;

namespace {

OrbitEnclosure load_orbit(const std::string& name) { return orbit_from_json(read_file(testutil::fixture(name))); }

Eigen::MatrixXd lorenz_grad(const Eigen::Vector3d& u, double sigma, double rho, double beta) {
    Eigen::MatrixXd J(3, 3);
    J << -sigma, sigma, 0, rho - u(2), -1, -u(0), u(1), u(0), -beta;
    return J;
}

Eigen::MatrixXd fd_jacobian(const VectorFieldSpec& f, const Eigen::VectorXd& u) {
    const double h = 1e-6;
    Eigen::MatrixXd J(u.size(), u.size());
    for (Eigen::Index j = 0; j < u.size(); ++j) {
        Eigen::VectorXd a = u, b = u;
        a(j) += h;
        b(j) -= h;
        J.col(j) = (f.eval(a) - f.eval(b)) / (2 * h);
    }
    return J;
}

}  // namespace

TEST_CASE("Lorenz Jacobian mean matches the closed form") {
    OrbitEnclosure o = orbit_from_json(read_file(testutil::fixture("seeds/lorenz_sol4_seed.json")));
    MatrixFourierSeq A = jacobian_coeffs(o);
    const Eigen::Vector3d x0(-7.521252250993276, -7.521252250993276, 22.399077327399255);
    for (int c = 0; c < 3; ++c) CHECK(o.xi[0][std::size_t(c)].re.contains(x0(c)));
    Eigen::MatrixXd expect = lorenz_grad(x0, 10.0, 23.8815, 8.0 / 3.0);
    Eigen::MatrixXd got = A.coeffs[0].re.mid();
    CHECK((got - expect).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(A.coeffs[0].im.mag().maxCoeff() == 0.0);
    // Entries of grad g that do not depend on the state carry no oscillation.
    for (std::size_t k = 1; k < A.size(); ++k) {
        Eigen::MatrixXd re = A.coeffs[k].re.mag();
        CHECK(re(0, 0) == 0.0);
        CHECK(re(0, 1) == 0.0);
        CHECK(re(1, 1) == 0.0);
        CHECK(re(2, 2) == 0.0);
    }
}

TEST_CASE("an equilibrium gives a constant Jacobian") {
    const double rho = 28.0, beta = 8.0 / 3.0;
    const double e = std::sqrt(beta * (rho - 1));
    OrbitEnclosure o;
    o.field = VectorFieldSpec::lorenz(Interval(10.0), Interval(rho), Interval(8.0) / Interval(3.0));
    o.tau = Interval(1.0);
    o.M_gamma = 3;
    o.xi.assign(4, std::vector<ComplexInterval>(3));
    o.xi[0] = {ComplexInterval(Interval(e)), ComplexInterval(Interval(e)), ComplexInterval(Interval(rho - 1))};
    o.r_gamma = 0.0;
    MatrixFourierSeq A = jacobian_coeffs(o);
    CHECK(A.coeffs[0].re.contains(lorenz_grad(Eigen::Vector3d(e, e, rho - 1), 10.0, rho, beta)));
    for (std::size_t k = 1; k < A.size(); ++k) {
        CHECK(A.coeffs[k].re.mag().maxCoeff() == 0.0);
        CHECK(A.coeffs[k].im.mag().maxCoeff() == 0.0);
    }
    CHECK(A.tail.C == 0.0);
    CHECK(orbit_residual(o, 64) < 1e-12);
}

TEST_CASE("zeta3 Jacobian agrees with finite differences") {
    VectorFieldSpec f = VectorFieldSpec::zeta3(parse_decimal("3.372"), Interval(2.0));
    std::mt19937_64 g(31);
    for (int t = 0; t < 20; ++t) {
        Eigen::VectorXd u = testutil::random_matrix(g, 3, 1, 5.0);
        CHECK((f.jacobian(u) - fd_jacobian(f, u)).cwiseAbs().maxCoeff() < 1e-6);
        IntervalMatrix J0;
        std::vector<IntervalMatrix> J;
        f.affine_jacobian(J0, J);
        IntervalMatrix S = J0;
        for (std::size_t l = 0; l < J.size(); ++l) S = S + Interval(u(Eigen::Index(l))) * J[l];
        CHECK(S.contains(f.jacobian(u)));
    }
    OrbitEnclosure o = load_orbit("zeta3_alpha3372.json");
    MatrixFourierSeq A = jacobian_coeffs(o);
    // Only the x^2 term oscillates: entry (2,0) = alpha - 2x.
    for (std::size_t k = 2; k < A.size(); k += 2) {
        Eigen::MatrixXd mag = A.coeffs[k].re.mag() + A.coeffs[k].im.mag();
        mag(2, 0) = 0.0;
        CHECK(mag.maxCoeff() == 0.0);
        CHECK(A.coeffs[k].re(2, 0).contains(-2.0 * o.xi[k / 2][0].re.mid()));
    }
}

TEST_CASE("circle field has the exact circle as its orbit") {
    PolyTerm a{0, Interval(-1.0), {0, 1}}, b{1, Interval(1.0), {1, 0}};
    VectorFieldSpec f = VectorFieldSpec::polynomial(2, {a, b});
    Eigen::VectorXd state(2);
    state << 1.0, 0.0;
    OrbitEnclosure o = orbit_candidate_find(f, state, 2 * M_PI, 6, 0.0);
    CHECK(o.tau.mid() == doctest::Approx(2 * M_PI).epsilon(1e-12));
    // x = cos t, y = sin t: xi_1 = (1/2, -i/2), everything else zero.
    CHECK(std::abs(o.xi[1][0].re.mid() - 0.5) < 1e-12);
    CHECK(std::abs(o.xi[1][1].im.mid() + 0.5) < 1e-12);
    CHECK(std::abs(o.xi[1][0].im.mid()) < 1e-12);
    CHECK(std::abs(o.xi[1][1].re.mid()) < 1e-12);
    for (std::size_t k = 0; k < o.xi.size(); ++k) {
        if (k == 1) continue;
        for (const auto& c : o.xi[k]) CHECK(c.abs_upper() < 1e-12);
    }
    CHECK(orbit_residual(o, 256) < 1e-12);
}

TEST_CASE("zeta3 orbit fixture solves the ODE") {
    OrbitEnclosure o = load_orbit("zeta3_alpha3372.json");
    CHECK(orbit_residual(o, 2048) < 1e-9);
    CHECK(o.tau.mid() == doctest::Approx(4.53284072).epsilon(1e-6));
    for (const auto& c : o.xi[0]) CHECK(c.im.mag() == 0.0);
    Eigen::VectorXd a = o.eval_point(0.3), b = o.eval_point(0.3 + o.tau.mid());
    CHECK((a - b).norm() < 1e-12);
}

TEST_CASE("refinement is self-consistent for the first Lorenz orbit") {
    OrbitEnclosure seed = load_orbit("seeds/lorenz_sol1_seed.json");
    CHECK(seed.tau.contains(1.027854840752128));
    CHECK(seed.M_gamma == 15);
    OrbitEnclosure fix = load_orbit("lorenz_sol1.json");
    CHECK(std::abs(fix.tau.mid() - seed.tau.mid()) < 1e-8);
    for (std::size_t k = 0; k <= 15; ++k)
        for (std::size_t c = 0; c < 3; ++c) {
            CHECK(std::abs(fix.xi[k][c].re.mid() - seed.xi[k][c].re.mid()) < 1e-8);
            CHECK(std::abs(fix.xi[k][c].im.mid() - seed.xi[k][c].im.mid()) < 1e-8);
        }
    CHECK(orbit_residual(fix, 2048) < 1e-9);
}

TEST_CASE("Jacobian sequences have vanishing odd modes and enclose grad g on a grid") {
    for (const char* name : {"lorenz_sol1.json", "lorenz_sol4.json", "zeta3_alpha3372.json"}) {
        OrbitEnclosure o = load_orbit(name);
        MatrixFourierSeq A = jacobian_coeffs(o);
        CHECK(A.odd_vanish);
        CHECK(A.half_period.contains(o.tau.mid()));
        for (std::size_t k = 1; k < A.size(); k += 2) {
            CHECK(A.coeffs[k].re.mag().maxCoeff() == 0.0);
            CHECK(A.coeffs[k].im.mag().maxCoeff() == 0.0);
        }
        const double tau = o.tau.mid();
        for (int i = 0; i < 64; ++i) {
            const double t = 2 * tau * i / 64.0;
            Eigen::MatrixXd J = o.field.jacobian(o.eval_point(t));
            REQUIRE(eval_at(A, Interval(t)).contains(J));
            std::vector<Interval> p = orbit_point(o, Interval(t));
            Eigen::VectorXd u = o.eval_point(t);
            for (std::size_t c = 0; c < p.size(); ++c) REQUIRE(p[c].contains(u(Eigen::Index(c))));
        }
    }
}

TEST_CASE("time shift moves the origin") {
    OrbitEnclosure o = load_orbit("lorenz_sol1.json");
    const double t0 = 0.137;
    OrbitEnclosure s = shift_time(o, t0);
    CHECK(s.r_gamma >= o.r_gamma * std::sqrt(2.0));
    for (double t : {0.0, 0.25, 0.9})
        CHECK((s.eval_point(t) - o.eval_point(t + t0)).cwiseAbs().maxCoeff() < 1e-11);
}

TEST_CASE("continuation reaches the target parameter") {
    OrbitEnclosure o = load_orbit("lorenz_sol1.json");
    OrbitEnclosure c = continue_orbit(o, "rho", 18.6315, 6);
    CHECK(c.field.params.at("rho").contains(18.6315));
    CHECK(orbit_residual(c, 1024) < 1e-8);
    OrbitEnclosure fix = load_orbit("lorenz_sol2.json");
    CHECK(std::abs(c.tau.mid() - fix.tau.mid()) < 1e-8);
}

TEST_CASE("orbit files round trip and reject missing fields") {
    const std::string text = read_file(testutil::fixture("lorenz_sol4.json"));
    OrbitEnclosure o = orbit_from_json(text);
    CHECK(orbit_to_json(orbit_from_json(orbit_to_json(o))) == orbit_to_json(o));
    CHECK(o.r_gamma == 1e-6);
    auto j = text;
    const auto pos = j.find("\"r_gamma\"");
    REQUIRE(pos != std::string::npos);
    j.replace(pos, 9, "\"r_gamma_x\"");
    try {
        orbit_from_json(j);
        FAIL("accepted a file without r_gamma");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::MalformedInput);
        CHECK(std::string(e.what()).find("r_gamma") != std::string::npos);
    }
    CHECK_THROWS_AS(field_from_json(R"({"kind":"duffing","params":{}})"), Error);
}
