// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <complex>
#include <cstdio>
#include <functional>
#include <map>
#include <optional>
#include <tuple>
#include <random>
#include <sstream>
#include <string>

#include <Eigen/Dense>

#include "floquet/bundles.hpp"
#include "floquet/eigen_enclosure.hpp"
#include "floquet/io.hpp"
#include "floquet/radii.hpp"
#include "floquet/tail_constants.hpp"
#include "test_util.hpp"

using namespace floquet;
using cd = std::complex<double>;
using Clock = std::chrono::steady_clock;

namespace {

int failures = 0;

void verdict(int id, bool pass, const std::string& detail) {
    std::printf("criterion %d %s: %s\n", id, pass ? "PASS" : "FAIL", detail.c_str());
    std::fflush(stdout);
    if (!pass) ++failures;
}

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* f, ...) __attribute__((format(printf, 1, 2)));
std::string fmt(const char* f, ...) {
    char buf[512];
    va_list ap;
    va_start(ap, f);
    std::vsnprintf(buf, sizeof buf, f, ap);
    va_end(ap);
    return buf;
}

GalerkinProblem galerkin(const MatrixFourierSeq& A, std::size_t m) {
    GalerkinProblem p;
    p.A = A;
    p.m = m;
    return p;
}

VerifierParams vparams(std::size_t m, std::size_t M) {
    VerifierParams v;
    v.m = m;
    v.M = M;
    return v;
}

struct Run {
    GalerkinProblem p;
    FloquetCandidate x;
    VerificationReport rep;
    std::optional<VerifiedFloquetForm> form;
    std::optional<ExponentClassification> cls;
    std::string error;
};

// Newton from the monodromy guess, then verification and classification.
Run run_pipeline(const MatrixFourierSeq& A, const OrbitEnclosure* orbit, std::size_t m, std::size_t M,
                 NewtonReport* nr = nullptr) {
    Run r;
    r.p = galerkin(A, m);
    try {
        r.x = newton_refine(init_guess(r.p), r.p, 1e-13, 30, nr);
        VerifierParams vp = vparams(m, M);
        r.form = orbit ? verify(*orbit, r.x, vp, &r.rep) : verify(r.x, r.p, vp, false, &r.rep);
        if (orbit) {
            IntervalMatrix R = r.form->R_enclosure();
            r.cls = classify(verified_eigenpairs(R), r.p.tau(), default_trivial_tol(R));
        }
    } catch (const Error& e) {
        r.error = e.what();
    }
    return r;
}

std::map<std::string, Run> cache;

// I_n(c) from its power series in long double.
long double bessel_I(int n, long double c) {
    long double term = std::pow(0.5L * c, n), sum = 0;
    for (int j = 1; j <= n; ++j) term /= j;
    for (int j = 0; j < 80; ++j) {
        sum += term;
        term *= (0.25L * c * c) / ((j + 1.0L) * (j + 1.0L + n));
    }
    return sum;
}

int label_index(const ExponentClassification& c, ExponentLabel l) {
    for (std::size_t j = 0; j < c.labels.size(); ++j)
        if (c.labels[j] == l) return int(j);
    return -1;
}

void criterion1() {
    const auto t0 = Clock::now();
    bool ok = true;
    std::string detail;
    for (const char* name : {"constant_diag.json", "constant_random3.json"}) {
        ProblemInput in = load_problem(testutil::fixture(name));
        Run r = run_pipeline(in.A, nullptr, 6, 12);
        if (!r.form) {
            ok = false;
            detail += fmt("%s failed (%s); ", name, r.error.c_str());
            continue;
        }
        const Eigen::MatrixXd A0 = in.A.coeffs[0].re.mid();
        const bool r_ok = r.form->r < 1e-8, R_ok = r.form->R_enclosure().contains(A0);
        bool Q_ok = true;
        const MatrixFourierSeq Q = r.form->Q_enclosure();
        const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(A0.rows(), A0.cols());
        for (int i = 0; i < 20; ++i)
            Q_ok = Q_ok && eval_at(Q, Interval(2.0 * in.A.half_period.mid() * i / 20)).contains(I);
        ok = ok && r_ok && R_ok && Q_ok;
        detail += fmt("%s r=%.3e R contains A0 %s, Q contains I at 20 points %s; ", name, r.form->r, R_ok ? "yes" : "no",
                      Q_ok ? "yes" : "no");
        cache[name] = std::move(r);
    }
    const double t = seconds_since(t0);
    verdict(1, ok && t < 5.0, detail + fmt("%.2f s (limit 5 s)", t));
}

void criterion2() {
    const auto t0 = Clock::now();
    ProblemInput in = load_problem(testutil::fixture("scalar_cosine.json"));
    Run r = run_pipeline(in.A, nullptr, 30, 40);
    const double t = seconds_since(t0);
    if (!r.form) {
        verdict(2, false, "verification failed: " + r.error);
        return;
    }
    const long double c = 1.0L / (2.0L * 3.14159265358979323846264338327950288L);
    bool oracle_ok = true;
    for (int j = 0; j <= 8; ++j)
        oracle_ok = oracle_ok && std::fabs(double(bessel_I(j, c)) - testutil::bessel_I_c(j)) <= 1e-15 * testutil::bessel_I_c(j);
    const MatrixFourierSeq Q = r.form->Q_enclosure();
    bool Q_ok = true;
    for (int j = 0; j <= 15; ++j) {
        const cd e = std::pow(cd(0, -1), j) * double(bessel_I(j, c));
        const CoeffPair q = Q.at(2 * j);
        Q_ok = Q_ok && q.re(0, 0).contains(e.real()) && q.im(0, 0).contains(e.imag());
        if (j < 15) Q_ok = Q_ok && Q.at(2 * j + 1).re(0, 0).contains(0.0) && Q.at(2 * j + 1).im(0, 0).contains(0.0);
    }
    const bool R_ok = r.form->R_enclosure()(0, 0).contains(-0.5);
    cache["scalar_cosine.json"] = r;
    verdict(2, oracle_ok && Q_ok && R_ok && r.form->r < 1e-6 && t < 10.0,
            fmt("r=%.3e (limit 1e-6), R contains -0.5 %s, Bessel coefficients k<=15 enclosed %s, %.2f s (limit 10 s)",
                r.form->r, R_ok ? "yes" : "no", Q_ok && oracle_ok ? "yes" : "no", t));
}

void criteria3and4() {
    const auto t0 = Clock::now();
    ProblemInput in = load_problem(testutil::fixture("lorenz_sol4.json"));
    Run r = run_pipeline(in.A, &*in.orbit, 60, 66);
    const double t = seconds_since(t0);
    const VerificationReport& rep = r.rep;
    if (!r.form || !r.cls) {
        verdict(3, false, "pipeline failed: " + r.error);
    } else {
        const auto& c = *r.cls;
        const int s = label_index(c, ExponentLabel::Stable), u = label_index(c, ExponentLabel::Unstable),
                  z = label_index(c, ExponentLabel::Trivial);
        const double ls = c.lyapunov[std::size_t(s)].mid(), lu = c.lyapunov[std::size_t(u)].mid();
        const bool ex_ok = std::fabs(ls - -13.7210150091049) <= 1e-3 && std::fabs(lu - 0.0543483424385) <= 1e-3;
        const bool triv_ok = c.lyapunov[std::size_t(z)].contains(0.0);
        verdict(3, r.form->r <= 1e-4 && ex_ok && triv_ok && t < 300.0,
                fmt("r=%.3e (limit 1e-4), exponent midpoints %.10f %.10f (match %s), trivial [%.3e, %.3e] contains 0 %s, "
                    "%.1f s",
                    r.form->r, ls, lu, ex_ok ? "yes" : "no", c.lyapunov[std::size_t(z)].lo, c.lyapunov[std::size_t(z)].hi,
                    triv_ok ? "yes" : "no", t));
    }

    const double int_lo = 9.91268997e-7, int_hi = 1.4574858482e-3;
    std::string detail;
    bool ok = false;
    if (!rep.has_interval) {
        detail = "r_interval empty; neither branch held";
    } else {
        const bool factor2 = rep.r_min >= int_lo / 2 && rep.r_min <= 2 * int_lo && rep.r_max >= int_hi / 2 &&
                             rep.r_max <= 2 * int_hi;
        const bool degraded = rep.r_min <= 1e-4 && rep.r_max >= 1e-4;
        ok = factor2 || degraded;
        detail = fmt("r_interval [%.6e, %.6e]; ", rep.r_min, rep.r_max) +
                 (factor2 ? "factor-2 branch held" : degraded ? "degraded branch held" : "neither branch held");
    }
    // Reference run with the hypothesis radius of the published orbit table.
    OrbitEnclosure o = *in.orbit;
    o.r_gamma = 5.368959115576269e-9;
    VerificationReport ref;
    try {
        verify(o, r.x, vparams(60, 66), &ref);
    } catch (const Error&) {
    }
    detail += ref.has_interval ? fmt("; with r_gamma=5.369e-9 the interval is [%.6e, %.6e]", ref.r_min, ref.r_max)
                               : "; with r_gamma=5.369e-9 the interval is empty";
    verdict(4, ok, detail);
    cache["lorenz_sol4.json"] = std::move(r);
}

void criterion5() {
    const auto t0 = Clock::now();
    ProblemInput in = load_problem(testutil::fixture("lorenz_sol1.json"));
    NewtonReport nr;
    Run r = run_pipeline(in.A, &*in.orbit, 100, 180, &nr);
    const double t = seconds_since(t0);
    if (!r.form || !r.cls) {
        verdict(5, false, "pipeline failed: " + r.error);
        return;
    }
    const double dR = (r.x.R - testutil::lorenz_R1()).cwiseAbs().maxCoeff();
    const auto& c = *r.cls;
    const double ls = c.lyapunov[std::size_t(label_index(c, ExponentLabel::Stable))].mid();
    const double lu = c.lyapunov[std::size_t(label_index(c, ExponentLabel::Unstable))].mid();
    const bool ex_ok = std::fabs(ls - -14.2953855130260) <= 1e-3 && std::fabs(lu - 0.6287188463595) <= 1e-3;
    verdict(5, nr.residual < 1e-10 && dR <= 1e-3 && ex_ok && t < 600.0,
            fmt("Newton %d iterations residual %.2e, max |R - published R| = %.2e, r=%.3e, exponents %.10f %.10f, %.1f s",
                nr.iterations, nr.residual, dR, r.form->r, ls, lu, t));
    cache["lorenz_sol1.json"] = std::move(r);
}

void criterion6() {
    const auto t0 = Clock::now();
    VectorFieldSpec field = field_from_json(read_file(testutil::fixture("fields/zeta3_alpha3372.json")));
    Eigen::VectorXd state(3);
    state << 4.65051167, 0.0, -4.20633075;
    OrbitEnclosure orbit;
    try {
        orbit = orbit_candidate_find(field, state, 4.53284072, 16, 1e-6);
    } catch (const Error& e) {
        verdict(6, false, std::string("orbit search failed: ") + e.what());
        return;
    }
    Run r = run_pipeline(jacobian_coeffs(orbit), &orbit, 120, 140);
    const double t = seconds_since(t0);
    if (!r.form || !r.cls) {
        verdict(6, false, "pipeline failed: " + r.error);
        return;
    }
    const auto& c = *r.cls;
    const std::vector<Interval> mult = multipliers(c, r.form->x.tau);
    const Interval d_st(7.037235782193e-3 - 1e-3, 7.037944324307e-3 + 1e-3);
    const Interval d_un(1.526609276443494 - 1e-3, 1.528421395487018 + 1e-3);
    const int s = label_index(c, ExponentLabel::Stable), u = label_index(c, ExponentLabel::Unstable);
    const Interval ms = mult[std::size_t(s)], mu = mult[std::size_t(u)];
    const MultiplierSign ss = multiplier_sign(*r.form, c.pairs[std::size_t(s)]);
    const MultiplierSign su = multiplier_sign(*r.form, c.pairs[std::size_t(u)]);
    const bool ok = orbit.conditional && overlaps(ms, d_st) && overlaps(mu, d_un) && ss.sign == -1 && su.sign == -1 &&
                    std::fabs(ss.ratio - -7.037590044326e-3) <= 1e-3 && std::fabs(su.ratio - -1.527515067244305) <= 1e-3;
    verdict(6, ok && t < 300.0,
            fmt("r=%.3e, |sigma| [%.9e, %.9e] and [%.9f, %.9f], signs %+d %+d, ratios %.9e %.9f, %.1f s", r.form->r,
                ms.lo, ms.hi, mu.lo, mu.hi, ss.sign, su.sign, ss.ratio, su.ratio, t));
    cache["zeta3"] = std::move(r);
}

// ---- property suites

Eigen::MatrixXd exact_random(std::mt19937_64& g, std::size_t n) {
    std::uniform_int_distribution<int> d(-64, 64);
    Eigen::MatrixXd m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = d(g) / 64.0;
    return m;
}

MatrixFourierSeq random_seq(std::mt19937_64& g, std::size_t n, std::size_t modes) {
    MatrixFourierSeq s(n, Interval(1.0), modes);
    const Eigen::MatrixXd Z = Eigen::MatrixXd::Zero(Eigen::Index(n), Eigen::Index(n));
    for (std::size_t k = 0; k < modes; ++k) {
        s.coeffs[k].re = IntervalMatrix::from_point(exact_random(g, n));
        s.coeffs[k].im = IntervalMatrix::from_point(k ? exact_random(g, n) : Z);
    }
    return s;
}

Eigen::MatrixXcd coef(const MatrixFourierSeq& s, long k) {
    const long a = std::labs(k);
    const Eigen::Index n = Eigen::Index(s.n);
    if (a >= long(s.size())) return Eigen::MatrixXcd::Zero(n, n);
    const auto& c = s.coeffs[std::size_t(a)];
    Eigen::MatrixXcd z = c.re.mid().cast<cd>() + cd(0, 1) * c.im.mid().cast<cd>();
    return k < 0 ? Eigen::MatrixXcd(z.conjugate()) : z;
}

std::string property_a() {
    std::mt19937_64 g(701);
    std::uniform_int_distribution<int> dn(1, 3), dm(1, 6), dk(-12, 12);
    for (int t = 0; t < 1000; ++t) {
        const std::size_t n = std::size_t(dn(g));
        MatrixFourierSeq A = random_seq(g, n, std::size_t(dm(g))), Q = random_seq(g, n, std::size_t(dm(g)));
        const long k = dk(g);
        Eigen::MatrixXcd brute = Eigen::MatrixXcd::Zero(Eigen::Index(n), Eigen::Index(n));
        for (long l = -6; l <= 6; ++l) brute += coef(A, k - l) * coef(Q, l);
        CoeffPair c = convolve(A, Q, k, 20);
        if (!c.re.contains(Eigen::MatrixXd(brute.real())) || !c.im.contains(Eigen::MatrixXd(brute.imag())))
            return fmt("instance %d (k=%ld) not enclosed", t, k);
    }
    return "";
}

// Random problem with finitely many decaying coefficients and a nearby candidate.
struct Draw {
    GalerkinProblem p;
    FloquetCandidate x;
    VerifierParams vp;
};

Draw random_problem(std::mt19937_64& g) {
    std::uniform_int_distribution<int> dn(1, 2), dm(10, 20), dM(1, 15), dL(1, 10);
    std::uniform_real_distribution<double> u(-1.0, 1.0), dtau(0.5, 2.0);
    const std::size_t n = std::size_t(dn(g)), N = 40;
    Draw d;
    d.p.A = MatrixFourierSeq(n, Interval(dtau(g)), N);
    d.p.A.tail.C = 0.0;
    d.p.A.tail.s = 3.0;
    for (std::size_t j = 0; j < N; ++j) {
        const double w = std::pow(double(weight(long(j))), -3.0);
        Eigen::MatrixXd re = testutil::random_matrix(g, int(n), int(n), 0.8 * w);
        Eigen::MatrixXd im = j ? testutil::random_matrix(g, int(n), int(n), 0.8 * w) : Eigen::MatrixXd::Zero(Eigen::Index(n), Eigen::Index(n));
        d.p.A.coeffs[j].re = IntervalMatrix::from_point(re);
        d.p.A.coeffs[j].im = IntervalMatrix::from_point(im);
    }
    d.p.m = std::size_t(dm(g));
    d.x = FloquetCandidate(n, d.p.m, d.p.A.half_period);
    d.x.R = testutil::random_matrix(g, int(n), int(n), 0.5);
    d.x.Q1[0] = Eigen::MatrixXd::Identity(Eigen::Index(n), Eigen::Index(n));
    for (std::size_t k = 1; k < d.p.m; ++k) {
        const double w = std::pow(double(k), -2.0);
        d.x.Q1[k] = testutil::random_matrix(g, int(n), int(n), 0.1 * w);
        d.x.Q2[k] = testutil::random_matrix(g, int(n), int(n), 0.1 * w);
    }
    d.vp = vparams(d.p.m, d.p.m + std::size_t(dM(g)));
    for (long k = 0; k < long(d.vp.M); ++k) d.vp.l_override[k] = std::max<long>(k, long(d.p.m)) + dL(g);
    return d;
}

double max_rowabs(const MatrixFourierSeq& A, long j) {
    double r = 0.0;
    for (double v : row_abs(A, j)) r = std::max(r, v);
    return r;
}

std::vector<double> rowabs_or_zero(const MatrixFourierSeq& A, long j) {
    if (std::labs(j) >= long(A.size())) return std::vector<double>(A.n, 0.0);
    return row_abs(A, j);
}

std::string property_b() {
    std::mt19937_64 g(702);
    std::uniform_int_distribution<long> dM(3, 300);
    std::uniform_real_distribution<double> ds(1.2, 4.0), ds2(2.0, 4.0);
    const long T = 100000;
    for (int t = 0; t < 100; ++t) {
        const long M = dM(g);
        const double s = ds(g);
        double brute = 0.0;
        for (long k = M + T; k > M; --k) brute += std::pow(double(k), -s);
        if (!(zeta(M, s) >= brute)) return fmt("zeta(%ld, %.3f) below the partial sum", M, s);
        // C1 bounds sum_{l != +-k} (w_k / (w_l w_{k-l}))^s for k >= M, s >= 2.
        std::uniform_int_distribution<long> dk(M, 4 * M);
        const long k = dk(g);
        const double s2 = ds2(g);
        double conv = 0.0;
        for (long l = -T / 2; l <= T / 2; ++l) {
            if (l == k || l == -k) continue;
            conv += std::pow(double(weight(k)) / (double(weight(l)) * double(weight(k - l))), s2);
        }
        if (!(convolution_constant_C1(M, s2) >= conv)) return fmt("C1(%ld, %.3f) below the sum at k=%ld", M, s2, k);
    }

    std::uniform_int_distribution<int> pick(0, 1 << 20);
    for (int t = 0; t < 100; ++t) {
        Draw d = random_problem(g);
        const MatrixFourierSeq& A = d.p.A;
        RadiiCoefficients c;
        try {
            c = radii_coefficients(d.x, d.p, d.vp);
        } catch (const Error& e) {
            return fmt("draw %d: %s", t, e.what());
        }
        if (!std::isfinite(c.kc.C_Lambda)) return fmt("draw %d: no dominance below m", t);
        const double s = d.vp.s;
        const long M = long(d.vp.M), m = long(d.p.m);
        // h_k: sum over |l| > L_k of |A_{k-l}| w_l^{-s}, 1e5 terms.
        for (int rep = 0; rep < 3; ++rep) {
            const long k = pick(g) % M, L = c.L[std::size_t(k)];
            std::vector<double> row(A.n, 0.0);
            for (long i = 1; i <= T / 2; ++i)
                for (long l : {L + i, -L - i}) {
                    const auto a = rowabs_or_zero(A, k - l);
                    for (std::size_t r = 0; r < A.n; ++r) row[r] += a[r] * std::pow(double(weight(l)), -s);
                }
            const double brute = *std::max_element(row.begin(), row.end());
            if (!(c.h[std::size_t(k)] >= brute)) return fmt("draw %d: h_%ld=%.3e below %.3e", t, k, c.h[std::size_t(k)], brute);
        }
        // Y_M and the tail contraction coefficients: sup over k >= M weighted by (k/M)^s.
        PointSequence P = PointSequence::from(A);
        const long top = m + long(A.size()) + 1;
        Eigen::VectorXd f = f_eval_point(d.x, P, std::size_t(top));
        const Eigen::Index B = Eigen::Index(2 * A.n * A.n);
        double yb = 0.0, z1b = 0.0, z2b = 0.0;
        for (long k = M; k < M + 300; ++k) {
            const Eigen::MatrixXd Li = lambda_k(k, d.x.R, A, A.half_period).mid().inverse();
            const double wk = std::pow(double(k) / double(M), s);
            if (k < top) yb = std::max(yb, wk * (Li * f.segment(B * k, B)).cwiseAbs().maxCoeff());
            const double nrm = Li.cwiseAbs().rowwise().sum().maxCoeff();
            std::vector<double> row(A.n, 0.0);
            for (long j = -long(A.size()) + 1; j < long(A.size()); ++j) {
                const long l = k - j;
                if (l == k || l == -k) continue;
                const auto a = rowabs_or_zero(A, j);
                for (std::size_t r = 0; r < A.n; ++r) row[r] += a[r] * std::pow(double(weight(l)), -s);
            }
            z1b = std::max(z1b, wk * nrm * *std::max_element(row.begin(), row.end()));
            z2b = std::max(z2b, wk * nrm * 2.0 * double(A.n) * std::pow(double(k), -s));
        }
        if (!(c.Y_M >= yb)) return fmt("draw %d: Y_M=%.3e below %.3e", t, c.Y_M, yb);
        if (!(c.z1_M >= z1b)) return fmt("draw %d: linear tail coefficient %.3e below %.3e", t, c.z1_M, z1b);
        if (!(c.z2_M >= z2b)) return fmt("draw %d: quadratic tail coefficient %.3e below %.3e", t, c.z2_M, z2b);
    }
    return "";
}

std::string property_c() {
    std::mt19937_64 g(703);
    // Vector fields at random points: central differences at two step sizes.
    for (const VectorFieldSpec& f : {VectorFieldSpec::lorenz(10.0, 28.0, Interval(8.0) / Interval(3.0)),
                                     VectorFieldSpec::zeta3(3.372, 2.0)}) {
        for (int t = 0; t < 20; ++t) {
            Eigen::VectorXd u = testutil::random_matrix(g, 3, 1, 10.0);
            const Eigen::MatrixXd J = f.jacobian(u);
            for (double h : {1e-3, 5e-4}) {
                Eigen::MatrixXd D(3, 3);
                for (int j = 0; j < 3; ++j) {
                    Eigen::VectorXd e = Eigen::VectorXd::Zero(3);
                    e(j) = h;
                    D.col(j) = (f.eval(u + e) - f.eval(u - e)) / (2 * h);
                }
                const double err = (D - J).cwiseAbs().maxCoeff();
                if (err > 1e-6 * std::max(1.0, J.cwiseAbs().maxCoeff()))
                    return fmt("%s Jacobian off by %.3e at h=%.0e", f.kind_name().c_str(), err, h);
            }
        }
    }
    // Galerkin map of the fourth Lorenz orbit.
    ProblemInput in = load_problem(testutil::fixture("lorenz_sol4.json"));
    GalerkinProblem p = galerkin(in.A, 8);
    FloquetCandidate x = init_guess(p);
    PointSequence P = PointSequence::from(p.A);
    const Eigen::MatrixXd J = jacobian_assemble(x, p);
    const Eigen::VectorXd v0 = x.to_vector();
    double err1 = 0.0, err2 = 0.0;
    for (double h : {1e-4, 5e-5}) {
        double err = 0.0;
        for (Eigen::Index j = 0; j < v0.size(); ++j) {
            FloquetCandidate a = x, b = x;
            Eigen::VectorXd va = v0, vb = v0;
            va(j) += h;
            vb(j) -= h;
            a.from_vector(va);
            b.from_vector(vb);
            Eigen::VectorXd col = (f_eval_point(a, P, p.m) - f_eval_point(b, P, p.m)) / (2 * h);
            err = std::max(err, (col - J.col(j)).cwiseAbs().maxCoeff());
        }
        (h == 1e-4 ? err1 : err2) = err;
    }
    if (err1 > 1e-7 * std::max(1.0, J.cwiseAbs().maxCoeff()))
        return fmt("Galerkin Jacobian off by %.3e", err1);
    // Quadratic map: the central difference is exact up to rounding, which grows as h shrinks.
    if (err2 > 4 * err1 + 1e-8) return fmt("Galerkin difference error grows unexpectedly: %.3e then %.3e", err1, err2);
    return "";
}

FloquetCandidate cached_or_solved(const std::string& name, std::size_t m, GalerkinProblem& p) {
    ProblemInput in = load_problem(testutil::fixture(name));
    auto it = cache.find(name);
    if (it != cache.end() && it->second.p.m == m) {
        p = it->second.p;
        return it->second.x;
    }
    p = galerkin(in.A, m);
    return newton_refine(init_guess(p), p, 1e-13);
}

std::string property_d() {
    const std::vector<std::pair<std::string, std::size_t>> fixtures = {
        {"constant_diag.json", 6},  {"constant_random3.json", 6}, {"scalar_cosine.json", 30},
        {"lorenz_sol1.json", 100},  {"lorenz_sol2.json", 60},     {"lorenz_sol3.json", 80},
        {"lorenz_sol4.json", 60},   {"lorenz_sol5.json", 60},     {"zeta3_alpha3372.json", 120}};
    for (const auto& [name, m] : fixtures) {
        GalerkinProblem p;
        FloquetCandidate x;
        try {
            x = cached_or_solved(name, m, p);
        } catch (const Error& e) {
            return name + ": " + e.what();
        }
        KCLambda kc = compute_K_CLambda(x.R, p.A, p.tau(), m);
        if (!std::isfinite(kc.C_Lambda)) return fmt("%s: K=%ld exceeds m=%zu", name.c_str(), kc.K, m);
        for (long k = long(m); k <= long(m) + 200; ++k) {
            const Eigen::MatrixXd Li = lambda_k(k, x.R, p.A, p.tau()).mid().inverse();
            const double v = double(k) * Li.cwiseAbs().rowwise().sum().maxCoeff();
            if (!(v <= kc.C_Lambda)) return fmt("%s: k|Lambda_k^-1| = %.6e exceeds C_Lambda = %.6e at k=%ld", name.c_str(), v, kc.C_Lambda, k);
        }
    }
    return "";
}

std::string property_e() {
    const std::vector<std::tuple<std::string, std::size_t, std::size_t>> runs = {
        {"constant_random3.json", 6, 12}, {"scalar_cosine.json", 30, 40}, {"lorenz_sol4.json", 60, 66}};
    for (const auto& [name, m, M] : runs) {
        GalerkinProblem p;
        FloquetCandidate x = cached_or_solved(name, m, p);
        VerifierParams vp = vparams(m, M);
        ProblemInput in = load_problem(testutil::fixture(name));
        if (in.orbit) p.A = jacobian_coeffs(*in.orbit);
        BlockOperator op;
        RadiiCoefficients c = radii_coefficients(x, p, vp, &op);
        VerificationReport rep = assemble_and_solve(c, vp);
        if (!rep.success) return name + ": verification failed";
        const double ratio = sample_contraction(x, p, op, rep.r, vp.s, 100, 7);
        if (!(ratio < 1.0)) return fmt("%s: sampled ratio %.4f", name.c_str(), ratio);
    }
    return "";
}

Eigen::MatrixXd sample_in(const IntervalMatrix& R, std::mt19937_64& g, bool corner) {
    Eigen::MatrixXd S(Eigen::Index(R.rows()), Eigen::Index(R.cols()));
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (std::size_t i = 0; i < R.rows(); ++i)
        for (std::size_t j = 0; j < R.cols(); ++j) {
            const Interval& e = R(i, j);
            S(Eigen::Index(i), Eigen::Index(j)) = corner ? (u(g) < 0.5 ? e.lo : e.hi) : e.lo + u(g) * (e.hi - e.lo);
        }
    return S;
}

std::string property_f() {
    std::mt19937_64 g(706);
    for (const char* name : {"lorenz_sol4.json", "lorenz_sol1.json", "zeta3"}) {
        auto it = cache.find(name);
        if (it == cache.end() || !it->second.form) return std::string(name) + ": no verified form";
        const IntervalMatrix R = it->second.form->R_enclosure();
        const auto pairs = verified_eigenpairs(R);
        for (int t = 0; t < 100; ++t) {
            Eigen::EigenSolver<Eigen::MatrixXd> es(sample_in(R, g, t < 50));
            for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
                const cd z = es.eigenvalues()[i];
                int hits = 0;
                for (const auto& p : pairs) hits += p.mu.contains(z.real(), z.imag());
                if (hits != 1) return fmt("%s: eigenvalue %.6f%+.6fi in %d enclosures", name, z.real(), z.imag(), hits);
            }
        }
    }
    return "";
}

void criterion7() {
    const auto t0 = Clock::now();
    bool ok = true;
    std::string detail;
    const std::pair<const char*, std::function<std::string()>> parts[] = {
        {"a", property_a}, {"b", property_b}, {"c", property_c},
        {"d", property_d}, {"e", property_e}, {"f", property_f}};
    for (const auto& [tag, fn] : parts) {
        std::string err;
        try {
            err = fn();
        } catch (const std::exception& e) {
            err = e.what();
        }
        ok = ok && err.empty();
        detail += std::string("(") + tag + ") " + (err.empty() ? "ok" : err) + "; ";
    }
    verdict(7, ok, detail + fmt("%.1f s", seconds_since(t0)));
}

}  // namespace

int main() {
    criterion1();
    criterion2();
    criteria3and4();
    criterion5();
    criterion6();
    criterion7();
    std::printf("%d of 7 criteria passed\n", 7 - failures);
    return failures ? 1 : 0;
}
