#include "floquet/floquet.hpp"

#include <cmath>

#include <unsupported/Eigen/MatrixFunctions>

#include "floquet/log.hpp"
#include "ode.hpp"

namespace floquet {

using cd = std::complex<double>;

FloquetCandidate::FloquetCandidate(std::size_t n_, std::size_t m_, Interval tau_)
    : n(n_), m(m_), tau(tau_), R(Eigen::MatrixXd::Zero(Eigen::Index(n_), Eigen::Index(n_))),
      Q1(m_, Eigen::MatrixXd::Zero(Eigen::Index(n_), Eigen::Index(n_))),
      Q2(m_, Eigen::MatrixXd::Zero(Eigen::Index(n_), Eigen::Index(n_))) {}

namespace {

void put(Eigen::VectorXd& v, std::size_t off, const Eigen::MatrixXd& A) {
    const Eigen::Index n = A.rows();
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) v[Eigen::Index(off) + i * n + j] = A(i, j);
}

void get(const Eigen::VectorXd& v, std::size_t off, Eigen::MatrixXd& A) {
    const Eigen::Index n = A.rows();
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) A(i, j) = v[Eigen::Index(off) + i * n + j];
}

}  // namespace

Eigen::VectorXd FloquetCandidate::to_vector() const {
    Eigen::VectorXd v(static_cast<Eigen::Index>(dim()));
    const std::size_t nn = n * n;
    put(v, 0, R);
    put(v, nn, Q1[0]);
    for (std::size_t k = 1; k < m; ++k) {
        put(v, k * 2 * nn, Q1[k]);
        put(v, k * 2 * nn + nn, Q2[k]);
    }
    return v;
}

void FloquetCandidate::from_vector(const Eigen::VectorXd& v) {
    if (std::size_t(v.size()) != dim()) fail(ErrorCode::DimensionMismatch, "candidate vector has wrong length");
    const std::size_t nn = n * n;
    get(v, 0, R);
    get(v, nn, Q1[0]);
    Q2[0].setZero();
    for (std::size_t k = 1; k < m; ++k) {
        get(v, k * 2 * nn, Q1[k]);
        get(v, k * 2 * nn + nn, Q2[k]);
    }
}

MatrixFourierSeq FloquetCandidate::q_sequence() const {
    MatrixFourierSeq s(n, tau, m);
    for (std::size_t k = 0; k < m; ++k) {
        s.coeffs[k].re = IntervalMatrix::from_point(Q1[k]);
        s.coeffs[k].im = k == 0 ? IntervalMatrix(n, n) : IntervalMatrix::from_point(Q2[k]);
    }
    return s;
}

FloquetCandidate FloquetCandidate::resized(std::size_t m_new) const {
    FloquetCandidate x(n, m_new, tau);
    x.R = R;
    for (std::size_t k = 0; k < std::min(m, m_new); ++k) {
        x.Q1[k] = Q1[k];
        x.Q2[k] = Q2[k];
    }
    return x;
}

void GalerkinProblem::validate() const {
    A.validate();
    if (m < 2) fail(ErrorCode::InvalidArgument, "Galerkin size m must be at least 2");
    if (s < 2) fail(ErrorCode::InvalidArgument, "decay rate s must be at least 2");
    if (A.tail.C > 0 && s > A.tail.s) fail(ErrorCode::DecayTooWeak, "s exceeds the decay of the coefficients");
}

PointSequence PointSequence::from(const MatrixFourierSeq& A) {
    PointSequence p;
    p.n = A.n;
    p.tau = A.half_period.mid();
    for (const auto& c : A.coeffs) {
        Eigen::MatrixXcd z(static_cast<Eigen::Index>(A.n), static_cast<Eigen::Index>(A.n));
        Eigen::MatrixXd re = c.re.mid(), im = c.im.mid();
        z.real() = re;
        z.imag() = im;
        p.c.push_back(z);
    }
    return p;
}

Eigen::MatrixXcd PointSequence::at(long k) const {
    long a = k < 0 ? -k : k;
    if (std::size_t(a) >= c.size()) return Eigen::MatrixXcd::Zero(Eigen::Index(n), Eigen::Index(n));
    return k >= 0 ? c[std::size_t(a)] : Eigen::MatrixXcd(c[std::size_t(a)].conjugate());
}

Eigen::MatrixXd PointSequence::eval(double t) const {
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(Eigen::Index(n), Eigen::Index(n));
    if (c.empty()) return A;
    A = c[0].real();
    const double w = M_PI / tau;
    for (std::size_t k = 1; k < c.size(); ++k) {
        double ck = std::cos(double(k) * w * t), sk = std::sin(double(k) * w * t);
        A += 2.0 * (c[k].real() * ck - c[k].imag() * sk);
    }
    return A;
}

namespace {

// Flattened coefficient of A in scalar type T.
template <class T>
struct CMat {
    std::vector<T> re, im;
};

template <class T>
T to_scalar(const Interval& x);
template <>
double to_scalar<double>(const Interval& x) { return x.mid(); }
template <>
Interval to_scalar<Interval>(const Interval& x) { return x; }

template <class T>
std::vector<CMat<T>> flatten_coeffs(const MatrixFourierSeq& A, long count) {
    std::vector<CMat<T>> out(static_cast<std::size_t>(count));
    const std::size_t nn = A.n * A.n;
    for (long j = 0; j < count; ++j) {
        auto& o = out[std::size_t(j)];
        o.re.assign(nn, T(0.0));
        o.im.assign(nn, T(0.0));
        if (A.structurally_zero(j)) continue;
        CoeffPair c = A.at(j);
        for (std::size_t e = 0; e < nn; ++e) {
            o.re[e] = to_scalar<T>(c.re.data()[e]);
            o.im[e] = to_scalar<T>(c.im.data()[e]);
        }
    }
    return out;
}

// Enumerates the entries of d(f_star, f_0, ..., f_{m-1}) / d(R, Q_0, ..., Q_{m-1}).
template <class T, class Add>
void assemble(const FloquetCandidate& x, const std::vector<CMat<T>>& Aj, const T& omega, Add add) {
    const std::size_t n = x.n, m = x.m, nn = n * n;
    auto coef = [&](long j, bool imag) -> const std::vector<T>& {
        const auto& c = Aj[std::size_t(j < 0 ? -j : j)];
        return imag ? c.im : c.re;
    };
    auto sign_im = [](long j) { return j < 0 ? -1.0 : 1.0; };
    // row block ro, column block co: X (n x n, row-major) multiplying from the left
    auto left = [&](std::size_t ro, std::size_t co, auto X) {
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                for (std::size_t p = 0; p < n; ++p) add(ro + i * n + j, co + p * n + j, X(i, p));
    };
    auto right_R = [&](std::size_t ro, std::size_t co) {
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                for (std::size_t q = 0; q < n; ++q) add(ro + i * n + j, co + i * n + q, T(x.R(Eigen::Index(q), Eigen::Index(j))));
    };
    auto diag = [&](std::size_t ro, std::size_t co, const T& c) {
        for (std::size_t e = 0; e < nn; ++e) add(ro + e, co + e, c);
    };
    auto pointm = [&](const Eigen::MatrixXd& Q) {
        return [&Q](std::size_t i, std::size_t p) { return T(Q(Eigen::Index(i), Eigen::Index(p))); };
    };

    // f_star
    diag(0, nn, T(1.0));
    for (std::size_t l = 1; l < m; ++l) diag(0, 2 * nn * l, T(2.0));
    // f_0
    left(nn, 0, pointm(x.Q1[0]));
    right_R(nn, nn);
    left(nn, nn, [&](std::size_t i, std::size_t p) { return -coef(0, false)[i * n + p]; });
    for (std::size_t l = 1; l < m; ++l) {
        const auto& P = coef(long(l), false);
        const auto& S = coef(long(l), true);
        left(nn, 2 * nn * l, [&](std::size_t i, std::size_t p) { return T(-2.0) * P[i * n + p]; });
        left(nn, 2 * nn * l + nn, [&](std::size_t i, std::size_t p) { return T(-2.0) * S[i * n + p]; });
    }
    // f_k, k >= 1
    for (std::size_t k = 1; k < m; ++k) {
        const std::size_t r1 = 2 * nn * k, r2 = r1 + nn;
        left(r1, 0, pointm(x.Q1[k]));
        left(r2, 0, pointm(x.Q2[k]));
        {
            const auto& P = coef(long(k), false);
            const auto& S = coef(long(k), true);
            left(r1, nn, [&](std::size_t i, std::size_t p) { return -P[i * n + p]; });
            left(r2, nn, [&](std::size_t i, std::size_t p) { return -S[i * n + p]; });
        }
        for (std::size_t l = 1; l < m; ++l) {
            const long j1 = long(k) - long(l), j2 = long(k) + long(l);
            const auto& P1 = coef(j1, false);
            const auto& S1v = coef(j1, true);
            const double s1 = sign_im(j1);
            const auto& P2 = coef(j2, false);
            const auto& S2 = coef(j2, true);
            const std::size_t c1 = 2 * nn * l, c2 = c1 + nn;
            left(r1, c1, [&](std::size_t i, std::size_t p) { return -(P1[i * n + p] + P2[i * n + p]); });
            left(r1, c2, [&](std::size_t i, std::size_t p) { return -(S2[i * n + p] - T(s1) * S1v[i * n + p]); });
            left(r2, c1, [&](std::size_t i, std::size_t p) { return -(T(s1) * S1v[i * n + p] + S2[i * n + p]); });
            left(r2, c2, [&](std::size_t i, std::size_t p) { return -(P1[i * n + p] - P2[i * n + p]); });
            if (l == k) {
                right_R(r1, c1);
                right_R(r2, c2);
                diag(r1, c2, -(T(double(k)) * omega));
                diag(r2, c1, T(double(k)) * omega);
            }
        }
    }
}

}  // namespace

Eigen::MatrixXd jacobian_assemble(const FloquetCandidate& x, const GalerkinProblem& prob) {
    const Eigen::Index d = Eigen::Index(x.dim());
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(d, d);
    auto Aj = flatten_coeffs<double>(prob.A, long(2 * x.m));
    const double omega = M_PI / prob.tau().mid();
    assemble<double>(x, Aj, omega, [&](std::size_t r, std::size_t c, double v) { J(Eigen::Index(r), Eigen::Index(c)) += v; });
    return J;
}

MidRad jacobian_enclosure(const FloquetCandidate& x, const GalerkinProblem& prob) {
    const std::size_t d = x.dim();
    std::vector<Interval> buf(d * d, Interval(0.0));
    auto Aj = flatten_coeffs<Interval>(prob.A, long(2 * x.m));
    const Interval omega = pi() / prob.tau();
    assemble<Interval>(x, Aj, omega, [&](std::size_t r, std::size_t c, const Interval& v) { buf[r * d + c] += v; });
    MidRad out{Eigen::MatrixXd(Eigen::Index(d), Eigen::Index(d)), Eigen::MatrixXd(Eigen::Index(d), Eigen::Index(d))};
    for (std::size_t r = 0; r < d; ++r)
        for (std::size_t c = 0; c < d; ++c) {
            const Interval& v = buf[r * d + c];
            out.mid(Eigen::Index(r), Eigen::Index(c)) = v.mid();
            out.rad(Eigen::Index(r), Eigen::Index(c)) = v.rad();
        }
    return out;
}

IntervalVector f_eval(const FloquetCandidate& x, const GalerkinProblem& prob, std::size_t k_max) {
    const std::size_t n = x.n, nn = n * n, m = x.m;
    if (prob.A.n != n) fail(ErrorCode::DimensionMismatch, "candidate and coefficients differ in size");
    const Interval omega = pi() / prob.tau();
    const long jmax = long(k_max + m);
    std::vector<CoeffPair> Aj(std::size_t(jmax + 1));
    std::vector<char> zero(std::size_t(jmax + 1));
    for (long j = 0; j <= jmax; ++j) {
        zero[std::size_t(j)] = prob.A.structurally_zero(j);
        if (!zero[std::size_t(j)]) Aj[std::size_t(j)] = prob.A.at(j);
    }
    IntervalVector out(2 * nn * k_max, Interval(0.0));

    parallel_for(k_max, [&](std::size_t k) {
        // (A.Q)_k = sum_l A_{k-l} Q_l
        std::vector<Interval> cre(nn, Interval(0.0)), cim(nn, Interval(0.0));
        for (long l = -long(m) + 1; l <= long(m) - 1; ++l) {
            long j = long(k) - l;
            long ja = j < 0 ? -j : j;
            if (zero[std::size_t(ja)]) continue;
            const CoeffPair& A = Aj[std::size_t(ja)];
            const double sa = j < 0 ? -1.0 : 1.0;
            std::size_t la = std::size_t(l < 0 ? -l : l);
            const Eigen::MatrixXd& X = x.Q1[la];
            const Eigen::MatrixXd& Y = x.Q2[la];
            const double sy = l < 0 ? -1.0 : 1.0;
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t c = 0; c < n; ++c) {
                    Interval re(0.0), im(0.0);
                    for (std::size_t p = 0; p < n; ++p) {
                        const Interval P = A.re(i, p);
                        const Interval S = sa * A.im(i, p);
                        const double xv = X(Eigen::Index(p), Eigen::Index(c));
                        const double yv = sy * Y(Eigen::Index(p), Eigen::Index(c));
                        re += P * xv - S * yv;
                        im += P * yv + S * xv;
                    }
                    cre[i * n + c] += re;
                    cim[i * n + c] += im;
                }
        }
        const std::size_t o = 2 * nn * k;
        if (k == 0) {
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t c = 0; c < n; ++c) {
                    Interval fs = Interval(x.Q1[0](Eigen::Index(i), Eigen::Index(c))) - Interval(i == c ? 1.0 : 0.0);
                    for (std::size_t l = 1; l < m; ++l) fs += Interval(2.0) * Interval(x.Q1[l](Eigen::Index(i), Eigen::Index(c)));
                    Interval qr(0.0);
                    for (std::size_t p = 0; p < n; ++p)
                        qr += Interval(x.Q1[0](Eigen::Index(i), Eigen::Index(p))) * x.R(Eigen::Index(p), Eigen::Index(c));
                    out[o + i * n + c] = fs;
                    out[o + nn + i * n + c] = qr - cre[i * n + c];
                }
            return;
        }
        const bool has_q = k < m;
        const Interval kw = Interval(double(k)) * omega;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t c = 0; c < n; ++c) {
                Interval f1 = -cre[i * n + c], f2 = -cim[i * n + c];
                if (has_q) {
                    Interval q1r(0.0), q2r(0.0);
                    for (std::size_t p = 0; p < n; ++p) {
                        q1r += Interval(x.Q1[k](Eigen::Index(i), Eigen::Index(p))) * x.R(Eigen::Index(p), Eigen::Index(c));
                        q2r += Interval(x.Q2[k](Eigen::Index(i), Eigen::Index(p))) * x.R(Eigen::Index(p), Eigen::Index(c));
                    }
                    f1 += q1r - kw * x.Q2[k](Eigen::Index(i), Eigen::Index(c));
                    f2 += q2r + kw * x.Q1[k](Eigen::Index(i), Eigen::Index(c));
                }
                out[o + i * n + c] = f1;
                out[o + nn + i * n + c] = f2;
            }
    });
    return out;
}

Eigen::VectorXd f_eval_point(const FloquetCandidate& x, const PointSequence& A, std::size_t k_max) {
    const std::size_t n = x.n, nn = n * n, m = x.m;
    const double omega = M_PI / A.tau;
    std::vector<Eigen::MatrixXcd> Q(m);
    for (std::size_t l = 0; l < m; ++l) {
        Q[l] = Eigen::MatrixXcd(Eigen::Index(n), Eigen::Index(n));
        Q[l].real() = x.Q1[l];
        Q[l].imag() = x.Q2[l];
    }
    Eigen::VectorXd out = Eigen::VectorXd::Zero(Eigen::Index(2 * nn * k_max));
    for (std::size_t k = 0; k < k_max; ++k) {
        Eigen::MatrixXcd c = Eigen::MatrixXcd::Zero(Eigen::Index(n), Eigen::Index(n));
        for (long l = -long(m) + 1; l <= long(m) - 1; ++l) {
            long j = long(k) - l;
            if (std::size_t(j < 0 ? -j : j) >= A.c.size()) continue;
            const Eigen::MatrixXcd& Ql = Q[std::size_t(l < 0 ? -l : l)];
            if (l >= 0)
                c.noalias() += A.at(j) * Ql;
            else
                c.noalias() += A.at(j) * Ql.conjugate();
        }
        const std::size_t o = 2 * nn * k;
        Eigen::MatrixXd f1, f2;
        if (k == 0) {
            f1 = x.Q1[0] - Eigen::MatrixXd::Identity(Eigen::Index(n), Eigen::Index(n));
            for (std::size_t l = 1; l < m; ++l) f1 += 2.0 * x.Q1[l];
            f2 = x.Q1[0] * x.R - c.real();
        } else if (k < m) {
            const double kw = double(k) * omega;
            f1 = -kw * x.Q2[k] + x.Q1[k] * x.R - c.real();
            f2 = kw * x.Q1[k] + x.Q2[k] * x.R - c.imag();
        } else {
            f1 = -c.real();
            f2 = -c.imag();
        }
        put(out, o, f1);
        put(out, o + nn, f2);
    }
    return out;
}

FloquetCandidate newton_refine(const FloquetCandidate& x0, const GalerkinProblem& prob, double tol, int max_iter,
                               NewtonReport* report) {
    prob.validate();
    if (x0.m != prob.m) fail(ErrorCode::DimensionMismatch, "candidate size differs from the problem size");
    PointSequence A = PointSequence::from(prob.A);
    FloquetCandidate x = x0;
    x.tau = prob.tau();
    double res = f_eval_point(x, A, x.m).lpNorm<Eigen::Infinity>();
    int it = 0;
    for (; res > tol && it < max_iter; ++it) {
        Eigen::MatrixXd J = jacobian_assemble(x, prob);
        Eigen::PartialPivLU<Eigen::MatrixXd> lu(J);
        if (!(lu.rcond() > 1e-15)) fail(ErrorCode::SingularJacobian, "Jacobian is numerically singular");
        Eigen::VectorXd F = f_eval_point(x, A, x.m);
        Eigen::VectorXd dx = lu.solve(-F);
        x.from_vector(x.to_vector() + dx);
        double rn = f_eval_point(x, A, x.m).lpNorm<Eigen::Infinity>();
        log_debug("newton iter " + std::to_string(it) + " residual " + std::to_string(rn));
        if (!std::isfinite(rn)) fail(ErrorCode::NoConvergence, "Newton iteration diverged");
        if (rn >= res && rn > tol) {
            res = rn;
            ++it;
            break;
        }
        res = rn;
    }
    // Polish down to the rounding floor; a step is kept only if it helps.
    for (int extra = 0; res <= tol && res > 0.0 && extra < 2 && it < max_iter; ++extra) {
        Eigen::MatrixXd J = jacobian_assemble(x, prob);
        Eigen::PartialPivLU<Eigen::MatrixXd> lu(J);
        if (!(lu.rcond() > 1e-15)) break;
        FloquetCandidate y = x;
        y.from_vector(x.to_vector() + lu.solve(-f_eval_point(x, A, x.m)));
        const double rn = f_eval_point(y, A, y.m).lpNorm<Eigen::Infinity>();
        if (!(rn < 0.5 * res)) break;
        x = std::move(y);
        res = rn;
        ++it;
    }
    if (report) *report = NewtonReport{it, res};
    if (!(res <= tol))
        fail(ErrorCode::NoConvergence, "Newton residual " + std::to_string(res) + " above tolerance after " +
                                           std::to_string(it) + " iterations");
    return x;
}

FloquetCandidate init_guess(const GalerkinProblem& prob, const InitGuessOptions& opt) {
    prob.validate();
    const std::size_t n = prob.A.n, nn = n * n;
    PointSequence A = PointSequence::from(prob.A);
    const double tau = A.tau;
    bool tau_periodic = prob.A.odd_vanish;
    if (!tau_periodic) {
        tau_periodic = true;
        for (std::size_t k = 1; k < A.c.size(); k += 2)
            if (A.c[k].norm() != 0) tau_periodic = false;
    }
    auto rhs = [&](const detail::State& y, detail::State& dy, double t) {
        Eigen::MatrixXd At = A.eval(t);
        Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> Y(y.data(), Eigen::Index(n), Eigen::Index(n));
        dy.resize(nn);
        Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> D(dy.data(), Eigen::Index(n), Eigen::Index(n));
        D = At * Y;
    };
    detail::State y0(nn, 0.0);
    for (std::size_t i = 0; i < n; ++i) y0[i * n + i] = 1.0;
    const double T = tau_periodic ? tau : 2.0 * tau;
    auto ys = detail::integrate_samples(rhs, y0, {0.0, T}, opt.ode_tol);
    Eigen::MatrixXd Phi(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) Phi(Eigen::Index(i), Eigen::Index(j)) = ys.back()[i * n + j];
    // Squaring the one-period map keeps the strongly contracting directions accurate.
    Eigen::MatrixXd Phi2 = tau_periodic ? Eigen::MatrixXd(Phi * Phi) : Phi;

    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(Phi2.cast<cd>());
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
        cd lam = es.eigenvalues()[i];
        if (std::abs(lam) == 0.0) fail(ErrorCode::LogBranchFailure, "singular monodromy");
        if (lam.real() < 0 && std::fabs(lam.imag()) <= opt.branch_tol * std::abs(lam))
            fail(ErrorCode::LogBranchFailure, "monodromy eigenvalue on the negative real axis");
    }
    // With the one-period spectrum in the right half plane, log(Phi^2) = 2 log(Phi)
    // and the latter avoids resolving the squared tiny multipliers.
    bool right_half = tau_periodic;
    if (tau_periodic) {
        Eigen::ComplexEigenSolver<Eigen::MatrixXcd> e1(Phi.cast<cd>());
        for (Eigen::Index i = 0; i < e1.eigenvalues().size(); ++i)
            if (!(e1.eigenvalues()[i].real() > 0)) right_half = false;
    }
    Eigen::MatrixXcd L = right_half ? Eigen::MatrixXcd(2.0 * Phi.cast<cd>().log()) : Eigen::MatrixXcd(Phi2.cast<cd>().log());
    FloquetCandidate x(n, prob.m, prob.tau());
    x.R = L.real() / (2.0 * tau);

    // With R fixed the map is affine in Q; solve the Galerkin system for Q in
    // the least-squares sense.
    Eigen::MatrixXd J = jacobian_assemble(x, prob);
    Eigen::VectorXd F = f_eval_point(x, A, x.m);
    const Eigen::Index d = Eigen::Index(x.dim());
    Eigen::MatrixXd JQ = J.rightCols(d - Eigen::Index(nn));
    Eigen::VectorXd q = JQ.householderQr().solve(-F);
    Eigen::VectorXd v = x.to_vector();
    v.tail(d - Eigen::Index(nn)) = q;
    x.from_vector(v);
    log_info("initial guess residual " + std::to_string(f_eval_point(x, A, x.m).lpNorm<Eigen::Infinity>()));
    return x;
}

IntervalMatrix lambda_k(long k, const Eigen::MatrixXd& R, const MatrixFourierSeq& A, const Interval& tau) {
    if (k < 1) fail(ErrorCode::InvalidArgument, "lambda_k needs k >= 1");
    const std::size_t n = A.n, nn = n * n;
    IntervalMatrix L(2 * nn, 2 * nn);
    const Interval kw = Interval(double(k)) * (pi() / tau);
    CoeffPair A0 = A.at(0);
    CoeffPair A2 = A.structurally_zero(2 * k) ? CoeffPair{IntervalMatrix(n, n), IntervalMatrix(n, n)} : A.at(2 * k);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            const std::size_t r = i * n + j;
            for (std::size_t q = 0; q < n; ++q) {
                Interval rq(R(Eigen::Index(q), Eigen::Index(j)));
                L(r, i * n + q) += rq;
                L(nn + r, nn + i * n + q) += rq;
            }
            for (std::size_t p = 0; p < n; ++p) {
                const std::size_t c = p * n + j;
                L(r, c) -= A0.re(i, p) + A2.re(i, p);
                L(r, nn + c) -= A2.im(i, p);
                L(nn + r, c) -= A2.im(i, p);
                L(nn + r, nn + c) -= A0.re(i, p) - A2.re(i, p);
            }
            L(r, nn + r) -= kw;
            L(nn + r, r) += kw;
        }
    return L;
}

IntervalMatrix lambda_k_inverse(const IntervalMatrix& L, double* norm_bound) {
    const std::size_t d = L.rows();
    Eigen::MatrixXd B = L.mid().fullPivLu().inverse();
    if (!B.allFinite()) fail(ErrorCode::NotCertifiablyInvertible, "midpoint matrix is singular");
    IntervalMatrix Bi = IntervalMatrix::from_point(B);
    IntervalMatrix E = IntervalMatrix::identity(d) - Bi * L;
    double e = rowsum_norm(E);
    if (!(e < 1.0)) fail(ErrorCode::NotCertifiablyInvertible, "Neumann defect not below 1");
    // L^{-1} = sum_i E^i B, with the terms i >= 2 bounded in norm.
    double nb = rowsum_norm(Bi);
    double one_minus = rnd::sub_down(1.0, e);
    double tail = rnd::div_up(rnd::mul_up(rnd::mul_up(e, e), nb), one_minus);
    IntervalMatrix inv = Bi + E * Bi;
    for (auto& v : inv.data()) v += Interval(-tail, tail);
    if (norm_bound) *norm_bound = std::min(rnd::div_up(nb, one_minus), rowsum_norm(inv));
    return inv;
}

BlockOperator build_block_operator(const FloquetCandidate& x, const GalerkinProblem& prob, std::size_t M) {
    BlockOperator op;
    op.n = x.n;
    op.m = x.m;
    op.M = M;
    op.Df_mid = jacobian_assemble(x, prob);
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(op.Df_mid);
    op.A_m = lu.inverse();
    if (!op.A_m.allFinite()) fail(ErrorCode::SingularJacobian, "Jacobian of the truncated map is singular");
    const std::size_t cnt = M > x.m ? M - x.m : 0;
    op.lambda.resize(cnt);
    op.lambda_inv.resize(cnt);
    parallel_for(cnt, [&](std::size_t i) {
        long k = long(x.m + i);
        op.lambda[i] = lambda_k(k, x.R, prob.A, prob.tau());
        op.lambda_inv[i] = lambda_k_inverse(op.lambda[i]);
    });
    return op;
}

Eigen::VectorXd apply_A(const BlockOperator& op, const Eigen::VectorXd& x) {
    const Eigen::Index b = Eigen::Index(2 * op.n * op.n), head = b * Eigen::Index(op.m);
    if (x.size() != b * Eigen::Index(op.M)) fail(ErrorCode::DimensionMismatch, "vector length differs from 2n^2 M");
    Eigen::VectorXd y(x.size());
    y.head(head) = op.A_m * x.head(head);
    for (std::size_t i = 0; i < op.lambda_inv.size(); ++i)
        y.segment(head + Eigen::Index(i) * b, b) = op.lambda_inv[i].mid() * x.segment(head + Eigen::Index(i) * b, b);
    return y;
}

Eigen::VectorXd apply_Adag(const BlockOperator& op, const Eigen::VectorXd& x) {
    const Eigen::Index b = Eigen::Index(2 * op.n * op.n), head = b * Eigen::Index(op.m);
    if (x.size() != b * Eigen::Index(op.M)) fail(ErrorCode::DimensionMismatch, "vector length differs from 2n^2 M");
    Eigen::VectorXd y(x.size());
    y.head(head) = op.Df_mid * x.head(head);
    for (std::size_t i = 0; i < op.lambda.size(); ++i)
        y.segment(head + Eigen::Index(i) * b, b) = op.lambda[i].mid() * x.segment(head + Eigen::Index(i) * b, b);
    return y;
}

double normal_form_defect(const FloquetCandidate& x, const GalerkinProblem& prob, int grid) {
    PointSequence A = PointSequence::from(prob.A);
    const double tau = A.tau, w = M_PI / tau;
    double worst = 0.0;
    for (int g = 0; g < grid; ++g) {
        double t = 2.0 * tau * double(g) / double(grid);
        Eigen::MatrixXd Q = x.Q1[0], dQ = Eigen::MatrixXd::Zero(x.R.rows(), x.R.cols());
        for (std::size_t k = 1; k < x.m; ++k) {
            double kw = double(k) * w, c = std::cos(kw * t), s = std::sin(kw * t);
            Q += 2.0 * (x.Q1[k] * c - x.Q2[k] * s);
            dQ += 2.0 * kw * (-x.Q1[k] * s - x.Q2[k] * c);
        }
        worst = std::max(worst, (dQ - A.eval(t) * Q + Q * x.R).lpNorm<Eigen::Infinity>());
    }
    return worst;
}

}  // namespace floquet
