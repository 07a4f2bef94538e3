#include "floquet/radii.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "floquet/log.hpp"

namespace floquet {

namespace {

using rnd::add_up;
using rnd::mul_up;

double inf() { return std::numeric_limits<double>::infinity(); }

// Upper bound of (1 - j/M)^{-s}, 0 <= j < M.
double shifted_inv_pow(long j, long M, double s) {
    Interval q = Interval(1.0) - Interval(double(j)) / Interval(double(M));
    return (Interval(1.0) / pow(q, s)).hi;
}

double s_star_of(const MatrixFourierSeq& A, double s) { return A.tail.C > 0 ? A.tail.s : std::max(A.tail.s, s); }

// Highest index covered by stored coefficients of A.
long stored_top(const MatrixFourierSeq& A) { return long(A.size()) - 1; }

// y = |B| x rounded upward; B is a small interval matrix.
std::vector<double> abs_apply(const IntervalMatrix& B, const std::vector<double>& x) {
    std::vector<double> y(B.rows(), 0.0);
    for (std::size_t i = 0; i < B.rows(); ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < B.cols(); ++j) acc = add_up(acc, mul_up(B(i, j).mag(), x[j]));
        y[i] = acc;
    }
    return y;
}

Eigen::VectorXd add_up_vec(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    Eigen::VectorXd c(a.size());
    for (Eigen::Index i = 0; i < a.size(); ++i) c[i] = add_up(a[i], b[i]);
    return c;
}

}  // namespace

long VerifierParams::L(long k) const {
    auto it = l_override.find(k);
    if (it != l_override.end()) return it->second;
    if (l_policy == LPolicy::Fixed) return std::max<long>(k, long(m)) + l_fixed;
    return long(M) + std::max<long>(m_gamma, 0) + k;
}

void VerifierParams::validate(const MatrixFourierSeq& A) const {
    if (!(s >= 2.0)) fail(ErrorCode::InvalidArgument, "s must be at least 2");
    if (A.tail.C > 0 && s > A.tail.s) fail(ErrorCode::DecayTooWeak, "s exceeds the decay rate of A");
    if (m < 2) fail(ErrorCode::InvalidArgument, "m must be at least 2");
    if (M <= m) fail(ErrorCode::InvalidArgument, "M must exceed m");
    if (M < 3) fail(ErrorCode::InvalidArgument, "M must be at least 3");
    if (l_policy == LPolicy::Fixed && l_fixed < 1) fail(ErrorCode::InvalidArgument, "fixed L offset must be positive");
    for (long k = 0; k < long(M); ++k)
        if (L(k) <= std::max<long>(k, long(m)))
            fail(ErrorCode::InvalidArgument, "L_k must exceed max(k, m) (k = " + std::to_string(k) + ")");
}

std::string l_policy_name(const VerifierParams& p) {
    return p.l_policy == LPolicy::Paper ? "paper" : "fixed:" + std::to_string(p.l_fixed);
}

std::string sharp_name(SharpMode m) {
    switch (m) {
        case SharpMode::Auto: return "auto";
        case SharpMode::On: return "on";
        case SharpMode::Off: return "off";
    }
    return "auto";
}

KCLambda compute_K_CLambda(const Eigen::MatrixXd& R, const MatrixFourierSeq& A, const Interval& tau, std::size_t m,
                           long cap) {
    const std::size_t n = A.n;
    double colsum = 0.0;
    for (Eigen::Index j = 0; j < R.cols(); ++j) {
        double c = 0.0;
        for (Eigen::Index q = 0; q < R.rows(); ++q) c = add_up(c, std::fabs(R(q, j)));
        colsum = std::max(colsum, c);
    }
    const double base = add_up(colsum, A.rowsum_bound(0));
    // Off-rotation row sums of Lambda_k for every k' >= k.
    auto rho = [&](long k) { return add_up(base, mul_up(2.0 * double(n), tail_sup(A, 2 * k, 0.0))); };
    const double w = (pi() / tau).lo;
    if (!(w > 0)) fail(ErrorCode::DomainError, "half period must be positive");

    // k w - rho(k) is increasing, so the dominance set is a ray.
    double r1 = rho(1);
    double k0 = std::floor(r1 / w) + 1.0;
    if (k0 > double(cap))
        fail(ErrorCode::NoDominanceBelowCutoff, "no diagonal dominance below K cap " + std::to_string(cap));
    long hi = std::max<long>(1, long(k0));
    while (!(double(hi) * w > rho(hi))) ++hi;
    long lo = 1;
    while (lo < hi) {
        long mid = lo + (hi - lo) / 2;
        if (double(mid) * w > rho(mid))
            hi = mid;
        else
            lo = mid + 1;
    }
    KCLambda out;
    out.K = hi;
    out.rho = rho(long(m));
    if (long(m) < out.K) {
        out.C_Lambda = inf();
        return out;
    }
    double denom = rnd::sub_down(rnd::mul_down(double(m), w), out.rho);
    out.C_Lambda = denom > 0 ? rnd::div_up(double(m), denom) : inf();
    return out;
}

std::vector<double> row_abs(const MatrixFourierSeq& A, long j) {
    const std::size_t n = A.n;
    long a = j < 0 ? -j : j;
    std::vector<double> out(n, 0.0);
    if (A.structurally_zero(a)) return out;
    if (std::size_t(a) < A.size()) {
        const auto& c = A.coeffs[std::size_t(a)];
        for (std::size_t i = 0; i < n; ++i) {
            double s = 0.0;
            for (std::size_t p = 0; p < n; ++p) s = add_up(s, add_up(c.re(i, p).mag(), c.im(i, p).mag()));
            out[i] = s;
        }
        return out;
    }
    std::fill(out.begin(), out.end(), A.rowsum_bound(a));
    return out;
}

TailContext tail_context(const FloquetCandidate& x, const GalerkinProblem& prob, const VerifierParams& params) {
    TailContext ctx;
    ctx.kc = compute_K_CLambda(x.R, prob.A, prob.tau(), params.m, params.k_cap);
    ctx.sharp = params.sharp != SharpMode::Off;
    ctx.s_star = s_star_of(prob.A, params.s);
    ctx.L.resize(params.M);
    for (long k = 0; k < long(params.M); ++k) ctx.L[std::size_t(k)] = params.L(k);
    return ctx;
}

void y_bounds(const FloquetCandidate& x, const GalerkinProblem& prob, const BlockOperator& op,
              const VerifierParams& params, const TailContext& ctx, RadiiCoefficients& out) {
    const std::size_t n = x.n, nn = n * n, B = 2 * nn, m = params.m, M = params.M;
    const double s = params.s;
    out.Y.assign(M, std::vector<double>(B, 0.0));

    // In sharp mode f_k is evaluated explicitly up to m + J, past which only
    // the tail of A contributes to (A Q)_k.
    const long kb = ctx.sharp ? std::max<long>(long(M), long(m) + stored_top(prob.A)) : long(M);
    IntervalVector f = f_eval(x, prob, std::size_t(kb));
    // head: |A_m f^(m)|
    const Eigen::Index d = Eigen::Index(B * m);
    Eigen::VectorXd fmid(d), frad(d);
    for (Eigen::Index i = 0; i < d; ++i) {
        fmid[i] = f[std::size_t(i)].mid();
        frad[i] = f[std::size_t(i)].rad();
    }
    Eigen::VectorXd p, e;
    product_with_error(op.A_m, fmid, p, e);
    Eigen::VectorXd yr = upper_product(Eigen::MatrixXd(op.A_m.cwiseAbs()), frad);
    for (Eigen::Index i = 0; i < d; ++i)
        out.Y[std::size_t(i) / B][std::size_t(i) % B] = add_up(add_up(std::fabs(p[i]), e[i]), yr[i]);

    // m <= k < M: |Lambda_k^{-1} f_k|
    parallel_for(M - m, [&](std::size_t i) {
        const std::size_t k = m + i;
        IntervalVector fk(f.begin() + long(B * k), f.begin() + long(B * (k + 1)));
        IntervalVector y = op.lambda_inv[i] * fk;
        for (std::size_t e2 = 0; e2 < B; ++e2) out.Y[k][e2] = y[e2].mag();
    });

    // M <= k < kb: sup (k/M)^s |Lambda_k^{-1} f_k|
    std::vector<double> ymid(std::size_t(kb) - M, 0.0);
    parallel_for(std::size_t(kb) - M, [&](std::size_t i) {
        const std::size_t k = M + i;
        IntervalVector fk(f.begin() + long(B * k), f.begin() + long(B * (k + 1)));
        IntervalMatrix inv = lambda_k_inverse(lambda_k(long(k), x.R, prob.A, prob.tau()));
        IntervalVector y = inv * fk;
        double v = 0.0;
        for (const auto& c : y) v = std::max(v, c.mag());
        ymid[i] = mul_up(v, pow(Interval(double(k)) / Interval(double(M)), s).hi);
    });
    double y_explicit = 0.0;
    for (double v : ymid) y_explicit = std::max(y_explicit, v);

    // k >= kb
    const double anorm = ctx.sharp ? tail_sup(prob.A, kb - long(m) + 1, s) : s_norm_bound(prob.A, ctx.s_star);
    std::vector<double> colW(n, 0.0);
    auto add_col = [&](const Eigen::MatrixXd& re, const Eigen::MatrixXd* im, double factor) {
        for (std::size_t j = 0; j < n; ++j) {
            double c = 0.0;
            for (std::size_t p2 = 0; p2 < n; ++p2) {
                double a = std::fabs(re(Eigen::Index(p2), Eigen::Index(j)));
                double mod = im ? ComplexInterval(Interval(a), Interval(std::fabs((*im)(Eigen::Index(p2), Eigen::Index(j))))).abs_upper() : a;
                c = add_up(c, mod);
            }
            colW[j] = add_up(colW[j], mul_up(factor, c));
        }
    };
    add_col(x.Q1[0], nullptr, 1.0);
    for (std::size_t l = 1; l < x.m; ++l) add_col(x.Q1[l], &x.Q2[l], add_up(1.0, shifted_inv_pow(long(l), kb, s)));
    // |1_n W|_inf is the largest column sum of the weighted moduli.
    double W = 0.0;
    for (double c : colW) W = std::max(W, c);
    out.W_norm = W;
    out.A_tail_norm = anorm;
    double ym = 0.0;
    if (anorm > 0.0) {
        Interval t = Interval(anorm) * Interval(ctx.kc.C_Lambda) * Interval(W) /
                     (Interval(double(kb)) * pow(Interval(double(M)), s));
        ym = t.hi;
    }
    out.Y_M = std::max(ym, y_explicit);
}

void z_bounds(const FloquetCandidate& x, const GalerkinProblem& prob, const BlockOperator& op,
              const VerifierParams& params, const TailContext& ctx, RadiiCoefficients& out) {
    const std::size_t n = x.n, nn = n * n, B = 2 * nn, m = params.m, M = params.M;
    const double s = params.s, ss = ctx.s_star;
    const MatrixFourierSeq& A = prob.A;
    out.Z0.assign(M, std::vector<double>(B, 0.0));
    out.Z1.assign(M, std::vector<double>(B, 0.0));
    out.Z2.assign(M, std::vector<double>(B, 0.0));
    out.lin.assign(M, std::vector<double>(B, 0.0));
    out.quad.assign(M, std::vector<double>(B, 0.0));
    out.h.assign(M, 0.0);
    out.L = ctx.L;

    long jmax = 0;
    for (long k = 0; k < long(M); ++k) jmax = std::max(jmax, ctx.L[std::size_t(k)] + k + 1);
    std::vector<std::vector<double>> a(std::size_t(jmax + 1));
    for (long j = 0; j <= jmax; ++j) a[std::size_t(j)] = row_abs(A, j);
    std::vector<double> wl(std::size_t(jmax + 1));
    for (long l = 0; l <= jmax; ++l) wl[std::size_t(l)] = inv_weight_pow_up(l, s);

    const double n_sqrt2 = mul_up(double(n), rnd::sqrt_up(2.0));
    const double full_norm = s_norm_bound(A, ss);
    auto h_of = [&](long k) {
        const long L = ctx.L[std::size_t(k)];
        const double alpha = ctx.sharp ? tail_sup(A, L + 1 - k, ss) : full_norm;
        if (alpha == 0.0) return 0.0;
        Interval fac = Interval(1.0) / pow(Interval(double(L + 1 - k)), ss - s);
        double z = add_up(zeta(L - k, 2 * s), zeta(L, 2 * s));
        return mul_up(mul_up(mul_up(n_sqrt2, alpha), fac.hi), z);
    };

    // Z1, Z2 for every k < M.
    parallel_for(M, [&](std::size_t ku) {
        const long k = long(ku);
        const long L = ctx.L[ku];
        const double h = h_of(k);
        out.h[ku] = h;
        std::vector<double> row(n, 0.0);
        if (ku < m) {
            for (long l = long(m); l <= L; ++l) {
                const auto& a1 = a[std::size_t(l - k)];
                const auto& a2 = a[std::size_t(l + k)];
                for (std::size_t i = 0; i < n; ++i) row[i] = add_up(row[i], mul_up(add_up(a1[i], a2[i]), wl[std::size_t(l)]));
            }
        } else {
            for (long l = -L; l <= L; ++l) {
                if (l == k || l == -k) continue;
                const long j = k - l;
                const auto& aj = a[std::size_t(j < 0 ? -j : j)];
                const double w = wl[std::size_t(l < 0 ? -l : l)];
                for (std::size_t i = 0; i < n; ++i) row[i] = add_up(row[i], mul_up(aj[i], w));
            }
        }
        for (std::size_t i = 0; i < n; ++i) row[i] = add_up(row[i], h);
        auto& z1 = out.Z1[ku];
        for (std::size_t c = 0; c < 2; ++c)
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j) z1[c * nn + i * n + j] = row[i];
        if (k == 0) {
            double sum = 0.0;
            for (long l = long(m); l <= L; ++l) sum = add_up(sum, wl[std::size_t(l)]);
            double v = mul_up(2.0, add_up(sum, zeta(L, s)));
            for (std::size_t e = 0; e < nn; ++e) z1[e] = v;
        }
        auto& z2 = out.Z2[ku];
        const double q = mul_up(2.0 * double(n), inv_weight_pow_up(k, s));
        for (std::size_t e = (k == 0 ? nn : 0); e < B; ++e) z2[e] = q;
    });

    // Head: Z0 = |I - A_m Df| w and the A_m-weighted Z1, Z2.
    const Eigen::Index d = Eigen::Index(B * m);
    MidRad Df = jacobian_enclosure(x, prob);
    Eigen::MatrixXd P, E;
    product_with_error(op.A_m, Df.mid, P, E);
    Eigen::MatrixXd G(d, d);
    for (Eigen::Index i = 0; i < d; ++i)
        for (Eigen::Index j = 0; j < d; ++j) G(i, j) = i == j ? (Interval(1.0) - P(i, j)).mag() : std::fabs(P(i, j));
    Eigen::VectorXd wv(d);
    for (Eigen::Index i = 0; i < d; ++i) wv[i] = inv_weight_pow_up(long(std::size_t(i) / B), s);
    const Eigen::MatrixXd absA = op.A_m.cwiseAbs();
    Eigen::VectorXd z0 = add_up_vec(add_up_vec(upper_product(G, wv), upper_product(E, wv)),
                                    upper_product(absA, upper_product(Df.rad, wv)));
    Eigen::VectorXd z1h(d), z2h(d);
    for (Eigen::Index i = 0; i < d; ++i) {
        z1h[i] = out.Z1[std::size_t(i) / B][std::size_t(i) % B];
        z2h[i] = out.Z2[std::size_t(i) / B][std::size_t(i) % B];
    }
    Eigen::VectorXd l1 = upper_product(absA, z1h), l2 = upper_product(absA, z2h);
    for (Eigen::Index i = 0; i < d; ++i) {
        const std::size_t k = std::size_t(i) / B, e = std::size_t(i) % B;
        out.Z0[k][e] = z0[i];
        out.lin[k][e] = add_up(z0[i], l1[i]);
        out.quad[k][e] = l2[i];
    }

    // m <= k < M: |Lambda_k^{-1}| (Z1 r + Z2 r^2).
    parallel_for(M - m, [&](std::size_t i) {
        const std::size_t k = m + i;
        out.lin[k] = abs_apply(op.lambda_inv[i], out.Z1[k]);
        out.quad[k] = abs_apply(op.lambda_inv[i], out.Z2[k]);
    });

    // k >= M.
    const double C1 = convolution_constant_C1(long(M), s);
    out.C1 = C1;
    double alpha = 0.0;  // sup_j row sums times w_j^s
    if (ctx.sharp) {
        for (long j = 1; j < long(A.size()); ++j) {
            double r = 0.0;
            for (double v : row_abs(A, j)) r = std::max(r, v);
            alpha = std::max(alpha, mul_up(r, weight_pow(j, s).hi));
        }
        alpha = std::max(alpha, mul_up(n_sqrt2, tail_sup(A, long(A.size()), s)));
    } else {
        alpha = mul_up(n_sqrt2, full_norm);
    }
    double K1 = mul_up(alpha, C1);
    out.K1_route = "generic";
    const long J = stored_top(A);
    if (ctx.sharp && J >= 1 && J < long(M)) {
        double acc = 0.0;
        for (long j = 1; j <= J; ++j) {
            double r = 0.0;
            for (double v : row_abs(A, j)) r = std::max(r, v);
            if (r == 0.0) continue;
            acc = add_up(acc, mul_up(r, add_up(shifted_inv_pow(j, long(M), s), 1.0)));
        }
        double Ct = tail_sup(A, J + 1, s);
        acc = add_up(acc, mul_up(mul_up(n_sqrt2, Ct), C1));
        if (acc < K1) {
            K1 = acc;
            out.K1_route = "sharp";
        }
    }
    out.K1 = K1;
    Interval pref = Interval(ctx.kc.C_Lambda) / pow(Interval(double(M)), s + 1.0);
    out.z1_M = (pref * Interval(K1)).hi;
    out.z2_M = (pref * Interval(2.0 * double(n))).hi;
}

double eval_quadratic_up(double a, double b, double c, double r) {
    Interval R(r);
    return (Interval(c) + Interval(b) * R + Interval(a) * R * R).hi;
}

bool negativity_interval(double a, double b, double c, double cap, double& lo, double& hi) {
    // p(r) = a r^2 + b r + c with a, c >= 0.
    if (!(b < 0)) {
        lo = hi = 0;
        return false;
    }
    const Interval nb = -Interval(b);
    if (a == 0.0) {
        lo = c == 0.0 ? 0.0 : (Interval(c) / nb).hi;
        hi = cap;
        return lo < hi;
    }
    Interval disc = sqr(Interval(b)) - Interval(4.0) * Interval(a) * Interval(c);
    if (!(disc.lo > 0)) {
        lo = hi = 0;
        return false;
    }
    Interval sq = sqrt(disc);
    Interval big = nb + sq;
    // r- = 2c / (-b + sqrt(disc)) avoids cancellation.
    lo = c == 0.0 ? 0.0 : (Interval(2.0) * Interval(c) / big).hi;
    hi = std::min(cap, (big / (Interval(2.0) * Interval(a))).lo);
    return lo < hi;
}

VerificationReport assemble_and_solve(const RadiiCoefficients& coefs, const VerifierParams& params) {
    VerificationReport rep;
    rep.params = params;
    rep.n = coefs.n;
    rep.K = coefs.kc.K;
    rep.C_Lambda = coefs.kc.C_Lambda;
    rep.C1 = coefs.C1;
    rep.K1 = coefs.K1;
    rep.K1_route = coefs.K1_route;
    rep.sharp_used = coefs.sharp_used;
    rep.Y_M = coefs.Y_M;
    rep.z1_M = coefs.z1_M;
    rep.z2_M = coefs.z2_M;
    const std::size_t M = coefs.M, B = 2 * coefs.n * coefs.n;
    const double s = coefs.s, cap = params.r_cap;

    double rmin = 0.0, rmax = cap;
    bool ok = std::isfinite(coefs.kc.C_Lambda);
    rep.margins.resize(M + 1);
    for (std::size_t k = 0; k <= M; ++k) {
        Margin& mg = rep.margins[k];
        mg.k = long(k);
        double klo = 0.0, khi = cap;
        bool kok = true;
        const double wk = (Interval(1.0) / weight_pow(long(k), s)).lo;
        auto take = [&](double a, double b, double c) {
            double lo, hi;
            if (!negativity_interval(a, b, c, cap, lo, hi)) {
                kok = false;
                return;
            }
            klo = std::max(klo, lo);
            khi = std::min(khi, hi);
        };
        if (k < M) {
            for (std::size_t e = 0; e < B; ++e)
                take(coefs.quad[k][e], rnd::sub_up(coefs.lin[k][e], wk), coefs.Y[k][e]);
        } else {
            take(coefs.z2_M, rnd::sub_up(coefs.z1_M, wk), coefs.Y_M);
        }
        mg.has_interval = kok && klo < khi;
        mg.r_lo = klo;
        mg.r_hi = khi;
        if (!mg.has_interval) ok = false;
        rmin = std::max(rmin, klo);
        rmax = std::min(rmax, khi);
    }
    rep.has_interval = ok && rmin < rmax;
    rep.r_min = rmin;
    rep.r_max = rmax;

    // Certified radius: r_min pushed slightly into the interval and every
    // polynomial re-evaluated there. Near the underflow range the nudge is
    // lost to rounding, so larger radii inside the interval are tried next.
    auto confirm = [&](double r) {
        bool neg = true;
        for (std::size_t k = 0; k <= M; ++k) {
            Margin& mg = rep.margins[k];
            const double wk = (Interval(1.0) / weight_pow(long(k), s)).lo;
            double worst = -inf();
            long worst_e = 0;
            if (k < M) {
                for (std::size_t e = 0; e < B; ++e) {
                    double v = eval_quadratic_up(coefs.quad[k][e], rnd::sub_up(coefs.lin[k][e], wk), coefs.Y[k][e], r);
                    if (v > worst) {
                        worst = v;
                        worst_e = long(e);
                    }
                }
            } else {
                worst = eval_quadratic_up(coefs.z2_M, rnd::sub_up(coefs.z1_M, wk), coefs.Y_M, r);
            }
            mg.worst_entry = worst_e;
            mg.value_at_rmin = worst;
            if (!(worst < 0)) neg = false;
        }
        return neg;
    };
    double r = rmin;
    bool all_negative = false;
    if (rep.has_interval) {
        double nudged = rmin > 0 ? rmin * (1.0 + 0x1p-30) : std::min(rmax * 0x1p-30, 1e-300);
        r = nudged < rmax ? nudged : 0.5 * (rmin + rmax);
        all_negative = confirm(r);
        for (int j = 40; !all_negative && j >= 1; j -= 3) {
            const double t = rmin + std::ldexp(rmax - rmin, -j);
            if (!(t > r && t < rmax)) continue;
            r = t;
            all_negative = confirm(r);
        }
    } else {
        confirm(r);
    }
    rep.r = r;
    rep.success = all_negative && r > 0;
    std::ostringstream msg;
    if (!std::isfinite(coefs.kc.C_Lambda))
        msg << "m = " << params.m << " is below K = " << coefs.kc.K;
    else if (rep.success)
        msg << "verified with r = " << r;
    else if (!rep.has_interval) {
        long bad = -1;
        for (const auto& mg : rep.margins)
            if (!mg.has_interval) {
                bad = mg.k;
                break;
            }
        msg << "radii polynomials have no common negativity interval";
        if (bad >= 0) msg << " (first failing k = " << bad << ")";
    } else
        msg << "negativity not confirmed at r = " << r;
    rep.message = msg.str();
    return rep;
}

RadiiCoefficients radii_coefficients(const FloquetCandidate& x, const GalerkinProblem& prob,
                                     const VerifierParams& params, BlockOperator* op_out) {
    prob.validate();
    params.validate(prob.A);
    if (x.m != params.m) fail(ErrorCode::DimensionMismatch, "candidate size differs from m");
    if (x.n != prob.A.n) fail(ErrorCode::DimensionMismatch, "candidate and coefficients differ in dimension");
    VerifierParams p = params;
    if (p.m_gamma < 0) p.m_gamma = stored_top(prob.A);
    TailContext ctx = tail_context(x, prob, p);
    RadiiCoefficients c;
    c.n = x.n;
    c.m = p.m;
    c.M = p.M;
    c.s = p.s;
    c.kc = ctx.kc;
    c.sharp_used = ctx.sharp;
    log_info("K = " + std::to_string(ctx.kc.K) + ", C_Lambda = " + std::to_string(ctx.kc.C_Lambda));
    BlockOperator op = build_block_operator(x, prob, p.M);
    y_bounds(x, prob, op, p, ctx, c);
    z_bounds(x, prob, op, p, ctx, c);
    if (op_out) *op_out = std::move(op);
    return c;
}

VerifiedFloquetForm verify(const FloquetCandidate& x, const GalerkinProblem& prob, const VerifierParams& params,
                           bool conditional, VerificationReport* report_out) {
    VerifierParams p = params;
    if (p.m_gamma < 0) p.m_gamma = stored_top(prob.A);
    VerificationReport rep;
    try {
        RadiiCoefficients c = radii_coefficients(x, prob, p);
        rep = assemble_and_solve(c, p);
    } catch (const Error& e) {
        if (e.code() != ErrorCode::NotCertifiablyInvertible && e.code() != ErrorCode::SingularJacobian) throw;
        rep.params = p;
        rep.n = x.n;
        rep.message = e.what();
    }
    rep.s_star = s_star_of(prob.A, p.s);
    rep.conditional = conditional;
    rep.residual = f_eval_point(x, PointSequence::from(prob.A), x.m).lpNorm<Eigen::Infinity>();
    if (report_out) *report_out = rep;
    if (!rep.success) fail(ErrorCode::VerificationFailed, rep.message);
    VerifiedFloquetForm form;
    form.x = x;
    form.x.tau = prob.tau();
    form.r = rep.r;
    form.s = p.s;
    form.conditional = conditional;
    return form;
}

VerifiedFloquetForm verify(const OrbitEnclosure& orbit, const FloquetCandidate& x, const VerifierParams& params,
                           VerificationReport* report_out) {
    GalerkinProblem prob{jacobian_coeffs(orbit), params.m, params.s};
    return verify(x, prob, params, orbit.conditional, report_out);
}

IntervalMatrix VerifiedFloquetForm::R_enclosure() const { return IntervalMatrix::ball(x.R, r); }

MatrixFourierSeq VerifiedFloquetForm::Q_enclosure() const {
    MatrixFourierSeq q(x.n, x.tau, x.m);
    for (std::size_t k = 0; k < x.m; ++k) {
        double b = rnd::mul_up(r, inv_weight_pow_up(long(k), s));
        q.coeffs[k].re = IntervalMatrix::ball(x.Q1[k], b);
        q.coeffs[k].im = k == 0 ? IntervalMatrix(x.n, x.n) : IntervalMatrix::ball(x.Q2[k], b);
    }
    q.tail.C = rnd::mul_up(rnd::sqrt_up(2.0), r);
    q.tail.s = s;
    return q;
}

double sample_contraction(const FloquetCandidate& x, const GalerkinProblem& prob, const BlockOperator& op, double r,
                          double s, int count, std::uint64_t seed) {
    const std::size_t M = op.M, B = 2 * x.n * x.n;
    FloquetCandidate base = x.resized(M);
    const Eigen::VectorXd xb = base.to_vector();
    PointSequence A = PointSequence::from(prob.A);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    double worst = 0.0;
    for (int t = 0; t < count; ++t) {
        Eigen::VectorXd u(xb.size());
        for (Eigen::Index i = 0; i < u.size(); ++i) {
            double w = std::pow(double(weight(long(std::size_t(i) / B))), -s);
            u[i] = U(rng) * w;
        }
        // Q_0 has no imaginary part and R shares block 0.
        FloquetCandidate xt = base;
        xt.from_vector(xb + r * u);
        Eigen::VectorXd step = apply_A(op, f_eval_point(xt, A, M));
        Eigen::VectorXd d = xt.to_vector() - xb - step;
        double nrm = 0.0;
        for (Eigen::Index i = 0; i < d.size(); ++i)
            nrm = std::max(nrm, std::fabs(d[i]) * std::pow(double(weight(long(std::size_t(i) / B))), s));
        worst = std::max(worst, nrm / r);
    }
    return worst;
}

}  // namespace floquet
