#include "floquet/system.hpp"

#include <cmath>
#include <complex>

#include "floquet/log.hpp"
#include "floquet/tail_constants.hpp"
#include "ode.hpp"

namespace floquet {

namespace {

using cd = std::complex<double>;

PolyTerm term(std::size_t comp, Interval c, std::vector<int> p) { return PolyTerm{comp, c, std::move(p)}; }

const Interval& param(const VectorFieldSpec& f, const std::string& name) {
    auto it = f.params.find(name);
    if (it == f.params.end()) fail(ErrorCode::MalformedInput, "field parameter '" + name + "' missing");
    return it->second;
}

}  // namespace

VectorFieldSpec VectorFieldSpec::lorenz(Interval sigma, Interval rho, Interval beta) {
    VectorFieldSpec f;
    f.kind = Kind::Lorenz;
    f.n = 3;
    f.params = {{"sigma", sigma}, {"rho", rho}, {"beta", beta}};
    f.rebuild_terms();
    return f;
}

VectorFieldSpec VectorFieldSpec::zeta3(Interval alpha, Interval beta) {
    VectorFieldSpec f;
    f.kind = Kind::Zeta3;
    f.n = 3;
    f.params = {{"alpha", alpha}, {"beta", beta}};
    f.rebuild_terms();
    return f;
}

VectorFieldSpec VectorFieldSpec::polynomial(std::size_t n, std::vector<PolyTerm> terms) {
    VectorFieldSpec f;
    f.kind = Kind::Polynomial;
    f.n = n;
    f.terms = std::move(terms);
    for (const auto& t : f.terms)
        if (t.component >= n || t.powers.size() != n)
            fail(ErrorCode::MalformedInput, "polynomial term does not match the dimension");
    if (f.degree() > 2) fail(ErrorCode::UnsupportedField, "polynomial fields of degree > 2 are not supported");
    return f;
}

void VectorFieldSpec::rebuild_terms() {
    switch (kind) {
        case Kind::Lorenz: {
            const Interval &s = param(*this, "sigma"), &r = param(*this, "rho"), &b = param(*this, "beta");
            terms = {term(0, s, {0, 1, 0}), term(0, -s, {1, 0, 0}), term(1, r, {1, 0, 0}),
                     term(1, Interval(-1.0), {1, 0, 1}), term(1, Interval(-1.0), {0, 1, 0}),
                     term(2, Interval(1.0), {1, 1, 0}), term(2, -b, {0, 0, 1})};
            break;
        }
        case Kind::Zeta3: {
            const Interval &a = param(*this, "alpha"), &b = param(*this, "beta");
            terms = {term(0, Interval(1.0), {0, 1, 0}), term(1, Interval(1.0), {0, 0, 1}),
                     term(2, a, {1, 0, 0}),          term(2, Interval(-1.0), {2, 0, 0}),
                     term(2, -b, {0, 1, 0}),         term(2, Interval(-1.0), {0, 0, 1})};
            break;
        }
        case Kind::Polynomial: break;
    }
}

int VectorFieldSpec::degree() const {
    int d = 0;
    for (const auto& t : terms) {
        int s = 0;
        for (int p : t.powers) {
            if (p < 0) fail(ErrorCode::MalformedInput, "negative monomial exponent");
            s += p;
        }
        d = std::max(d, s);
    }
    return d;
}

std::string VectorFieldSpec::kind_name() const {
    switch (kind) {
        case Kind::Lorenz: return "lorenz";
        case Kind::Zeta3: return "zeta3";
        case Kind::Polynomial: return "polynomial";
    }
    return "polynomial";
}

Eigen::VectorXd VectorFieldSpec::eval(const Eigen::VectorXd& u) const {
    Eigen::VectorXd g = Eigen::VectorXd::Zero(Eigen::Index(n));
    for (const auto& t : terms) {
        double v = t.coeff.mid();
        for (std::size_t j = 0; j < n; ++j) v *= std::pow(u[Eigen::Index(j)], t.powers[j]);
        g[Eigen::Index(t.component)] += v;
    }
    return g;
}

Eigen::MatrixXd VectorFieldSpec::jacobian(const Eigen::VectorXd& u) const {
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(Eigen::Index(n), Eigen::Index(n));
    for (const auto& t : terms)
        for (std::size_t j = 0; j < n; ++j) {
            if (t.powers[j] == 0) continue;
            double v = t.coeff.mid() * t.powers[j];
            for (std::size_t l = 0; l < n; ++l) v *= std::pow(u[Eigen::Index(l)], t.powers[l] - (l == j ? 1 : 0));
            J(Eigen::Index(t.component), Eigen::Index(j)) += v;
        }
    return J;
}

void VectorFieldSpec::affine_jacobian(IntervalMatrix& J0, std::vector<IntervalMatrix>& J) const {
    if (degree() > 2) fail(ErrorCode::UnsupportedField, "Jacobian coefficients need a field of degree <= 2");
    J0 = IntervalMatrix(n, n);
    J.assign(n, IntervalMatrix(n, n));
    for (const auto& t : terms)
        for (std::size_t j = 0; j < n; ++j) {
            if (t.powers[j] == 0) continue;
            std::vector<int> p = t.powers;
            p[j] -= 1;
            Interval c = Interval(double(t.powers[j])) * t.coeff;
            long var = -1;
            int deg = 0;
            for (std::size_t l = 0; l < n; ++l) {
                deg += p[l];
                if (p[l] > 0) var = long(l);
            }
            if (deg == 0)
                J0(t.component, j) += c;
            else
                J[std::size_t(var)](t.component, j) += c;
        }
}

void OrbitEnclosure::validate() const {
    if (field.n == 0) fail(ErrorCode::MalformedInput, "orbit field has dimension 0");
    if (s_star < 2) fail(ErrorCode::MalformedInput, "s_star must be at least 2");
    if (r_gamma < 0) fail(ErrorCode::MalformedInput, "r_gamma must be nonnegative");
    if (M_gamma < 0 || xi.size() != std::size_t(M_gamma + 1))
        fail(ErrorCode::MalformedInput, "xi must list M_gamma + 1 coefficients");
    for (const auto& v : xi)
        if (v.size() != field.n) fail(ErrorCode::MalformedInput, "xi coefficient has wrong dimension");
    for (std::size_t i = 0; i < field.n; ++i)
        if (!xi[0][i].im.contains_zero()) fail(ErrorCode::MalformedInput, "xi_0 must be real");
    if (!(tau.lo > 0)) fail(ErrorCode::MalformedInput, "tau must be positive");
}

Eigen::VectorXd OrbitEnclosure::eval_point(double t) const {
    const std::size_t n = field.n;
    Eigen::VectorXd g(static_cast<Eigen::Index>(n));
    const double w = 2.0 * M_PI / tau.mid();
    for (std::size_t i = 0; i < n; ++i) {
        double v = xi[0][i].re.mid();
        for (long k = 1; k <= M_gamma; ++k) {
            const auto& c = xi[std::size_t(k)][i];
            v += 2.0 * (c.re.mid() * std::cos(double(k) * w * t) - c.im.mid() * std::sin(double(k) * w * t));
        }
        g[Eigen::Index(i)] = v;
    }
    return g;
}

namespace {

// Orbit coefficient with the hypothesis ball added.
ComplexInterval inflated_xi(const OrbitEnclosure& o, long k, std::size_t i) {
    double b = rnd::mul_up(o.r_gamma, inv_weight_pow_up(k, o.s_star));
    ComplexInterval c = o.xi[std::size_t(k)][i];
    c.re += Interval(-b, b);
    if (k != 0) c.im += Interval(-b, b);
    return c;
}

Interval orbit_period(const OrbitEnclosure& o) { return o.tau + Interval(-o.r_gamma, o.r_gamma); }

}  // namespace

MatrixFourierSeq jacobian_coeffs(const OrbitEnclosure& orbit) {
    orbit.validate();
    const std::size_t n = orbit.field.n;
    IntervalMatrix J0;
    std::vector<IntervalMatrix> J;
    orbit.field.affine_jacobian(J0, J);

    MatrixFourierSeq A(n, orbit_period(orbit), std::size_t(2 * orbit.M_gamma + 1));
    A.odd_vanish = true;
    for (long k = 0; k <= orbit.M_gamma; ++k) {
        CoeffPair& c = A.coeffs[std::size_t(2 * k)];
        if (k == 0) c.re = J0;
        for (std::size_t l = 0; l < n; ++l) {
            ComplexInterval x = inflated_xi(orbit, k, l);
            if (k == 0) x.im = Interval(0.0);
            c.re = c.re + x.re * J[l];
            c.im = c.im + x.im * J[l];
        }
    }
    // |xi_k| <= sqrt(2) r_gamma k^{-s*} beyond M_gamma, and index 2k carries
    // the factor 2^{s*} when rewritten in the doubled weight.
    double cj = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            double s = 0.0;
            for (std::size_t l = 0; l < n; ++l) s = rnd::add_up(s, J[l](i, j).mag());
            cj = std::max(cj, s);
        }
    double C = rnd::mul_up(rnd::mul_up(cj, rnd::sqrt_up(2.0)), orbit.r_gamma);
    C = rnd::mul_up(C, pow(Interval(2.0), orbit.s_star).hi);
    A.tail = TailBound{C, orbit.s_star};
    return A;
}

std::vector<Interval> orbit_point(const OrbitEnclosure& orbit, const Interval& theta) {
    const std::size_t n = orbit.field.n;
    std::vector<Interval> out(n);
    Interval x = Interval(2.0) * theta / orbit_period(orbit);
    for (std::size_t i = 0; i < n; ++i) {
        Interval v = inflated_xi(orbit, 0, i).re;
        for (long k = 1; k <= orbit.M_gamma; ++k) {
            ComplexInterval c = inflated_xi(orbit, k, i);
            Interval ang = Interval(double(k)) * x;
            v += Interval(2.0) * (c.re * cospi(ang) - c.im * sinpi(ang));
        }
        if (orbit.r_gamma > 0) {
            double b = rnd::mul_up(rnd::mul_up(2.0 * rnd::sqrt_up(2.0), orbit.r_gamma),
                                   zeta(std::max<long>(orbit.M_gamma, 1), orbit.s_star));
            if (orbit.M_gamma == 0) b = rnd::add_up(b, rnd::mul_up(2.0 * rnd::sqrt_up(2.0), orbit.r_gamma));
            v += Interval(-b, b);
        }
        out[i] = v;
    }
    return out;
}

namespace {

// Unknowns: tau, xi_0 (real), then Re xi_k, Im xi_k for k = 1..M.
struct GalerkinLayout {
    std::size_t n;
    long M;
    std::size_t size() const { return 1 + n + 2 * n * std::size_t(M); }
};

std::vector<std::vector<cd>> unpack(const Eigen::VectorXd& z, const GalerkinLayout& L, double& tau) {
    tau = z[0];
    std::vector<std::vector<cd>> xi(std::size_t(L.M + 1), std::vector<cd>(L.n));
    std::size_t p = 1;
    for (std::size_t i = 0; i < L.n; ++i) xi[0][i] = cd(z[Eigen::Index(p++)], 0.0);
    for (long k = 1; k <= L.M; ++k) {
        for (std::size_t i = 0; i < L.n; ++i) xi[std::size_t(k)][i].real(z[Eigen::Index(p++)]);
        for (std::size_t i = 0; i < L.n; ++i) xi[std::size_t(k)][i].imag(z[Eigen::Index(p++)]);
    }
    return xi;
}

Eigen::VectorXd pack(const std::vector<std::vector<cd>>& xi, double tau, const GalerkinLayout& L) {
    Eigen::VectorXd z(Eigen::Index(L.size()));
    z[0] = tau;
    std::size_t p = 1;
    for (std::size_t i = 0; i < L.n; ++i) z[Eigen::Index(p++)] = xi[0][i].real();
    for (long k = 1; k <= L.M; ++k) {
        for (std::size_t i = 0; i < L.n; ++i) z[Eigen::Index(p++)] = xi[std::size_t(k)][i].real();
        for (std::size_t i = 0; i < L.n; ++i) z[Eigen::Index(p++)] = xi[std::size_t(k)][i].imag();
    }
    return z;
}

cd coef(const std::vector<std::vector<cd>>& xi, long k, std::size_t i) {
    long a = k < 0 ? -k : k;
    if (a >= long(xi.size())) return 0.0;
    return k >= 0 ? xi[std::size_t(a)][i] : std::conj(xi[std::size_t(a)][i]);
}

// Fourier coefficients 0..M of g(gamma) for a field of degree <= 2, products truncated to |k| <= M.
std::vector<std::vector<cd>> field_coeffs(const VectorFieldSpec& f, const std::vector<std::vector<cd>>& xi) {
    const long M = long(xi.size()) - 1;
    std::vector<std::vector<cd>> g(xi.size(), std::vector<cd>(f.n, 0.0));
    for (const auto& t : f.terms) {
        double c = t.coeff.mid();
        std::vector<std::size_t> vars;
        for (std::size_t j = 0; j < f.n; ++j)
            for (int p = 0; p < t.powers[j]; ++p) vars.push_back(j);
        if (vars.empty()) {
            g[0][t.component] += c;
        } else if (vars.size() == 1) {
            for (long k = 0; k <= M; ++k) g[std::size_t(k)][t.component] += c * xi[std::size_t(k)][vars[0]];
        } else {
            for (long k = 0; k <= M; ++k) {
                cd s = 0.0;
                for (long k1 = k - M; k1 <= M; ++k1) s += coef(xi, k1, vars[0]) * coef(xi, k - k1, vars[1]);
                g[std::size_t(k)][t.component] += c * s;
            }
        }
    }
    return g;
}

Eigen::VectorXd galerkin_residual(const VectorFieldSpec& f, const Eigen::VectorXd& z, const GalerkinLayout& L,
                                  const std::vector<std::vector<cd>>& ref) {
    double tau;
    auto xi = unpack(z, L, tau);
    auto g = field_coeffs(f, xi);
    Eigen::VectorXd F(Eigen::Index(L.size()));
    const double w = 2.0 * M_PI / tau;
    std::size_t p = 0;
    for (std::size_t i = 0; i < L.n; ++i) F[Eigen::Index(p++)] = -g[0][i].real();
    for (long k = 1; k <= L.M; ++k) {
        std::vector<cd> r(L.n);
        for (std::size_t i = 0; i < L.n; ++i) r[i] = cd(0.0, double(k) * w) * xi[std::size_t(k)][i] - g[std::size_t(k)][i];
        for (std::size_t i = 0; i < L.n; ++i) F[Eigen::Index(p++)] = r[i].real();
        for (std::size_t i = 0; i < L.n; ++i) F[Eigen::Index(p++)] = r[i].imag();
    }
    // Phase condition: integral of <gamma, d/dt gamma_ref> = 0.
    double ph = 0.0;
    for (long k = 1; k <= L.M; ++k)
        for (std::size_t i = 0; i < L.n; ++i)
            ph += double(k) * (std::conj(ref[std::size_t(k)][i]) * xi[std::size_t(k)][i]).imag();
    F[Eigen::Index(p)] = ph;
    return F;
}

OrbitEnclosure refine(const VectorFieldSpec& field, std::vector<std::vector<cd>> xi, double tau, long M,
                      double r_gamma, const OrbitFinderOptions& opt) {
    if (field.degree() > 2) fail(ErrorCode::UnsupportedField, "orbit finder needs a field of degree <= 2");
    xi.resize(std::size_t(M + 1), std::vector<cd>(field.n, 0.0));
    GalerkinLayout L{field.n, M};
    const auto ref = xi;
    Eigen::VectorXd z = pack(xi, tau, L);
    Eigen::VectorXd F = galerkin_residual(field, z, L, ref);
    double res = F.lpNorm<Eigen::Infinity>();
    int it = 0;
    for (; it < opt.max_iter && res > opt.tol; ++it) {
        Eigen::MatrixXd J(F.size(), z.size());
        for (Eigen::Index c = 0; c < z.size(); ++c) {
            double h = 1e-6 * std::max(1.0, std::fabs(z[c]));
            Eigen::VectorXd zp = z, zm = z;
            zp[c] += h;
            zm[c] -= h;
            J.col(c) = (galerkin_residual(field, zp, L, ref) - galerkin_residual(field, zm, L, ref)) / (2 * h);
        }
        Eigen::VectorXd dz = J.completeOrthogonalDecomposition().solve(-F);
        double step = 1.0;
        Eigen::VectorXd zn;
        double rn = res;
        for (int ls = 0; ls < 30; ++ls, step *= 0.5) {
            zn = z + step * dz;
            rn = galerkin_residual(field, zn, L, ref).lpNorm<Eigen::Infinity>();
            if (rn < res || !std::isfinite(res)) break;
        }
        log_debug("orbit newton iter " + std::to_string(it) + " residual " + std::to_string(rn));
        if (!(rn < res)) {
            // Rounding floor reached.
            if (res < std::max(opt.tol * 1e3, 1e-10)) break;
            fail(ErrorCode::NoConvergence, "orbit Newton stalled at residual " + std::to_string(res));
        }
        z = zn;
        F = galerkin_residual(field, z, L, ref);
        res = F.lpNorm<Eigen::Infinity>();
    }
    if (!(res <= std::max(opt.tol * 1e3, 1e-10)))
        fail(ErrorCode::NoConvergence, "orbit Newton did not converge, residual " + std::to_string(res));
    double tn;
    auto xn = unpack(z, L, tn);
    OrbitEnclosure o;
    o.field = field;
    o.tau = Interval(tn);
    o.s_star = 2.0;
    o.M_gamma = M;
    o.r_gamma = r_gamma;
    o.conditional = true;
    o.xi.assign(std::size_t(M + 1), std::vector<ComplexInterval>(field.n));
    for (long k = 0; k <= M; ++k)
        for (std::size_t i = 0; i < field.n; ++i)
            o.xi[std::size_t(k)][i] = ComplexInterval(Interval(xn[std::size_t(k)][i].real()),
                                                      Interval(k == 0 ? 0.0 : xn[std::size_t(k)][i].imag()));
    return o;
}

}  // namespace

OrbitEnclosure orbit_candidate_find(const VectorFieldSpec& field, const Eigen::VectorXd& state, double period,
                                    long M_gamma, double r_gamma, const OrbitFinderOptions& opt) {
    if (M_gamma < 1) fail(ErrorCode::InvalidArgument, "M_gamma must be at least 1");
    const std::size_t n = field.n;
    std::size_t N = 64;
    while (N < std::size_t(8 * M_gamma + 8)) N *= 2;
    std::vector<double> times(N + 1);
    for (std::size_t j = 0; j <= N; ++j) times[j] = period * double(j) / double(N);
    detail::State x0(state.data(), state.data() + state.size());
    auto rhs = [&](const detail::State& x, detail::State& dx, double) {
        Eigen::VectorXd u = Eigen::Map<const Eigen::VectorXd>(x.data(), Eigen::Index(n));
        Eigen::VectorXd g = field.eval(u);
        dx.assign(g.data(), g.data() + g.size());
    };
    auto samples = detail::integrate_samples(rhs, x0, times);
    std::vector<std::vector<cd>> xi(std::size_t(M_gamma + 1), std::vector<cd>(n, 0.0));
    for (long k = 0; k <= M_gamma; ++k)
        for (std::size_t j = 0; j < N; ++j) {
            cd e = std::exp(cd(0.0, -2.0 * M_PI * double(k) * double(j) / double(N)));
            for (std::size_t i = 0; i < n; ++i) xi[std::size_t(k)][i] += samples[j][i] * e / double(N);
        }
    for (std::size_t i = 0; i < n; ++i) xi[0][i] = xi[0][i].real();
    return refine(field, xi, period, M_gamma, r_gamma, opt);
}

OrbitEnclosure orbit_candidate_find(const OrbitEnclosure& guess, long M_gamma, double r_gamma,
                                    const OrbitFinderOptions& opt) {
    std::vector<std::vector<cd>> xi(guess.xi.size(), std::vector<cd>(guess.field.n));
    for (std::size_t k = 0; k < guess.xi.size(); ++k)
        for (std::size_t i = 0; i < guess.field.n; ++i)
            xi[k][i] = cd(guess.xi[k][i].re.mid(), k == 0 ? 0.0 : guess.xi[k][i].im.mid());
    if (long(xi.size()) > M_gamma + 1) xi.resize(std::size_t(M_gamma + 1));
    OrbitEnclosure o = refine(guess.field, xi, guess.tau.mid(), M_gamma, r_gamma, opt);
    o.s_star = guess.s_star;
    return o;
}

OrbitEnclosure continue_orbit(const OrbitEnclosure& start, const std::string& name, double target, int steps,
                              const OrbitFinderOptions& opt) {
    if (steps < 1) fail(ErrorCode::InvalidArgument, "continuation needs at least one step");
    OrbitEnclosure cur = start;
    double p0 = param(start.field, name).mid();
    for (int i = 1; i <= steps; ++i) {
        double p = i == steps ? target : p0 + (target - p0) * double(i) / double(steps);
        cur.field.params[name] = Interval(p);
        cur.field.rebuild_terms();
        cur = orbit_candidate_find(cur, cur.M_gamma, start.r_gamma, opt);
        log_info("continuation " + name + "=" + std::to_string(p) + " period " + std::to_string(cur.tau.mid()));
    }
    return cur;
}

OrbitEnclosure shift_time(const OrbitEnclosure& orbit, double t0) {
    orbit.validate();
    OrbitEnclosure o = orbit;
    // angle of mode k is 2 k t0 / tau in units of pi
    const Interval base = Interval(2.0) * Interval(t0) / orbit_period(orbit);
    for (long k = 1; k <= o.M_gamma; ++k) {
        const Interval a = Interval(double(k)) * base;
        const ComplexInterval rot{cospi(a), sinpi(a)};
        for (auto& c : o.xi[std::size_t(k)]) c = c * rot;
    }
    o.r_gamma = rnd::mul_up(orbit.r_gamma, rnd::sqrt_up(2.0));
    return o;
}

double orbit_residual(const OrbitEnclosure& orbit, int grid) {
    const std::size_t n = orbit.field.n;
    const double tau = orbit.tau.mid(), w = 2.0 * M_PI / tau;
    double worst = 0.0;
    for (int g = 0; g < grid; ++g) {
        double t = tau * double(g) / double(grid);
        Eigen::VectorXd u = orbit.eval_point(t), du = Eigen::VectorXd::Zero(Eigen::Index(n));
        for (long k = 1; k <= orbit.M_gamma; ++k)
            for (std::size_t i = 0; i < n; ++i) {
                const auto& c = orbit.xi[std::size_t(k)][i];
                double kw = double(k) * w;
                du[Eigen::Index(i)] += 2.0 * kw * (-c.re.mid() * std::sin(kw * t) - c.im.mid() * std::cos(kw * t));
            }
        worst = std::max(worst, (du - orbit.field.eval(u)).lpNorm<Eigen::Infinity>());
    }
    return worst;
}

}  // namespace floquet
