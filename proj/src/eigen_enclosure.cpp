#include "floquet/eigen_enclosure.hpp"

#include <cmath>
#include <complex>
#include <functional>

#include <Eigen/Eigenvalues>

#include "floquet/log.hpp"

namespace floquet {

const char* label_name(ExponentLabel l) {
    switch (l) {
        case ExponentLabel::Stable: return "stable";
        case ExponentLabel::Trivial: return "trivial";
        case ExponentLabel::Unstable: return "unstable";
    }
    return "stable";
}

namespace {

using cd = std::complex<double>;
using Fn = std::function<IntervalVector(const IntervalVector&)>;
using DFn = std::function<IntervalMatrix(const IntervalVector&)>;

IntervalVector point(const Eigen::VectorXd& z) {
    IntervalVector v(std::size_t(z.size()));
    for (Eigen::Index i = 0; i < z.size(); ++i) v[std::size_t(i)] = Interval(z[i]);
    return v;
}

// Krawczyk operator with epsilon-inflation around the point z; returns true
// and the contracted box when K(X) lies in the interior of X.
bool krawczyk(const Fn& F, const DFn& DF, const Eigen::VectorXd& z, int max_iter, IntervalVector& out) {
    const std::size_t d = std::size_t(z.size());
    IntervalVector zi = point(z);
    Eigen::MatrixXd Dm = DF(zi).mid();
    Eigen::MatrixXd C = Dm.fullPivLu().inverse();
    if (!C.allFinite()) return false;
    IntervalMatrix Ci = IntervalMatrix::from_point(C);
    IntervalVector cf = Ci * F(zi);
    double base = 0.0;
    for (const auto& v : cf) base = std::max(base, v.mag());
    double scale = 0.0;
    for (Eigen::Index i = 0; i < z.size(); ++i) scale = std::max(scale, std::fabs(z[i]));
    std::vector<double> rad(d, std::max(10.0 * base, 1e-15 * std::max(scale, 1.0)));
    for (int it = 0; it < max_iter; ++it) {
        IntervalVector X(d), dx(d);
        for (std::size_t i = 0; i < d; ++i) {
            X[i] = Interval(z[Eigen::Index(i)]) + Interval(-rad[i], rad[i]);
            dx[i] = Interval(-rad[i], rad[i]);
        }
        IntervalMatrix G = IntervalMatrix::identity(d) - Ci * DF(X);
        IntervalVector gdx = G * dx;
        IntervalVector K(d);
        bool inside = true;
        for (std::size_t i = 0; i < d; ++i) {
            K[i] = zi[i] - cf[i] + gdx[i];
            if (!X[i].interior_contains(K[i])) inside = false;
        }
        if (inside) {
            out = K;
            return true;
        }
        for (std::size_t i = 0; i < d; ++i) {
            double e = std::max((K[i] - zi[i]).mag(), rad[i]);
            rad[i] = 2.0 * e;
        }
    }
    return false;
}

EigenPairEnclosure certify_real(const IntervalMatrix& R, double lam, Eigen::VectorXd v, int max_iter) {
    const std::size_t n = R.rows();
    const Eigen::MatrixXd Rm = R.mid();
    v.normalize();
    Eigen::Index p;
    v.cwiseAbs().maxCoeff(&p);
    if (v[p] < 0) v = -v;
    Eigen::VectorXd z(Eigen::Index(n + 1));
    z.head(Eigen::Index(n)) = v;
    z[Eigen::Index(n)] = lam;
    // Two Newton steps on the midpoint system sharpen the floating pair.
    for (int it = 0; it < 2; ++it) {
        Eigen::VectorXd vv = z.head(Eigen::Index(n));
        double mu = z[Eigen::Index(n)];
        Eigen::VectorXd Fv(Eigen::Index(n + 1));
        Fv.head(Eigen::Index(n)) = (Rm - mu * Eigen::MatrixXd::Identity(Eigen::Index(n), Eigen::Index(n))) * vv;
        Fv[Eigen::Index(n)] = vv.squaredNorm() - 1.0;
        Eigen::MatrixXd J = Eigen::MatrixXd::Zero(Eigen::Index(n + 1), Eigen::Index(n + 1));
        J.topLeftCorner(Eigen::Index(n), Eigen::Index(n)) = Rm - mu * Eigen::MatrixXd::Identity(Eigen::Index(n), Eigen::Index(n));
        J.topRightCorner(Eigen::Index(n), 1) = -vv;
        J.bottomLeftCorner(1, Eigen::Index(n)) = 2.0 * vv.transpose();
        z -= J.fullPivLu().solve(Fv);
    }
    Fn F = [&](const IntervalVector& x) {
        IntervalVector f(n + 1, Interval(0.0));
        const Interval& mu = x[n];
        Interval nrm(0.0);
        for (std::size_t i = 0; i < n; ++i) {
            Interval acc(0.0);
            for (std::size_t j = 0; j < n; ++j) acc += R(i, j) * x[j];
            f[i] = acc - mu * x[i];
            nrm += sqr(x[i]);
        }
        f[n] = nrm - 1.0;
        return f;
    };
    DFn DF = [&](const IntervalVector& x) {
        IntervalMatrix J(n + 1, n + 1);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) J(i, j) = R(i, j);
            J(i, i) -= x[n];
            J(i, n) = -x[i];
            J(n, i) = Interval(2.0) * x[i];
        }
        return J;
    };
    IntervalVector K;
    if (!krawczyk(F, DF, z, max_iter, K))
        fail(ErrorCode::NotCertified, "Krawczyk test failed for a real eigenvalue near " + std::to_string(lam));
    EigenPairEnclosure e;
    e.kind = EigenPairEnclosure::Kind::Real;
    e.mu = ComplexInterval{K[n], Interval(0.0)};
    for (std::size_t i = 0; i < n; ++i) e.v.push_back(ComplexInterval{K[i], Interval(0.0)});
    return e;
}

EigenPairEnclosure certify_complex(const IntervalMatrix& R, cd lam, Eigen::VectorXcd v, int max_iter) {
    const std::size_t n = R.rows();
    v.normalize();
    Eigen::Index p;
    v.cwiseAbs().maxCoeff(&p);
    v *= std::abs(v[p]) / v[p];
    const std::size_t pin = std::size_t(p);
    Eigen::VectorXd z(Eigen::Index(2 * n + 2));
    z.head(Eigen::Index(n)) = v.real();
    z.segment(Eigen::Index(n), Eigen::Index(n)) = v.imag();
    z[Eigen::Index(2 * n)] = lam.real();
    z[Eigen::Index(2 * n + 1)] = lam.imag();
    z[Eigen::Index(n + pin)] = 0.0;
    Fn F = [&](const IntervalVector& w) {
        IntervalVector f(2 * n + 2, Interval(0.0));
        const Interval &a = w[2 * n], &b = w[2 * n + 1];
        Interval nrm(0.0);
        for (std::size_t i = 0; i < n; ++i) {
            Interval rx(0.0), ry(0.0);
            for (std::size_t j = 0; j < n; ++j) {
                rx += R(i, j) * w[j];
                ry += R(i, j) * w[n + j];
            }
            f[i] = rx - a * w[i] + b * w[n + i];
            f[n + i] = ry - a * w[n + i] - b * w[i];
            nrm += sqr(w[i]) + sqr(w[n + i]);
        }
        f[2 * n] = nrm - 1.0;
        f[2 * n + 1] = w[n + pin];
        return f;
    };
    DFn DF = [&](const IntervalVector& w) {
        IntervalMatrix J(2 * n + 2, 2 * n + 2);
        const Interval &a = w[2 * n], &b = w[2 * n + 1];
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                J(i, j) = R(i, j);
                J(n + i, n + j) = R(i, j);
            }
            J(i, i) -= a;
            J(n + i, n + i) -= a;
            J(i, n + i) = b;
            J(n + i, i) = -b;
            J(i, 2 * n) = -w[i];
            J(i, 2 * n + 1) = w[n + i];
            J(n + i, 2 * n) = -w[n + i];
            J(n + i, 2 * n + 1) = -w[i];
            J(2 * n, i) = Interval(2.0) * w[i];
            J(2 * n, n + i) = Interval(2.0) * w[n + i];
        }
        J(2 * n + 1, n + pin) = Interval(1.0);
        return J;
    };
    IntervalVector K;
    if (!krawczyk(F, DF, z, max_iter, K))
        fail(ErrorCode::NotCertified, "Krawczyk test failed for a complex eigenvalue");
    EigenPairEnclosure e;
    e.kind = EigenPairEnclosure::Kind::ComplexPair;
    e.mu = ComplexInterval{K[2 * n], K[2 * n + 1]};
    for (std::size_t i = 0; i < n; ++i) e.v.push_back(ComplexInterval{K[i], K[n + i]});
    return e;
}

// Eigenvalue isolation for a real spectrum: Gershgorin discs of X^{-1} R X,
// with X^{-1} enclosed from an approximate inverse. Row and column discs are
// intersected when both isolate. Empty result when neither does.
std::vector<Interval> gershgorin_isolate(const IntervalMatrix& R, const Eigen::MatrixXd& X) {
    const std::size_t n = R.rows();
    const Eigen::MatrixXd Y = X.inverse();
    if (!Y.allFinite()) return {};
    const IntervalMatrix Yi = IntervalMatrix::from_point(Y);
    const IntervalMatrix E = IntervalMatrix::identity(n) - Yi * IntervalMatrix::from_point(X);
    const double delta = rowsum_norm(E);
    if (!(delta < 1.0)) return {};
    const double beta = (Interval(rowsum_norm(Yi)) * Interval(delta) / (Interval(1.0) - Interval(delta))).hi;
    const IntervalMatrix T = IntervalMatrix::ball(Y, beta) * R * IntervalMatrix::from_point(X);
    auto discs = [&](bool rows) {
        std::vector<Interval> d(n);
        for (std::size_t i = 0; i < n; ++i) {
            double rho = 0.0;
            for (std::size_t j = 0; j < n; ++j)
                if (j != i) rho = rnd::add_up(rho, rows ? T(i, j).mag() : T(j, i).mag());
            d[i] = T(i, i) + Interval(-rho, rho);
        }
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j)
                if (overlaps(d[i], d[j])) return std::vector<Interval>{};
        return d;
    };
    std::vector<Interval> r = discs(true), c = discs(false);
    if (r.empty()) return c;
    if (!c.empty())
        for (std::size_t i = 0; i < n; ++i) r[i] = intersect(r[i], c[i]);
    return r;
}

// Eigenvector of an isolated real eigenvalue lam in the interval mu: with
// v_p = 1, the remaining components solve n - 1 rows of (R - mu I) v = 0, a
// linear interval system enclosed by Krawczyk. Success also proves that the
// reduced matrix is regular, hence v_p != 0 for every matrix in R.
bool eigenvector_from_isolation(const IntervalMatrix& R, const Interval& mu, Eigen::VectorXd x, int max_iter,
                                EigenPairEnclosure& out) {
    const std::size_t n = R.rows();
    Eigen::Index pi;
    x.cwiseAbs().maxCoeff(&pi);
    const std::size_t p = std::size_t(pi);
    x /= x[pi];
    IntervalMatrix S = R;
    for (std::size_t i = 0; i < n; ++i) S(i, i) -= mu;
    const Eigen::MatrixXd Sm = S.mid();
    std::size_t q = 0;
    double best = -1.0;
    for (std::size_t cand = 0; cand < n; ++cand) {
        Eigen::MatrixXd Am(Eigen::Index(n - 1), Eigen::Index(n - 1));
        for (std::size_t i = 0, a = 0; i < n; ++i) {
            if (i == cand) continue;
            for (std::size_t j = 0, b = 0; j < n; ++j)
                if (j != p) Am(Eigen::Index(a), Eigen::Index(b++)) = Sm(Eigen::Index(i), Eigen::Index(j));
            ++a;
        }
        const Eigen::VectorXd sv = Am.jacobiSvd().singularValues();
        const double rc = n == 1 ? 1.0 : sv[sv.size() - 1] / sv[0];
        if (rc > best) {
            best = rc;
            q = cand;
        }
    }
    std::vector<std::size_t> rows, cols;
    for (std::size_t i = 0; i < n; ++i) {
        if (i != q) rows.push_back(i);
        if (i != p) cols.push_back(i);
    }
    Eigen::VectorXd z(Eigen::Index(n - 1));
    for (std::size_t b = 0; b < n - 1; ++b) z[Eigen::Index(b)] = x[Eigen::Index(cols[b])];
    Fn F = [&](const IntervalVector& w) {
        IntervalVector f(n - 1, Interval(0.0));
        for (std::size_t a = 0; a < n - 1; ++a) {
            Interval acc = S(rows[a], p);
            for (std::size_t b = 0; b < n - 1; ++b) acc += S(rows[a], cols[b]) * w[b];
            f[a] = acc;
        }
        return f;
    };
    DFn DF = [&](const IntervalVector&) {
        IntervalMatrix J(n - 1, n - 1);
        for (std::size_t a = 0; a < n - 1; ++a)
            for (std::size_t b = 0; b < n - 1; ++b) J(a, b) = S(rows[a], cols[b]);
        return J;
    };
    IntervalVector W;
    if (n > 1 && !krawczyk(F, DF, z, max_iter, W)) return false;
    IntervalVector u(n, Interval(1.0));
    for (std::size_t b = 0; b < n - 1; ++b) u[cols[b]] = W[b];
    Interval nrm(0.0);
    for (const auto& c : u) nrm += sqr(c);
    nrm = sqrt(nrm);
    out.kind = EigenPairEnclosure::Kind::Real;
    out.mu = ComplexInterval{mu, Interval(0.0)};
    out.v.clear();
    for (const auto& c : u) out.v.push_back(ComplexInterval{c / nrm, Interval(0.0)});
    return true;
}

bool disjoint(const ComplexInterval& a, const ComplexInterval& b) {
    return !overlaps(a.re, b.re) || !overlaps(a.im, b.im);
}

}  // namespace

std::vector<EigenPairEnclosure> verified_eigenpairs(const IntervalMatrix& R, const EigenOptions& opt) {
    const std::size_t n = R.rows();
    if (R.cols() != n || n == 0) fail(ErrorCode::DimensionMismatch, "eigenpairs need a square matrix");
    const Eigen::MatrixXd Rm = R.mid();
    Eigen::EigenSolver<Eigen::MatrixXd> es(Rm);
    if (es.info() != Eigen::Success) fail(ErrorCode::NotCertified, "midpoint eigendecomposition failed");
    const Eigen::VectorXcd lam = es.eigenvalues();
    const Eigen::MatrixXcd V = es.eigenvectors();
    const double sep = opt.sep_tol * std::max(1.0, rowsum_norm(R));
    for (Eigen::Index i = 0; i < lam.size(); ++i)
        for (Eigen::Index j = i + 1; j < lam.size(); ++j)
            if (std::abs(lam[i] - lam[j]) <= sep)
                fail(ErrorCode::DegenerateSpectrum, "midpoint eigenvalues are not separated");

    bool all_real = true;
    for (Eigen::Index i = 0; i < lam.size(); ++i) all_real = all_real && lam[i].imag() == 0.0;
    std::vector<Interval> isolated;
    bool isolation_tried = false;

    std::vector<EigenPairEnclosure> out;
    for (Eigen::Index i = 0; i < lam.size(); ++i) {
        if (lam[i].imag() == 0.0) {
            try {
                out.push_back(certify_real(R, lam[i].real(), V.col(i).real(), opt.max_iter));
            } catch (const Error& e) {
                if (e.code() != ErrorCode::NotCertified || !all_real) throw;
                // The joint test fails when the eigenvector is poorly conditioned;
                // isolate the eigenvalue first and enclose the vector linearly.
                if (!isolation_tried) {
                    isolation_tried = true;
                    isolated = gershgorin_isolate(R, V.real());
                }
                EigenPairEnclosure pe;
                if (isolated.empty() ||
                    !eigenvector_from_isolation(R, isolated[std::size_t(i)], V.col(i).real(), opt.max_iter, pe))
                    throw;
                log_debug("eigenvalue near " + std::to_string(lam[i].real()) + " certified by isolation");
                out.push_back(std::move(pe));
            }
        } else if (lam[i].imag() > 0) {
            EigenPairEnclosure e = certify_complex(R, lam[i], V.col(i), opt.max_iter);
            EigenPairEnclosure c = e;
            c.mu = e.mu.conj();
            for (auto& x : c.v) x = x.conj();
            out.push_back(e);
            out.push_back(c);
        }
    }
    for (std::size_t i = 0; i < out.size(); ++i)
        for (std::size_t j = i + 1; j < out.size(); ++j)
            if (!disjoint(out[i].mu, out[j].mu))
                fail(ErrorCode::DegenerateSpectrum, "eigenvalue enclosures overlap");
    return out;
}

double default_trivial_tol(const IntervalMatrix& R) { return rnd::mul_up(1e-6, rowsum_norm(R)); }

ExponentClassification classify(const std::vector<EigenPairEnclosure>& pairs, const Interval& tau,
                                double trivial_tol) {
    if (!(tau.lo > 0)) fail(ErrorCode::InvalidArgument, "period must be positive");
    if (!(trivial_tol >= 0)) fail(ErrorCode::InvalidArgument, "trivial tolerance must be nonnegative");
    ExponentClassification c;
    c.pairs = pairs;
    const Interval band(-trivial_tol, trivial_tol);
    long trivial = -1;
    int candidates = 0;
    for (std::size_t j = 0; j < pairs.size(); ++j) {
        c.lyapunov.push_back(pairs[j].mu.re);
        if (overlaps(pairs[j].mu.re, band)) {
            ++candidates;
            trivial = long(j);
        }
    }
    if (candidates != 1)
        fail(ErrorCode::AmbiguousTrivial,
             std::to_string(candidates) + " exponents are compatible with the trivial multiplier");
    for (std::size_t j = 0; j < pairs.size(); ++j) {
        if (long(j) == trivial)
            c.labels.push_back(ExponentLabel::Trivial);
        else if (c.lyapunov[j].hi < 0)
            c.labels.push_back(ExponentLabel::Stable);
        else
            c.labels.push_back(ExponentLabel::Unstable);
    }
    return c;
}

}  // namespace floquet
