#include "floquet/sequence.hpp"

#include "floquet/tail_constants.hpp"

namespace floquet {

Interval weight_pow(long k, double s) { return pow(Interval(double(weight(k))), s); }

double inv_weight_pow_up(long k, double s) {
    if (weight(k) == 1) return 1.0;
    return (Interval(1.0) / weight_pow(k, s)).hi;
}

MatrixFourierSeq::MatrixFourierSeq(std::size_t n_, Interval tau, std::size_t count)
    : n(n_), half_period(tau), coeffs(count, CoeffPair{IntervalMatrix(n_, n_), IntervalMatrix(n_, n_)}) {}

void MatrixFourierSeq::validate() const {
    if (tail.C < 0) fail(ErrorCode::InvalidArgument, "tail constant must be nonnegative");
    if (tail.s < 2) fail(ErrorCode::InvalidArgument, "tail decay rate must be at least 2");
    if (!(half_period.lo > 0)) fail(ErrorCode::InvalidArgument, "half period must be positive");
    for (const auto& c : coeffs)
        if (c.re.rows() != n || c.re.cols() != n || c.im.rows() != n || c.im.cols() != n)
            fail(ErrorCode::DimensionMismatch, "coefficient matrix has wrong size");
    if (!coeffs.empty() && !coeffs[0].im.is_zero())
        fail(ErrorCode::InvalidArgument, "zeroth coefficient must be real");
}

bool MatrixFourierSeq::structurally_zero(long k) const {
    long a = k < 0 ? -k : k;
    return (odd_vanish && a % 2 == 1) || (std::size_t(a) >= coeffs.size() && tail.C == 0);
}

CoeffPair MatrixFourierSeq::at(long k) const {
    long a = k < 0 ? -k : k;
    if (std::size_t(a) < coeffs.size()) {
        if (k >= 0) return coeffs[std::size_t(a)];
        return conj(coeffs[std::size_t(a)]);
    }
    CoeffPair c{IntervalMatrix(n, n), IntervalMatrix(n, n)};
    if (tail.C == 0 || (odd_vanish && a % 2 == 1)) return c;
    double b = rnd::mul_up(tail.C, inv_weight_pow_up(a, tail.s));
    for (auto& x : c.re.data()) x = Interval(-b, b);
    for (auto& x : c.im.data()) x = Interval(-b, b);
    return c;
}

double MatrixFourierSeq::modulus_bound(long k) const {
    long a = k < 0 ? -k : k;
    if (std::size_t(a) < coeffs.size()) {
        const auto& c = coeffs[std::size_t(a)];
        double m = 0.0;
        for (std::size_t i = 0; i < c.re.data().size(); ++i)
            m = std::max(m, ComplexInterval(c.re.data()[i], c.im.data()[i]).abs_upper());
        return m;
    }
    if (tail.C == 0 || (odd_vanish && a % 2 == 1)) return 0.0;
    return rnd::mul_up(tail.C, inv_weight_pow_up(a, tail.s));
}

double MatrixFourierSeq::rowsum_bound(long k) const {
    long a = k < 0 ? -k : k;
    if (std::size_t(a) < coeffs.size()) {
        const auto& c = coeffs[std::size_t(a)];
        double best = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double s = 0.0;
            for (std::size_t j = 0; j < n; ++j) s = rnd::add_up(s, rnd::add_up(c.re(i, j).mag(), c.im(i, j).mag()));
            best = std::max(best, s);
        }
        return best;
    }
    // |Re| + |Im| <= sqrt(2) |z| entrywise.
    double m = modulus_bound(k);
    return rnd::mul_up(rnd::mul_up(double(n), m), rnd::sqrt_up(2.0));
}

double tail_sup(const MatrixFourierSeq& x, long j0, double s) {
    if (j0 < 0) j0 = 0;
    double best = 0.0;
    for (std::size_t j = std::size_t(j0); j < x.size(); ++j)
        best = std::max(best, rnd::mul_up(x.modulus_bound(long(j)), weight_pow(long(j), s).hi));
    if (x.tail.C > 0) {
        if (s > x.tail.s) fail(ErrorCode::DecayTooWeak, "requested decay exceeds the tail decay");
        long first = std::max<long>(long(x.size()), j0);
        if (x.odd_vanish && first % 2 == 1) ++first;
        // C w^{s - s_tail} is largest at the first tail index.
        double f = first <= 1 ? 1.0 : (Interval(1.0) / weight_pow(first, x.tail.s - s)).hi;
        best = std::max(best, rnd::mul_up(x.tail.C, std::min(f, 1.0)));
    }
    return best;
}

double s_norm_bound(const MatrixFourierSeq& x, double s) {
    if (x.tail.C > 0 && s > x.tail.s) fail(ErrorCode::DecayTooWeak, "requested decay exceeds the tail decay");
    return tail_sup(x, 0, s);
}

CoeffPair conj(const CoeffPair& a) { return {a.re, -a.im}; }

CoeffPair complex_product(const CoeffPair& a, const CoeffPair& b) {
    const std::size_t n = a.re.rows(), p = a.re.cols(), q = b.re.cols();
    if (p != b.re.rows()) fail(ErrorCode::DimensionMismatch, "complex product dimensions differ");
    CoeffPair c{IntervalMatrix(n, q), IntervalMatrix(n, q)};
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < q; ++j) {
            Interval re(0.0), im(0.0);
            for (std::size_t k = 0; k < p; ++k) {
                const Interval &ar = a.re(i, k), &ai = a.im(i, k), &br = b.re(k, j), &bi = b.im(k, j);
                re += ar * br - ai * bi;
                im += ar * bi + ai * br;
            }
            c.re(i, j) = re;
            c.im(i, j) = im;
        }
    return c;
}

double tail_sum_bound(long N, double s) {
    if (N < 1) fail(ErrorCode::DomainError, "tail sum needs N >= 1");
    if (N == 1) return rnd::add_up(1.0, zeta(1, s));
    return zeta(N - 1, s);
}

CoeffPair convolve(const MatrixFourierSeq& A, const MatrixFourierSeq& Q, long k, long cutoff) {
    if (A.n != Q.n) fail(ErrorCode::DimensionMismatch, "convolution of sequences of different size");
    const std::size_t n = A.n;
    CoeffPair acc{IntervalMatrix(n, n), IntervalMatrix(n, n)};
    for (long l = -cutoff; l <= cutoff; ++l) {
        long j = k - l;
        if (A.structurally_zero(j) || Q.structurally_zero(l)) continue;
        CoeffPair t = complex_product(A.at(j), Q.at(l));
        acc.re = acc.re + t.re;
        acc.im = acc.im + t.im;
    }
    // Remainder over |l| > cutoff: n sup|A_j| sum |Q_l|.
    double qsum = 0.0;
    long first_tail = std::max<long>(long(Q.size()), cutoff + 1);
    for (long l = cutoff + 1; l < long(Q.size()); ++l) qsum = rnd::add_up(qsum, Q.modulus_bound(l));
    if (Q.tail.C > 0) qsum = rnd::add_up(qsum, rnd::mul_up(Q.tail.C, tail_sum_bound(first_tail, Q.tail.s)));
    if (qsum > 0) {
        double amax = tail_sup(A, 0, 0.0);
        double b = rnd::mul_up(rnd::mul_up(2.0 * double(n), amax), qsum);
        for (auto& x : acc.re.data()) x += Interval(-b, b);
        for (auto& x : acc.im.data()) x += Interval(-b, b);
    }
    return acc;
}

IntervalMatrix eval_at(const MatrixFourierSeq& Q, const Interval& theta) {
    const std::size_t n = Q.n;
    IntervalMatrix out(n, n);
    if (Q.size() > 0) out = Q.coeffs[0].re;
    Interval x = theta / Q.half_period;
    for (std::size_t k = 1; k < Q.size(); ++k) {
        Interval ang = Interval(double(k)) * x;
        Interval c = cospi(ang), s = sinpi(ang);
        const auto& q = Q.coeffs[k];
        for (std::size_t e = 0; e < n * n; ++e)
            out.data()[e] += Interval(2.0) * (q.re.data()[e] * c - q.im.data()[e] * s);
    }
    if (Q.tail.C > 0) {
        long N = std::max<long>(long(Q.size()), 1);
        double b = rnd::mul_up(2.0 * Q.tail.C, tail_sum_bound(N, Q.tail.s));
        for (auto& e : out.data()) e += Interval(-b, b);
    }
    return out;
}

CoeffPair eval_full_series(const MatrixFourierSeq& Q, const Interval& theta) {
    const std::size_t n = Q.n;
    CoeffPair out{IntervalMatrix(n, n), IntervalMatrix(n, n)};
    Interval x = theta / Q.half_period;
    long N = long(Q.size());
    for (long k = -(N - 1); k <= N - 1; ++k) {
        CoeffPair q = Q.at(k);
        Interval ang = Interval(double(k)) * x;
        Interval c = cospi(ang), s = sinpi(ang);
        for (std::size_t e = 0; e < n * n; ++e) {
            out.re.data()[e] += q.re.data()[e] * c - q.im.data()[e] * s;
            out.im.data()[e] += q.re.data()[e] * s + q.im.data()[e] * c;
        }
    }
    return out;
}

double ball_tail_bound(double r, double s, long k) {
    if (r < 0) fail(ErrorCode::InvalidArgument, "negative radius");
    if (r == 0) return 0.0;
    return rnd::mul_up(r, inv_weight_pow_up(k, s));
}

}  // namespace floquet
