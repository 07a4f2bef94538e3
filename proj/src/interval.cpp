#include "floquet/interval.hpp"

#include <array>
#include <cerrno>
#include <cfenv>
#include <charconv>
#include <cstdlib>
#include <ostream>
#include <system_error>

namespace floquet {

const char* error_name(ErrorCode c) {
    switch (c) {
        case ErrorCode::DivisionByZeroInterval: return "DivisionByZeroInterval";
        case ErrorCode::DimensionMismatch: return "DimensionMismatch";
        case ErrorCode::DecayTooWeak: return "DecayTooWeak";
        case ErrorCode::DomainError: return "DomainError";
        case ErrorCode::UnsupportedField: return "UnsupportedField";
        case ErrorCode::MalformedInput: return "MalformedInput";
        case ErrorCode::NoConvergence: return "NoConvergence";
        case ErrorCode::SingularJacobian: return "SingularJacobian";
        case ErrorCode::LogBranchFailure: return "LogBranchFailure";
        case ErrorCode::NotCertifiablyInvertible: return "NotCertifiablyInvertible";
        case ErrorCode::NoDominanceBelowCutoff: return "NoDominanceBelowCutoff";
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::VerificationFailed: return "VerificationFailed";
        case ErrorCode::DegenerateSpectrum: return "DegenerateSpectrum";
        case ErrorCode::NotCertified: return "NotCertified";
        case ErrorCode::AmbiguousTrivial: return "AmbiguousTrivial";
        case ErrorCode::InconsistentRatios: return "InconsistentRatios";
        case ErrorCode::Io: return "Io";
    }
    return "Unknown";
}

Interval iv_arith(const Interval& a, const Interval& b, Op op) {
    switch (op) {
        case Op::Add: return a + b;
        case Op::Sub: return a - b;
        case Op::Mul: return a * b;
        case Op::Div: return a / b;
    }
    return Interval::entire();
}

Interval intersect(const Interval& a, const Interval& b) {
    double l = std::max(a.lo, b.lo), h = std::min(a.hi, b.hi);
    if (l > h) fail(ErrorCode::InvalidArgument, "empty interval intersection");
    return {l, h};
}

const Interval& pi() {
    static const Interval v(0x1.921fb54442d18p+1, 0x1.921fb54442d19p+1);
    return v;
}

const Interval& ln2() {
    static const Interval v(0x1.62e42fefa39efp-1, 0x1.62e42fefa39f0p-1);
    return v;
}

Interval sqrt(const Interval& a) {
    if (a.hi < 0) fail(ErrorCode::DomainError, "sqrt of negative interval");
    double l = a.lo <= 0 ? 0.0 : rnd::sqrt_down(a.lo);
    return {l, rnd::sqrt_up(a.hi)};
}

namespace {

// Enclosure of e^x for a point x.
Interval exp_point(double x) {
    if (std::isnan(x)) fail(ErrorCode::DomainError, "exp of NaN");
    if (x > 709.0) return {DBL_MAX, rnd::kInf};
    if (x < -744.0) return {0.0, DBL_TRUE_MIN};
    if (x == 0) return Interval(1.0);
    double n = std::nearbyint(x / 0x1.62e42fefa39efp-1);
    Interval y = Interval(x) - Interval(n) * ln2();
    // Horner form of sum_{i<=N} y^i/i!, remainder |y|^{N+1}/(N+1)! * e^{|y|}.
    const int N = 22;
    Interval p(1.0);
    for (int i = N; i >= 1; --i) p = Interval(1.0) + y * p / Interval(double(i));
    double ym = y.mag();
    double rem = 2.0;  // e^{|y|} < 2 for |y| < 0.36
    for (int i = 1; i <= N + 1; ++i) rem = rnd::div_up(rnd::mul_up(rem, ym), double(i));
    p = p + Interval(-rem, rem);
    int e = int(n);
    double lo = std::ldexp(std::max(p.lo, 0.0), e);
    double hi = std::ldexp(p.hi, e);
    if (lo < DBL_MIN) lo = std::max(0.0, rnd::down(lo));
    if (hi < DBL_MIN) hi = rnd::up(hi);
    return {lo, hi};
}

Interval log_point(double x) {
    if (!(x > 0)) fail(ErrorCode::DomainError, "log of non-positive value");
    if (x == 1.0) return Interval(0.0);
    double l = std::log(x);
    double slack = std::max(std::fabs(l), 1.0) * 0x1p-51;
    double lo = l - slack, hi = l + slack;
    for (int it = 0; it < 60; ++it) {
        bool ok_lo = exp_point(lo).hi <= x;
        bool ok_hi = exp_point(hi).lo >= x;
        if (ok_lo && ok_hi) return {lo, hi};
        slack *= 2;
        if (!ok_lo) lo = l - slack;
        if (!ok_hi) hi = l + slack;
    }
    fail(ErrorCode::DomainError, "log enclosure did not certify");
}

// sin(pi*y), cos(pi*y) for |y| around 1/4 or less.
Interval sinpi_small(const Interval& y) {
    Interval t = pi() * y;
    Interval t2 = sqr(t);
    const int N = 12;
    Interval p(1.0);
    for (int i = N; i >= 1; --i) p = Interval(1.0) - t2 * p / Interval(double((2 * i) * (2 * i + 1)));
    p = t * p;
    double tm = t.mag();
    double rem = 1.0;
    for (int i = 1; i <= 2 * N + 3; ++i) rem = rnd::div_up(rnd::mul_up(rem, tm), double(i));
    return p + Interval(-rem, rem);
}

Interval cospi_small(const Interval& y) {
    Interval t = pi() * y;
    Interval t2 = sqr(t);
    const int N = 12;
    Interval p(1.0);
    for (int i = N; i >= 1; --i) p = Interval(1.0) - t2 * p / Interval(double((2 * i - 1) * (2 * i)));
    double tm = t.mag();
    double rem = 1.0;
    for (int i = 1; i <= 2 * N + 2; ++i) rem = rnd::div_up(rnd::mul_up(rem, tm), double(i));
    return p + Interval(-rem, rem);
}

Interval clamp_unit(const Interval& v) { return {std::max(v.lo, -1.0), std::min(v.hi, 1.0)}; }

// Quarter-period reduction: x = q/2 + y.
void reduce_quarter(const Interval& x, int& q, Interval& y) {
    double n = std::nearbyint(2.0 * x.mid());
    y = x - Interval(n * 0.5);
    double r = std::fmod(n, 4.0);
    if (r < 0) r += 4.0;
    q = int(r);
}

}  // namespace

Interval exp(const Interval& a) {
    if (a.is_point()) return exp_point(a.lo);
    return {exp_point(a.lo).lo, exp_point(a.hi).hi};
}

Interval log(const Interval& a) {
    if (!(a.lo > 0)) fail(ErrorCode::DomainError, "log of interval touching 0");
    if (a.is_point()) return log_point(a.lo);
    return {log_point(a.lo).lo, log_point(a.hi).hi};
}

namespace {
double pown_up_nonneg(double a, unsigned p) {
    double r = 1.0, b = a;
    while (p) {
        if (p & 1u) r = rnd::mul_up(r, b);
        p >>= 1;
        if (p) b = rnd::mul_up(b, b);
    }
    return r;
}
double pown_down_nonneg(double a, unsigned p) {
    double r = 1.0, b = a;
    while (p) {
        if (p & 1u) r = rnd::mul_down(r, b);
        p >>= 1;
        if (p) b = rnd::mul_down(b, b);
    }
    return r;
}
}  // namespace

Interval pown(const Interval& x, int p) {
    if (p == 0) return Interval(1.0);
    if (p < 0) return Interval(1.0) / pown(x, -p);
    unsigned u = unsigned(p);
    if (p % 2 == 0) {
        Interval a = abs(x);
        return {pown_down_nonneg(a.lo, u), pown_up_nonneg(a.hi, u)};
    }
    auto down = [&](double v) { return v >= 0 ? pown_down_nonneg(v, u) : -pown_up_nonneg(-v, u); };
    auto up = [&](double v) { return v >= 0 ? pown_up_nonneg(v, u) : -pown_down_nonneg(-v, u); };
    return {down(x.lo), up(x.hi)};
}

Interval pow(const Interval& x, double p) {
    if (p == std::nearbyint(p) && std::fabs(p) <= 1 << 20) return pown(x, int(p));
    if (!(x.lo > 0)) fail(ErrorCode::DomainError, "non-integer power of interval touching 0");
    return exp(Interval(p) * log(x));
}

Interval sinpi(const Interval& a) {
    if (!a.finite() || a.width() >= 1.0) return {-1.0, 1.0};
    int q;
    Interval y;
    reduce_quarter(a, q, y);
    Interval r;
    switch (q) {
        case 0: r = sinpi_small(y); break;
        case 1: r = cospi_small(y); break;
        case 2: r = -sinpi_small(y); break;
        default: r = -cospi_small(y); break;
    }
    return clamp_unit(r);
}

Interval cospi(const Interval& a) {
    if (!a.finite() || a.width() >= 1.0) return {-1.0, 1.0};
    int q;
    Interval y;
    reduce_quarter(a, q, y);
    Interval r;
    switch (q) {
        case 0: r = cospi_small(y); break;
        case 1: r = -sinpi_small(y); break;
        case 2: r = -cospi_small(y); break;
        default: r = sinpi_small(y); break;
    }
    return clamp_unit(r);
}

Interval sin(const Interval& a) { return sinpi(a / pi()); }
Interval cos(const Interval& a) { return cospi(a / pi()); }

double ComplexInterval::abs_upper() const {
    double r = re.mag(), i = im.mag();
    return rnd::sqrt_up(rnd::add_up(rnd::mul_up(r, r), rnd::mul_up(i, i)));
}

std::ostream& operator<<(std::ostream& os, const Interval& x) {
    return os << '[' << shortest_decimal(x.lo) << ", " << shortest_decimal(x.hi) << ']';
}

namespace {
double parse_directed(const std::string& s, int mode) {
    if (s.empty()) fail(ErrorCode::MalformedInput, "empty decimal string");
    int old = std::fegetround();
    std::fesetround(mode);
    errno = 0;
    char* end = nullptr;
    double v = std::strtod(s.c_str(), &end);
    std::fesetround(old);
    if (end != s.c_str() + s.size()) fail(ErrorCode::MalformedInput, "not a decimal number: '" + s + "'");
    if (std::isnan(v)) fail(ErrorCode::MalformedInput, "NaN in decimal string");
    return v;
}
}  // namespace

double parse_decimal_down(const std::string& s) { return parse_directed(s, FE_DOWNWARD); }
double parse_decimal_up(const std::string& s) { return parse_directed(s, FE_UPWARD); }
Interval parse_decimal(const std::string& s) { return {parse_decimal_down(s), parse_decimal_up(s)}; }

std::string shortest_decimal(double x) {
    std::array<char, 64> buf{};
    auto res = std::to_chars(buf.data(), buf.data() + buf.size(), x);
    return std::string(buf.data(), res.ptr);
}

std::string exact_decimal(double x) {
    std::string s = shortest_decimal(x);
    if (!std::isfinite(x)) return s;
    if (parse_decimal_down(s) == x && parse_decimal_up(s) == x) return s;
    std::array<char, 1200> buf{};
    auto res = std::to_chars(buf.data(), buf.data() + buf.size(), x, std::chars_format::scientific, 1100);
    std::string full(buf.data(), res.ptr);
    auto epos = full.find('e');
    std::string mant = full.substr(0, epos), ex = full.substr(epos);
    while (!mant.empty() && mant.back() == '0') mant.pop_back();
    if (!mant.empty() && mant.back() == '.') mant.pop_back();
    return mant + ex;
}

}  // namespace floquet
