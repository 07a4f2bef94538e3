#pragma once

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <iosfwd>
#include <limits>
#include <string>

#include "floquet/errors.hpp"

namespace floquet {

// Directed rounding without touching the FPU mode: each primitive computes the
// round-to-nearest result, recovers the exact error with an error-free
// transform and steps one ulp only when the result is inexact in the wrong
// direction.
namespace rnd {

inline constexpr double kInf = std::numeric_limits<double>::infinity();
// Below this magnitude the fma residual may itself underflow.
inline constexpr double kTiny = 0x1p-960;

inline double up(double x) { return std::nextafter(x, kInf); }
inline double down(double x) { return std::nextafter(x, -kInf); }

inline double add_up(double a, double b) {
    double s = a + b;
    if (std::isinf(s)) return (s > 0 || std::isinf(a) || std::isinf(b)) ? s : -DBL_MAX;
    double bb = s - a;
    double err = (a - (s - bb)) + (b - bb);
    return err > 0 ? up(s) : s;
}
inline double add_down(double a, double b) { return -add_up(-a, -b); }
inline double sub_up(double a, double b) { return add_up(a, -b); }
inline double sub_down(double a, double b) { return add_down(a, -b); }

inline double mul_up(double a, double b) {
    double p = a * b;
    if (a == 0 || b == 0) return p == 0 ? 0.0 : p;
    if (std::isinf(p)) return (p > 0 || std::isinf(a) || std::isinf(b)) ? p : -DBL_MAX;
    if (std::fabs(p) < kTiny) return up(p);
    double e = std::fma(a, b, -p);
    return e > 0 ? up(p) : p;
}
inline double mul_down(double a, double b) { return -mul_up(-a, b); }

inline double div_up(double a, double b) {
    double q = a / b;
    if (a == 0) return 0.0;
    if (std::isinf(q)) return (q > 0 || std::isinf(a)) ? q : -DBL_MAX;
    if (std::isinf(b)) return q;
    if (std::fabs(q) < kTiny) return up(q);
    double r = std::fma(-q, b, a);
    bool above = (r > 0) == (b > 0);
    return (r != 0 && above) ? up(q) : q;
}
inline double div_down(double a, double b) { return -div_up(-a, b); }

inline double sqrt_up(double a) {
    double s = std::sqrt(a);
    if (a == 0 || std::isinf(a)) return s;
    double r = std::fma(-s, s, a);
    return r > 0 ? up(s) : s;
}
inline double sqrt_down(double a) {
    double s = std::sqrt(a);
    if (a == 0 || std::isinf(a)) return s;
    double r = std::fma(-s, s, a);
    return r < 0 ? down(s) : s;
}

}  // namespace rnd

struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    constexpr Interval() = default;
    constexpr Interval(double x) : lo(x), hi(x) {}  // NOLINT: points convert implicitly
    Interval(double l, double h) : lo(l), hi(h) {
        if (!(l <= h)) fail(ErrorCode::InvalidArgument, "interval with lo > hi");
    }

    static Interval hull(double a, double b) { return {std::min(a, b), std::max(a, b)}; }
    static Interval ball(double c, double r) {
        return {rnd::sub_down(c, r), rnd::add_up(c, r)};
    }
    static Interval entire() { return {-rnd::kInf, rnd::kInf}; }

    double mid() const {
        if (lo == -hi) return 0.0;
        double m = 0.5 * lo + 0.5 * hi;
        return std::clamp(m, lo, hi);
    }
    // Upper bound on max(mid - lo, hi - mid).
    double rad() const {
        double m = mid();
        return std::max(rnd::sub_up(m, lo), rnd::sub_up(hi, m));
    }
    double width() const { return rnd::sub_up(hi, lo); }
    double mag() const { return std::max(std::fabs(lo), std::fabs(hi)); }
    double mig() const { return (lo <= 0 && hi >= 0) ? 0.0 : std::min(std::fabs(lo), std::fabs(hi)); }
    bool contains(double x) const { return lo <= x && x <= hi; }
    bool contains(const Interval& o) const { return lo <= o.lo && o.hi <= hi; }
    bool contains_zero() const { return lo <= 0 && 0 <= hi; }
    bool interior_contains(const Interval& o) const { return lo < o.lo && o.hi < hi; }
    bool is_point() const { return lo == hi; }
    bool finite() const { return std::isfinite(lo) && std::isfinite(hi); }

    Interval& operator+=(const Interval& b);
    Interval& operator-=(const Interval& b);
    Interval& operator*=(const Interval& b);
    Interval& operator/=(const Interval& b);
};

inline Interval operator-(const Interval& a) { return {-a.hi, -a.lo}; }
inline Interval operator+(const Interval& a, const Interval& b) {
    return {rnd::add_down(a.lo, b.lo), rnd::add_up(a.hi, b.hi)};
}
inline Interval operator-(const Interval& a, const Interval& b) {
    return {rnd::sub_down(a.lo, b.hi), rnd::sub_up(a.hi, b.lo)};
}
inline Interval operator*(const Interval& a, const Interval& b) {
    if (a.lo >= 0 && b.lo >= 0) return {rnd::mul_down(a.lo, b.lo), rnd::mul_up(a.hi, b.hi)};
    double l = std::min({rnd::mul_down(a.lo, b.lo), rnd::mul_down(a.lo, b.hi),
                         rnd::mul_down(a.hi, b.lo), rnd::mul_down(a.hi, b.hi)});
    double h = std::max({rnd::mul_up(a.lo, b.lo), rnd::mul_up(a.lo, b.hi),
                         rnd::mul_up(a.hi, b.lo), rnd::mul_up(a.hi, b.hi)});
    return {l, h};
}
inline Interval operator/(const Interval& a, const Interval& b) {
    if (b.contains_zero()) fail(ErrorCode::DivisionByZeroInterval, "divisor interval contains 0");
    double l = std::min({rnd::div_down(a.lo, b.lo), rnd::div_down(a.lo, b.hi),
                         rnd::div_down(a.hi, b.lo), rnd::div_down(a.hi, b.hi)});
    double h = std::max({rnd::div_up(a.lo, b.lo), rnd::div_up(a.lo, b.hi),
                         rnd::div_up(a.hi, b.lo), rnd::div_up(a.hi, b.hi)});
    return {l, h};
}
inline Interval& Interval::operator+=(const Interval& b) { return *this = *this + b; }
inline Interval& Interval::operator-=(const Interval& b) { return *this = *this - b; }
inline Interval& Interval::operator*=(const Interval& b) { return *this = *this * b; }
inline Interval& Interval::operator/=(const Interval& b) { return *this = *this / b; }

enum class Op { Add, Sub, Mul, Div };
Interval iv_arith(const Interval& a, const Interval& b, Op op);

inline bool operator==(const Interval& a, const Interval& b) { return a.lo == b.lo && a.hi == b.hi; }

inline Interval hull(const Interval& a, const Interval& b) {
    return {std::min(a.lo, b.lo), std::max(a.hi, b.hi)};
}
// Empty intersection raises.
Interval intersect(const Interval& a, const Interval& b);
inline bool overlaps(const Interval& a, const Interval& b) { return a.lo <= b.hi && b.lo <= a.hi; }

inline Interval abs(const Interval& a) { return {a.mig(), a.mag()}; }
inline Interval sqr(const Interval& a) {
    double g = a.mig(), m = a.mag();
    return {rnd::mul_down(g, g), rnd::mul_up(m, m)};
}
Interval sqrt(const Interval& a);
Interval exp(const Interval& a);
Interval log(const Interval& a);
// x^p for x > 0; integer exponents use repeated products.
Interval pow(const Interval& x, double p);
Interval pown(const Interval& x, int p);
Interval sinpi(const Interval& a);
Interval cospi(const Interval& a);
Interval sin(const Interval& a);
Interval cos(const Interval& a);

const Interval& pi();
const Interval& ln2();

// Upward-rounded helpers for scalar bounds that are consumed as upper bounds.
inline double up_add(double a, double b) { return rnd::add_up(a, b); }
inline double up_mul(double a, double b) { return rnd::mul_up(a, b); }
inline double up_div(double a, double b) { return rnd::div_up(a, b); }

std::ostream& operator<<(std::ostream& os, const Interval& x);

struct ComplexInterval {
    Interval re;
    Interval im;

    ComplexInterval() = default;
    ComplexInterval(Interval r, Interval i = Interval(0.0)) : re(r), im(i) {}

    // Upper bound of |z| over the rectangle.
    double abs_upper() const;
    ComplexInterval conj() const { return {re, -im}; }
    bool contains(double r, double i) const { return re.contains(r) && im.contains(i); }
};

inline ComplexInterval operator+(const ComplexInterval& a, const ComplexInterval& b) {
    return {a.re + b.re, a.im + b.im};
}
inline ComplexInterval operator-(const ComplexInterval& a, const ComplexInterval& b) {
    return {a.re - b.re, a.im - b.im};
}
inline ComplexInterval operator-(const ComplexInterval& a) { return {-a.re, -a.im}; }
inline ComplexInterval operator*(const ComplexInterval& a, const ComplexInterval& b) {
    return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
}
inline ComplexInterval operator*(const Interval& a, const ComplexInterval& b) {
    return {a * b.re, a * b.im};
}

// Decimal conversion. Parsing rounds outward; formatting of an endpoint is
// exact so that a stored interval survives a round trip unchanged.
double parse_decimal_down(const std::string& s);
double parse_decimal_up(const std::string& s);
Interval parse_decimal(const std::string& s);
std::string exact_decimal(double x);
std::string shortest_decimal(double x);

}  // namespace floquet
