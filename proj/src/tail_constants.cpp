#include "floquet/tail_constants.hpp"

#include <string>

#include "floquet/errors.hpp"
#include "floquet/interval.hpp"

namespace floquet {

namespace {

Interval ipow(double base, double s) { return pow(Interval(base), s); }

}  // namespace

double zeta(long M, double s) {
    if (M < 1) fail(ErrorCode::DomainError, "zeta needs M >= 1, got " + std::to_string(M));
    if (!(s > 1)) fail(ErrorCode::DomainError, "zeta needs s > 1");
    Interval a = Interval(1.0) / ipow(double(M + 1), s);
    Interval b = Interval(1.0) / ipow(double(M + 2), s);
    Interval c = Interval(1.0) / ((Interval(s) - 1.0) * ipow(double(M + 2), s - 1.0));
    return (a + b + c).hi;
}

double eta(long k, double s) {
    if (k < 3) fail(ErrorCode::DomainError, "eta needs k >= 3, got " + std::to_string(k));
    if (s < 2) fail(ErrorCode::DomainError, "eta needs s >= 2");
    const Interval K{double(k)};
    Interval first = Interval(2.0) * pow(K / (K - 1.0), s);
    Interval bracket = Interval(4.0) * log(K - 2.0) / K + (sqr(pi()) - 6.0) / 3.0;
    Interval factor = pow(Interval(2.0) / K + 0.5, s - 2.0);
    return (first + bracket * factor).hi;
}

double convolution_constant_C1(long M, double s) {
    if (M < 3) fail(ErrorCode::DomainError, "C1 needs M >= 3");
    Interval sum(0.0);
    for (long l = 1; l <= M; ++l) sum += Interval(1.0) / ipow(double(l), s);
    Interval c = Interval(2.0) + Interval(2.0) * sum +
                 Interval(2.0) / (ipow(double(M), s - 1.0) * (Interval(s) - 1.0)) + eta(M, s) - 1.0;
    return c.hi;
}

}  // namespace floquet
