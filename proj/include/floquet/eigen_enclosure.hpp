#pragma once

#include <string>
#include <vector>

#include "floquet/interval_matrix.hpp"

namespace floquet {

struct EigenPairEnclosure {
    enum class Kind { Real, ComplexPair };
    ComplexInterval mu;
    std::vector<ComplexInterval> v;  // |v|^2 = 1
    Kind kind = Kind::Real;
};

enum class ExponentLabel { Stable, Trivial, Unstable };
const char* label_name(ExponentLabel l);

struct ExponentClassification {
    std::vector<EigenPairEnclosure> pairs;
    std::vector<ExponentLabel> labels;
    std::vector<Interval> lyapunov;  // Re(mu_j)
};

struct EigenOptions {
    // Midpoint eigenvalues closer than sep_tol * max(1, |R|_inf) are rejected.
    double sep_tol = 1e-8;
    int max_iter = 30;
};

// One certified enclosure per eigenvalue of every matrix in R, via a
// Krawczyk test on F(mu, v) = ((R - mu I) v, |v|^2 - 1); complex pairs carry
// a phase pin on the largest midpoint component.
std::vector<EigenPairEnclosure> verified_eigenpairs(const IntervalMatrix& R, const EigenOptions& opt = {});

// trivial_tol >= 0; default_trivial_tol gives 1e-6 |R|_inf.
ExponentClassification classify(const std::vector<EigenPairEnclosure>& pairs, const Interval& tau,
                                double trivial_tol);
double default_trivial_tol(const IntervalMatrix& R);

}  // namespace floquet
