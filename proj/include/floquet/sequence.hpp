#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "floquet/interval_matrix.hpp"

namespace floquet {

inline long weight(long k) { return k < 0 ? -k : (k == 0 ? 1 : k); }
// Enclosure of w_k^s.
Interval weight_pow(long k, double s);
// Upper bound of w_k^{-s}.
double inv_weight_pow_up(long k, double s);

// Real and imaginary parts of one complex coefficient matrix.
struct CoeffPair {
    IntervalMatrix re;
    IntervalMatrix im;
};

struct TailBound {
    double C = 0.0;
    double s = 2.0;
};

// Matrix Fourier sequence over the basis e^{i k (pi/tau) t}, k in Z, with
// conjugate symmetry implied for k < 0.
class MatrixFourierSeq {
public:
    std::size_t n = 0;
    Interval half_period{1.0};
    std::vector<CoeffPair> coeffs;  // k = 0..N-1; coeffs[0].im is zero
    TailBound tail;
    // Odd-indexed coefficients vanish identically, tail included.
    bool odd_vanish = false;

    MatrixFourierSeq() = default;
    MatrixFourierSeq(std::size_t n_, Interval tau, std::size_t count);

    std::size_t size() const { return coeffs.size(); }
    // Coefficient at any integer index: stored, conjugated, or the tail box.
    CoeffPair at(long k) const;
    // Upper bound of the complex modulus |coef_k|_inf.
    double modulus_bound(long k) const;
    // Upper bound of the row sums of |Re coef_k| + |Im coef_k|.
    double rowsum_bound(long k) const;
    // True when coef_k is identically zero by construction.
    bool structurally_zero(long k) const;
    void validate() const;
};

double s_norm_bound(const MatrixFourierSeq& x, double s);

// sup over |j| >= j0 of |coef_j|_inf w_j^{s}, stored part scanned and tail
// part bounded by C (needs s <= tail.s).
double tail_sup(const MatrixFourierSeq& x, long j0, double s);

CoeffPair convolve(const MatrixFourierSeq& A, const MatrixFourierSeq& Q, long k, long cutoff);

IntervalMatrix eval_at(const MatrixFourierSeq& Q, const Interval& theta);
// Full complex series over k in (-N, N), used to check real-valuedness.
CoeffPair eval_full_series(const MatrixFourierSeq& Q, const Interval& theta);

double ball_tail_bound(double r, double s, long k);

// Sum_{k >= N} k^{-s} upper bound, N >= 1.
double tail_sum_bound(long N, double s);

CoeffPair complex_product(const CoeffPair& a, const CoeffPair& b);
CoeffPair conj(const CoeffPair& a);

}  // namespace floquet
