#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "floquet/sequence.hpp"

namespace floquet {

// Point data x = (R, Q_0, Q_1, ..., Q_{m-1}); Q1[k], Q2[k] are the real and
// imaginary parts of Q_k (Q2[0] = 0).
struct FloquetCandidate {
    std::size_t n = 0;
    std::size_t m = 0;
    Interval tau{1.0};
    Eigen::MatrixXd R;
    std::vector<Eigen::MatrixXd> Q1, Q2;

    FloquetCandidate() = default;
    FloquetCandidate(std::size_t n_, std::size_t m_, Interval tau_);

    std::size_t block() const { return 2 * n * n; }
    std::size_t dim() const { return block() * m; }
    // Flattened unknown vector: block 0 = [R, Q_0], block k = [Q_{k,1}, Q_{k,2}],
    // matrices row-major.
    Eigen::VectorXd to_vector() const;
    void from_vector(const Eigen::VectorXd& v);
    // Point sequence (zero tail) of the Q coefficients.
    MatrixFourierSeq q_sequence() const;
    // Truncated to or padded with zero modes up to m_new.
    FloquetCandidate resized(std::size_t m_new) const;
};

struct GalerkinProblem {
    MatrixFourierSeq A;
    std::size_t m = 2;
    double s = 2.0;

    const Interval& tau() const { return A.half_period; }
    void validate() const;
};

// Midpoint coefficients of A used by every non-rigorous computation.
struct PointSequence {
    std::size_t n = 0;
    double tau = 1.0;
    std::vector<Eigen::MatrixXcd> c;  // k = 0..N-1

    static PointSequence from(const MatrixFourierSeq& A);
    Eigen::MatrixXcd at(long k) const;
    Eigen::MatrixXd eval(double t) const;
};

// Residual components for blocks 0..k_max-1 in the unknown layout:
// block 0 = [f_star, f_0], block k = [f_{k,1}, f_{k,2}].
IntervalVector f_eval(const FloquetCandidate& x, const GalerkinProblem& prob, std::size_t k_max);
Eigen::VectorXd f_eval_point(const FloquetCandidate& x, const PointSequence& A, std::size_t k_max);

// Analytic Jacobian of the truncated map at x with midpoint coefficients.
Eigen::MatrixXd jacobian_assemble(const FloquetCandidate& x, const GalerkinProblem& prob);
// Enclosure of the same Jacobian over the coefficient enclosures and tau.
MidRad jacobian_enclosure(const FloquetCandidate& x, const GalerkinProblem& prob);

struct NewtonReport {
    int iterations = 0;
    double residual = 0.0;
};

FloquetCandidate newton_refine(const FloquetCandidate& x0, const GalerkinProblem& prob, double tol = 1e-12,
                               int max_iter = 30, NewtonReport* report = nullptr);

struct InitGuessOptions {
    double ode_tol = 1e-12;
    // Eigenvalues of the monodromy this close to the negative real axis are rejected.
    double branch_tol = 1e-10;
};

FloquetCandidate init_guess(const GalerkinProblem& prob, const InitGuessOptions& opt = {});

// Diagonal block d f_k / d Q_k for k >= 1.
IntervalMatrix lambda_k(long k, const Eigen::MatrixXd& R, const MatrixFourierSeq& A, const Interval& tau);
// Certified enclosure of the inverse; norm_bound receives an upper bound of
// its row-sum norm when non-null.
IntervalMatrix lambda_k_inverse(const IntervalMatrix& L, double* norm_bound = nullptr);

struct BlockOperator {
    std::size_t n = 0, m = 0, M = 0;
    Eigen::MatrixXd A_m;  // approximate inverse of Df_mid
    Eigen::MatrixXd Df_mid;
    std::vector<IntervalMatrix> lambda;      // k = m..M-1
    std::vector<IntervalMatrix> lambda_inv;  // k = m..M-1
};

BlockOperator build_block_operator(const FloquetCandidate& x, const GalerkinProblem& prob, std::size_t M);

// x has 2n^2 M entries (blocks 0..M-1); midpoint arithmetic.
Eigen::VectorXd apply_A(const BlockOperator& op, const Eigen::VectorXd& x);
Eigen::VectorXd apply_Adag(const BlockOperator& op, const Eigen::VectorXd& x);

// Non-rigorous diagnostic: sup over a grid of |Q'(t) - A(t)Q(t) + Q(t)R|.
double normal_form_defect(const FloquetCandidate& x, const GalerkinProblem& prob, int grid);

}  // namespace floquet
