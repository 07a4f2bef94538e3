#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "floquet/floquet.hpp"
#include "floquet/system.hpp"
#include "floquet/tail_constants.hpp"

namespace floquet {

enum class LPolicy { Paper, Fixed };
enum class SharpMode { Auto, On, Off };

struct VerifierParams {
    double s = 2.0;
    std::size_t m = 0;
    std::size_t M = 0;
    LPolicy l_policy = LPolicy::Paper;
    long l_fixed = 0;
    std::map<long, long> l_override;  // explicit L_k, wins over the policy
    SharpMode sharp = SharpMode::Auto;
    // Highest stored index of A; negative means taken from the sequence.
    long m_gamma = -1;
    long k_cap = 1000000;
    double r_cap = 1e6;

    long L(long k) const;
    void validate(const MatrixFourierSeq& A) const;
};

std::string l_policy_name(const VerifierParams& p);
std::string sharp_name(SharpMode m);

struct KCLambda {
    long K = 1;
    double C_Lambda = 0.0;
    double rho = 0.0;  // uniform bound of the non-rotation part of Lambda_k for k >= m
};

// Smallest K with Lambda_k certifiably diagonally dominant (after swapping
// the two block rows) for all k >= K, and C_Lambda >= k ||Lambda_k^{-1}|| for
// k >= m. C_Lambda is +inf when m < K.
KCLambda compute_K_CLambda(const Eigen::MatrixXd& R, const MatrixFourierSeq& A, const Interval& tau, std::size_t m,
                           long cap = 1000000);

// All bound data; vectors are indexed [k][entry] over the 2n^2 entries of block k.
struct RadiiCoefficients {
    std::size_t n = 0, m = 0, M = 0;
    double s = 2.0;
    std::vector<std::vector<double>> Y, Z0, Z1, Z2;
    // Final polynomial p_k(r) = Y + lin r + quad r^2 - r w_k^{-s}.
    std::vector<std::vector<double>> lin, quad;
    std::vector<long> L;
    std::vector<double> h;
    double Y_M = 0.0, z1_M = 0.0, z2_M = 0.0;
    KCLambda kc;
    double C1 = 0.0, K1 = 0.0, A_tail_norm = 0.0, W_norm = 0.0;
    std::string K1_route;
    bool sharp_used = false;
};

struct Margin {
    long k = 0;
    long worst_entry = 0;
    double value_at_rmin = 0.0;
    bool has_interval = false;
    double r_lo = 0.0, r_hi = 0.0;
};

struct VerificationReport {
    VerifierParams params;
    std::size_t n = 0;
    double s_star = 2.0;
    long K = 0;
    double C_Lambda = 0.0, C1 = 0.0, K1 = 0.0;
    std::string K1_route;
    bool sharp_used = false;
    double Y_M = 0.0, z1_M = 0.0, z2_M = 0.0;
    bool has_interval = false;
    double r_min = 0.0, r_max = 0.0;
    double r = 0.0;  // certified radius (r_min nudged inward)
    std::vector<Margin> margins;  // k = 0..M-1, then k = M for the tail polynomial
    bool success = false;
    bool conditional = false;
    double residual = 0.0;  // |f^(m)(x)|_inf at the candidate
    std::string message;
};

struct VerifiedFloquetForm {
    FloquetCandidate x;
    double r = 0.0;
    double s = 2.0;
    bool conditional = false;

    IntervalMatrix R_enclosure() const;
    // Q coefficients inflated by the ball, tail C = sqrt(2) r.
    MatrixFourierSeq Q_enclosure() const;
};

struct TailContext {
    KCLambda kc;
    bool sharp = false;
    double s_star = 2.0;
    std::vector<long> L;  // k = 0..M-1
};

TailContext tail_context(const FloquetCandidate& x, const GalerkinProblem& prob, const VerifierParams& params);

// Row sums of |Re A_j| + |Im A_j| (upper bounds), one per row.
std::vector<double> row_abs(const MatrixFourierSeq& A, long j);

void y_bounds(const FloquetCandidate& x, const GalerkinProblem& prob, const BlockOperator& op,
              const VerifierParams& params, const TailContext& ctx, RadiiCoefficients& out);
void z_bounds(const FloquetCandidate& x, const GalerkinProblem& prob, const BlockOperator& op,
              const VerifierParams& params, const TailContext& ctx, RadiiCoefficients& out);

// Quadratic a r^2 + b r + c (a, c >= 0); negativity interval shrunk inward.
bool negativity_interval(double a, double b, double c, double cap, double& lo, double& hi);
// Upper bound of a r^2 + b r + c at r.
double eval_quadratic_up(double a, double b, double c, double r);

VerificationReport assemble_and_solve(const RadiiCoefficients& coefs, const VerifierParams& params);

RadiiCoefficients radii_coefficients(const FloquetCandidate& x, const GalerkinProblem& prob,
                                     const VerifierParams& params, BlockOperator* op_out = nullptr);

// Throws VerificationFailed (message carries the summary) unless success; the
// report is written to report_out either way.
VerifiedFloquetForm verify(const FloquetCandidate& x, const GalerkinProblem& prob, const VerifierParams& params,
                           bool conditional, VerificationReport* report_out);
VerifiedFloquetForm verify(const OrbitEnclosure& orbit, const FloquetCandidate& x, const VerifierParams& params,
                           VerificationReport* report_out);

// Non-rigorous: largest ||T(x) - x||_s / r over random x in the ball at truncation M.
double sample_contraction(const FloquetCandidate& x, const GalerkinProblem& prob, const BlockOperator& op, double r,
                          double s, int count, std::uint64_t seed);

}  // namespace floquet
