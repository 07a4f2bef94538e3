#pragma once

#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "floquet/sequence.hpp"

namespace floquet {

struct PolyTerm {
    std::size_t component = 0;  // which equation the term belongs to
    Interval coeff{0.0};
    std::vector<int> powers;  // monomial multi-index
};

struct VectorFieldSpec {
    enum class Kind { Lorenz, Zeta3, Polynomial };
    Kind kind = Kind::Polynomial;
    std::size_t n = 0;
    std::map<std::string, Interval> params;
    std::vector<PolyTerm> terms;  // explicit table for Polynomial, derived otherwise

    static VectorFieldSpec lorenz(Interval sigma, Interval rho, Interval beta);
    static VectorFieldSpec zeta3(Interval alpha, Interval beta);
    static VectorFieldSpec polynomial(std::size_t n, std::vector<PolyTerm> terms);

    // Rebuilds the term table from the named parameters.
    void rebuild_terms();
    int degree() const;
    std::string kind_name() const;

    Eigen::VectorXd eval(const Eigen::VectorXd& u) const;
    Eigen::MatrixXd jacobian(const Eigen::VectorXd& u) const;
    // grad g(u) = J0 + sum_l u_l J[l] for a field of degree <= 2.
    void affine_jacobian(IntervalMatrix& J0, std::vector<IntervalMatrix>& J) const;
};

struct OrbitEnclosure {
    VectorFieldSpec field;
    Interval tau{1.0};
    double s_star = 2.0;
    long M_gamma = 0;
    // xi[k] holds component vectors of the k-th Fourier coefficient, k = 0..M_gamma.
    std::vector<std::vector<ComplexInterval>> xi;
    double r_gamma = 0.0;
    bool conditional = true;
    std::string note;

    void validate() const;
    Eigen::VectorXd eval_point(double t) const;
};

// 2*tau-periodic Jacobian sequence A(t) = grad g(gamma(t)) in the doubled
// indexing; odd coefficients vanish and the tail absorbs the orbit ball.
MatrixFourierSeq jacobian_coeffs(const OrbitEnclosure& orbit);

// Base point enclosure gamma(theta) including the orbit ball.
std::vector<Interval> orbit_point(const OrbitEnclosure& orbit, const Interval& theta);

struct OrbitFinderOptions {
    double tol = 1e-13;
    int max_iter = 60;
};

// Non-rigorous Fourier-Galerkin Newton refinement of a periodic orbit.
OrbitEnclosure orbit_candidate_find(const VectorFieldSpec& field, const Eigen::VectorXd& state, double period,
                                    long M_gamma, double r_gamma, const OrbitFinderOptions& opt = {});
OrbitEnclosure orbit_candidate_find(const OrbitEnclosure& guess, long M_gamma, double r_gamma,
                                    const OrbitFinderOptions& opt = {});
// Natural-parameter continuation in one named field parameter.
OrbitEnclosure continue_orbit(const OrbitEnclosure& start, const std::string& param, double target, int steps,
                              const OrbitFinderOptions& opt = {});
// Orbit re-based at time t0: gamma_new(t) = gamma(t + t0). The hypothesis
// ball grows by sqrt(2) since rotation mixes real and imaginary parts.
OrbitEnclosure shift_time(const OrbitEnclosure& orbit, double t0);
// sup over a uniform grid of |gamma'(t) - g(gamma(t))| for the midpoint orbit.
double orbit_residual(const OrbitEnclosure& orbit, int grid);

}  // namespace floquet
