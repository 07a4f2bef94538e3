#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "floquet/interval.hpp"

namespace floquet {

using IntervalVector = std::vector<Interval>;

class IntervalMatrix {
public:
    IntervalMatrix() = default;
    IntervalMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), a_(rows * cols) {}

    static IntervalMatrix identity(std::size_t n);
    static IntervalMatrix from_point(const Eigen::MatrixXd& m);
    // Entrywise m_ij +- r.
    static IntervalMatrix ball(const Eigen::MatrixXd& m, double r);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    Interval& operator()(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
    const Interval& operator()(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }
    std::vector<Interval>& data() { return a_; }
    const std::vector<Interval>& data() const { return a_; }

    Eigen::MatrixXd mid() const;
    // Upper bounds of the entrywise radius around mid().
    Eigen::MatrixXd rad() const;
    // Upper bounds of |a_ij|.
    Eigen::MatrixXd mag() const;
    bool contains(const Eigen::MatrixXd& m) const;
    bool contains(const IntervalMatrix& m) const;
    bool is_zero() const;

private:
    std::size_t rows_ = 0, cols_ = 0;
    std::vector<Interval> a_;
};

enum class MatOp { Add, Sub, Mul };
IntervalMatrix mat_ops(const IntervalMatrix& A, const IntervalMatrix& B, MatOp op);

IntervalMatrix operator+(const IntervalMatrix& A, const IntervalMatrix& B);
IntervalMatrix operator-(const IntervalMatrix& A, const IntervalMatrix& B);
IntervalMatrix operator*(const IntervalMatrix& A, const IntervalMatrix& B);
IntervalMatrix operator*(const Interval& a, const IntervalMatrix& B);
IntervalMatrix operator-(const IntervalMatrix& A);
IntervalVector operator*(const IntervalMatrix& A, const IntervalVector& x);

double abs_sup(const IntervalMatrix& A);
double rowsum_norm(const IntervalMatrix& A);
double abs_sup(const IntervalVector& x);

IntervalMatrix hull(const IntervalMatrix& A, const IntervalMatrix& B);

// Rigorous bounds for large floating products computed by Eigen. With
// u = 2^-53 and inner dimension k, |fl(AB) - AB| <= g_k |A||B| where
// g_k = k u / (1 - k u); a tiny absolute term covers underflow.
double gemm_gamma(std::size_t k);
// Entrywise upper bound of A*B for nonnegative A, B.
Eigen::MatrixXd upper_product(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B);
Eigen::VectorXd upper_product(const Eigen::MatrixXd& A, const Eigen::VectorXd& x);
// P = fl(A*B) and E >= |A*B - P| entrywise.
void product_with_error(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B, Eigen::MatrixXd& P,
                        Eigen::MatrixXd& E);
void product_with_error(const Eigen::MatrixXd& A, const Eigen::VectorXd& x, Eigen::VectorXd& p,
                        Eigen::VectorXd& e);

// Midpoint-radius representation for large interval matrices.
struct MidRad {
    Eigen::MatrixXd mid;
    Eigen::MatrixXd rad;
};
MidRad to_midrad(const IntervalMatrix& A);

}  // namespace floquet
