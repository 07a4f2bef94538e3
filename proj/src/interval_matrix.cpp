#include "floquet/interval_matrix.hpp"

namespace floquet {

namespace {
void require_same(const IntervalMatrix& A, const IntervalMatrix& B) {
    if (A.rows() != B.rows() || A.cols() != B.cols()) fail(ErrorCode::DimensionMismatch, "matrix shapes differ");
}
}  // namespace

IntervalMatrix IntervalMatrix::identity(std::size_t n) {
    IntervalMatrix I(n, n);
    for (std::size_t i = 0; i < n; ++i) I(i, i) = Interval(1.0);
    return I;
}

IntervalMatrix IntervalMatrix::from_point(const Eigen::MatrixXd& m) {
    IntervalMatrix A(std::size_t(m.rows()), std::size_t(m.cols()));
    for (std::size_t i = 0; i < A.rows(); ++i)
        for (std::size_t j = 0; j < A.cols(); ++j) A(i, j) = Interval(m(i, j));
    return A;
}

IntervalMatrix IntervalMatrix::ball(const Eigen::MatrixXd& m, double r) {
    IntervalMatrix A(std::size_t(m.rows()), std::size_t(m.cols()));
    for (std::size_t i = 0; i < A.rows(); ++i)
        for (std::size_t j = 0; j < A.cols(); ++j) A(i, j) = Interval::ball(m(i, j), r);
    return A;
}

Eigen::MatrixXd IntervalMatrix::mid() const {
    Eigen::MatrixXd m(rows_, cols_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) m(i, j) = (*this)(i, j).mid();
    return m;
}

Eigen::MatrixXd IntervalMatrix::rad() const {
    Eigen::MatrixXd m(rows_, cols_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) m(i, j) = (*this)(i, j).rad();
    return m;
}

Eigen::MatrixXd IntervalMatrix::mag() const {
    Eigen::MatrixXd m(rows_, cols_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) m(i, j) = (*this)(i, j).mag();
    return m;
}

bool IntervalMatrix::contains(const Eigen::MatrixXd& m) const {
    if (std::size_t(m.rows()) != rows_ || std::size_t(m.cols()) != cols_) return false;
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j)
            if (!(*this)(i, j).contains(m(i, j))) return false;
    return true;
}

bool IntervalMatrix::contains(const IntervalMatrix& m) const {
    if (m.rows_ != rows_ || m.cols_ != cols_) return false;
    for (std::size_t k = 0; k < a_.size(); ++k)
        if (!a_[k].contains(m.a_[k])) return false;
    return true;
}

bool IntervalMatrix::is_zero() const {
    for (const auto& x : a_)
        if (x.lo != 0 || x.hi != 0) return false;
    return true;
}

IntervalMatrix operator+(const IntervalMatrix& A, const IntervalMatrix& B) {
    require_same(A, B);
    IntervalMatrix C(A.rows(), A.cols());
    for (std::size_t k = 0; k < C.data().size(); ++k) C.data()[k] = A.data()[k] + B.data()[k];
    return C;
}

IntervalMatrix operator-(const IntervalMatrix& A, const IntervalMatrix& B) {
    require_same(A, B);
    IntervalMatrix C(A.rows(), A.cols());
    for (std::size_t k = 0; k < C.data().size(); ++k) C.data()[k] = A.data()[k] - B.data()[k];
    return C;
}

IntervalMatrix operator-(const IntervalMatrix& A) {
    IntervalMatrix C(A.rows(), A.cols());
    for (std::size_t k = 0; k < C.data().size(); ++k) C.data()[k] = -A.data()[k];
    return C;
}

IntervalMatrix operator*(const IntervalMatrix& A, const IntervalMatrix& B) {
    if (A.cols() != B.rows()) fail(ErrorCode::DimensionMismatch, "inner dimensions differ");
    IntervalMatrix C(A.rows(), B.cols());
    for (std::size_t i = 0; i < A.rows(); ++i)
        for (std::size_t j = 0; j < B.cols(); ++j) {
            Interval s(0.0);
            for (std::size_t k = 0; k < A.cols(); ++k) {
                const Interval& a = A(i, k);
                const Interval& b = B(k, j);
                if ((a.lo == 0 && a.hi == 0) || (b.lo == 0 && b.hi == 0)) continue;
                s += a * b;
            }
            C(i, j) = s;
        }
    return C;
}

IntervalMatrix operator*(const Interval& a, const IntervalMatrix& B) {
    IntervalMatrix C(B.rows(), B.cols());
    for (std::size_t k = 0; k < C.data().size(); ++k) C.data()[k] = a * B.data()[k];
    return C;
}

IntervalVector operator*(const IntervalMatrix& A, const IntervalVector& x) {
    if (A.cols() != x.size()) fail(ErrorCode::DimensionMismatch, "matrix-vector dimensions differ");
    IntervalVector y(A.rows(), Interval(0.0));
    for (std::size_t i = 0; i < A.rows(); ++i)
        for (std::size_t k = 0; k < A.cols(); ++k) y[i] += A(i, k) * x[k];
    return y;
}

IntervalMatrix mat_ops(const IntervalMatrix& A, const IntervalMatrix& B, MatOp op) {
    switch (op) {
        case MatOp::Add: return A + B;
        case MatOp::Sub: return A - B;
        case MatOp::Mul: return A * B;
    }
    return {};
}

double abs_sup(const IntervalMatrix& A) {
    double m = 0.0;
    for (const auto& x : A.data()) m = std::max(m, x.mag());
    return m;
}

double abs_sup(const IntervalVector& x) {
    double m = 0.0;
    for (const auto& v : x) m = std::max(m, v.mag());
    return m;
}

double rowsum_norm(const IntervalMatrix& A) {
    double best = 0.0;
    for (std::size_t i = 0; i < A.rows(); ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < A.cols(); ++j) s = rnd::add_up(s, A(i, j).mag());
        best = std::max(best, s);
    }
    return best;
}

IntervalMatrix hull(const IntervalMatrix& A, const IntervalMatrix& B) {
    require_same(A, B);
    IntervalMatrix C(A.rows(), A.cols());
    for (std::size_t k = 0; k < C.data().size(); ++k) C.data()[k] = hull(A.data()[k], B.data()[k]);
    return C;
}

double gemm_gamma(std::size_t k) {
    const double u = 0x1p-53;
    // (k+2)u / (1 - 2(k+2)u) dominates both g_k and g_k / (1 - g_k).
    double ku = rnd::mul_up(double(k + 2), u);
    if (ku >= 0.25) fail(ErrorCode::InvalidArgument, "inner dimension too large for the rounding bound");
    return rnd::div_up(ku, rnd::sub_down(1.0, rnd::mul_up(2.0, ku)));
}

namespace {
constexpr double kUnderflowPerTerm = 4 * DBL_TRUE_MIN;

template <class M>
void inflate_upper(M& F, std::size_t k) {
    double f = rnd::add_up(1.0, gemm_gamma(k));
    double tiny = rnd::mul_up(double(k + 1), kUnderflowPerTerm);
    for (Eigen::Index i = 0; i < F.size(); ++i) F.data()[i] = rnd::add_up(rnd::mul_up(F.data()[i], f), tiny);
}
}  // namespace

Eigen::MatrixXd upper_product(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B) {
    Eigen::MatrixXd F = A * B;
    inflate_upper(F, std::size_t(A.cols()));
    return F;
}

Eigen::VectorXd upper_product(const Eigen::MatrixXd& A, const Eigen::VectorXd& x) {
    Eigen::VectorXd F = A * x;
    inflate_upper(F, std::size_t(A.cols()));
    return F;
}

void product_with_error(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B, Eigen::MatrixXd& P,
                        Eigen::MatrixXd& E) {
    P = A * B;
    E = upper_product(Eigen::MatrixXd(A.cwiseAbs()), Eigen::MatrixXd(B.cwiseAbs()));
    double g = gemm_gamma(std::size_t(A.cols()));
    double tiny = rnd::mul_up(double(A.cols() + 1), kUnderflowPerTerm);
    for (Eigen::Index i = 0; i < E.size(); ++i) E.data()[i] = rnd::add_up(rnd::mul_up(E.data()[i], g), tiny);
}

void product_with_error(const Eigen::MatrixXd& A, const Eigen::VectorXd& x, Eigen::VectorXd& p,
                        Eigen::VectorXd& e) {
    p = A * x;
    e = upper_product(Eigen::MatrixXd(A.cwiseAbs()), Eigen::VectorXd(x.cwiseAbs()));
    double g = gemm_gamma(std::size_t(A.cols()));
    double tiny = rnd::mul_up(double(A.cols() + 1), kUnderflowPerTerm);
    for (Eigen::Index i = 0; i < e.size(); ++i) e[i] = rnd::add_up(rnd::mul_up(e[i], g), tiny);
}

MidRad to_midrad(const IntervalMatrix& A) { return {A.mid(), A.rad()}; }

}  // namespace floquet
