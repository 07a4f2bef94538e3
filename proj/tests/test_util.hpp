#pragma once

#include <cmath>
#include <random>
#include <string>

#include <Eigen/Dense>

#include "floquet/interval_matrix.hpp"

namespace testutil {

inline std::string fixture(const std::string& name) { return std::string(FLOQUET_FIXTURES) + "/" + name; }

// Published approximations of R for the Lorenz orbits #1 and #4.
inline Eigen::Matrix3d lorenz_R1() {
    Eigen::Matrix3d R;
    R << -10.508958375451483, 6.244108010218356, -7.445538972862637, 1.367770562612481, 5.059391467543374,
        -10.140640221489871, -6.918853545877750, 5.863201994753524, -8.217099758758689;
    return R;
}

inline Eigen::Matrix3d lorenz_R4() {
    Eigen::Matrix3d R;
    R << -10.103827000749006, 5.011512150268070, -4.181592133228406, 2.108771563239242, -0.623931925418962,
        0.486619976897008, -6.292527840128125, 3.486887629270139, -2.938907740498710;
    return R;
}

inline Eigen::Matrix3d lorenz_Q0_4() {
    Eigen::Matrix3d Q;
    Q << 0.865350358013670, -0.542407880588934, 0.461699549706412, -0.413891831683466, 0.086095506914414,
        -0.062238564323011, 0.495177534990071, -0.049624165086980, 0.025622831143080;
    return Q;
}

// Modified Bessel values I_n(1/(2 pi)), 25 digits (mpmath).
inline double bessel_I_c(int n) {
    static const double v[] = {1.006342606407780749902066,    0.07982970273037333355150642,
                               0.003172975863789055776514479, 0.00008412142079392491492203408,
                               0.000001673012880293557152398294, 2.662120846348583614393243e-8,
                               3.530215221665453821261095e-10, 4.012769145708423514466645e-12,
                               3.991224268291284459600125e-14};
    return v[n];
}

inline Eigen::MatrixXd random_matrix(std::mt19937_64& g, int r, int c, double scale = 1.0) {
    std::uniform_real_distribution<double> u(-scale, scale);
    Eigen::MatrixXd m(r, c);
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < c; ++j) m(i, j) = u(g);
    return m;
}

// Dyadic rational with a short mantissa, exact in double and in rationals.
inline double dyadic(std::mt19937_64& g) {
    std::uniform_int_distribution<long> num(-(1L << 20), 1L << 20);
    std::uniform_int_distribution<int> ex(-12, 4);
    return std::ldexp(double(num(g)), ex(g));
}

// Classic RK4 for Y' = F(t, Y) with fixed steps, used as an independent oracle.
template <class F>
Eigen::MatrixXd rk4(F f, Eigen::MatrixXd y, double t0, double t1, int steps) {
    const double h = (t1 - t0) / steps;
    double t = t0;
    for (int i = 0; i < steps; ++i) {
        Eigen::MatrixXd k1 = f(t, y);
        Eigen::MatrixXd k2 = f(t + h / 2, y + h / 2 * k1);
        Eigen::MatrixXd k3 = f(t + h / 2, y + h / 2 * k2);
        Eigen::MatrixXd k4 = f(t + h, y + h * k3);
        y += h / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
        t += h;
    }
    return y;
}

}  // namespace testutil
