#pragma once

namespace floquet {

// zeta(M, s) = (M+1)^{-s} + (M+2)^{-s} + (M+2)^{1-s}/(s-1) >= sum_{k>M} k^{-s}.
double zeta(long M, double s);
// eta_k = 2 (k/(k-1))^s + (4 log(k-2)/k + (pi^2-6)/3) (2/k + 1/2)^{s-2}.
double eta(long k, double s);
// C_1 = 2 + 2 sum_{l=1}^M l^{-s} + 2/(M^{s-1}(s-1)) + eta_M - 1.
double convolution_constant_C1(long M, double s);

}  // namespace floquet
