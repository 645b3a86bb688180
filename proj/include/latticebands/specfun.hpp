#pragma once

#include <complex>

namespace lb {

using cplx = std::complex<double>;

// E1 on the principal branch, cut along the negative real axis
cplx exp_integral_e1(cplx z);
// e^z E1(z), same branch; finite where E1 itself would overflow
cplx exp_integral_e1_scaled(cplx z);

cplx erfc_complex(cplx z);
// e^{z^2} erfc(z)
cplx erfcx_complex(cplx z);
// Faddeeva w(z) = e^{-z^2} erfc(-iz)
cplx faddeeva_w(cplx z);

double theta3(double z, double q);

cplx log_gamma(cplx z);

double bernoulli2(double x);

// Gamma((d-1)/2, z) for d = 1, 2, 3.  lower_sheet selects the continuation
// of sqrt and log across the negative real axis from below.
cplx upper_gamma_half_orders(int d, cplx z, bool lower_sheet = false);

namespace detail {

cplx e1_series(cplx z);
// e^z E1(z) by the Laplace continued fraction; throws ConvergenceError
cplx e1_cf_scaled(cplx z, int max_iter = 5000);
// E1 that accepts points on the cut, resolving them by the sign of Im z
// (Im z = -0.0 is the limit from below)
cplx e1_signed(cplx z);

double theta3_direct(double z, double q);
double theta3_modular(double z, double q);
// theta3(z, e^{-u^2}) - 1 without cancellation for large u
double theta3m1_lognome(double z, double u);

// 1 - sqrt(pi) x erfcx(x)
cplx one_minus_sqrtpi_x_erfcx(cplx x);

// e^{-a} erfcx(z) with the reflection folded in so that no large
// intermediate appears when a - z^2 is moderate
cplx scaled_erfcx(cplx z, cplx a);

cplx sqrt_sheet(cplx w, bool lower_sheet);

}  // namespace detail
}  // namespace lb
