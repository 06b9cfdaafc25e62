#pragma once

#include <vector>

#include "moldiff/types.hpp"

// Special functions underpinning the diffraction formulas. All routines are
// plain double precision and deterministic (bitwise-identical results for
// identical arguments).

namespace moldiff::specfun {

// Branch seams, exposed so tests can probe continuity across them.
inline constexpr double kFresnelSeriesMax = 3.0;      // Maclaurin below
inline constexpr double kFresnelAsymptoticMin = 4.0;  // aux f,g series above
inline constexpr double kHankelSeam = 12.0;           // ascending series below

struct FresnelCS {
  double c = 0.0;
  double s = 0.0;
};

// Fresnel integrals in the convention
//   C(x) = Int_0^x cos(pi t^2 / 2) dt,  S(x) = Int_0^x sin(pi t^2 / 2) dt.
// Both are odd and tend to 1/2 as x -> +inf. Absolute error stays below
// 1e-10 for |x| <= 1e4. Three branches: Maclaurin series, a rotated-contour
// Gauss-Legendre rule on (3, 4), and the auxiliary f,g asymptotic series
// with exactly reduced phase pi x^2/2 mod 2pi. Non-finite x -> domain_error.
FresnelCS fresnel(double x);

// E(x) = C(x) + i S(x).
ComplexValue fresnel_complex(double x);

// Hankel function of the first kind, order one: H1(x) = J1(x) + i Y1(x),
// for x > 0 (domain_error otherwise). Ascending series below the seam,
// Stokes asymptotic series with min-term truncation above; relative error
// <= 1e-10 across [1e-3, 1e6], continuous to ~1e-11 at the seam.
ComplexValue hankel1_order1(double x);

// Generalized Laguerre polynomial L_n^{alpha}(x) by the stable three-term
// recurrence. Requires n >= 0, alpha >= 0 (domain_error otherwise).
double laguerre(int n, int alpha, double x);

// Exact monomial coefficients of L_n^{alpha}: entry k is
// (-1)^k binom(n+alpha, n-k)/k!, assembled from exact integer binomials.
// Reliable through n ~ 30.
std::vector<long double> laguerre_coefficients(int n, int alpha);

// Exact monomial coefficients of the product L_n^{alpha} * L_m^{beta}
// (binomial convolution in 128-bit integers, then long double).
// Requires n, m <= 16 and alpha, beta <= 24.
std::vector<long double> laguerre_product_coefficients(int n, int alpha,
                                                       int m, int beta);

// Gamma(twice_x / 2) by exact recurrence from Gamma(1/2) and Gamma(1).
// Supports half-integer arguments of either sign; poles (twice_x even and
// <= 0) raise domain_error.
double gamma_half(int twice_x);
long double gamma_half_l(int twice_x);

// Talmi integral T(p) = Int_0^inf e^{-u^2} u^{2p+2} du = Gamma(p + 3/2)/2,
// p >= 0 (domain_error otherwise).
double talmi(int p);

// Real-p extension of the Talmi integral, defined for p > -3/2. The
// mixed-parity matrix elements need it at half-odd p.
double talmi_half(double p);

}  // namespace moldiff::specfun
