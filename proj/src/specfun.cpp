#include "moldiff/specfun.hpp"

#include <cmath>
#include <stdexcept>

#include "moldiff/quadrature.hpp"

namespace moldiff::specfun {

namespace {

constexpr double kEulerGamma = 0.57721566490153286061;

// Maclaurin sums, usable to |x| ~ 3 before cancellation erodes accuracy.
FresnelCS fresnel_series(double x) {
  const double z = 0.5 * M_PI * x * x;
  const double z2 = z * z;
  double tc = 1.0;
  double ts = z;
  double c = 1.0;
  double s = z / 3.0;
  for (int m = 1; m < 80; ++m) {
    tc *= -z2 / ((2.0 * m) * (2.0 * m - 1.0));
    ts *= -z2 / ((2.0 * m + 1.0) * (2.0 * m));
    c += tc / (4.0 * m + 1.0);
    s += ts / (4.0 * m + 3.0);
    if (std::abs(tc) < 1e-18 && std::abs(ts) < 1e-18) break;
  }
  return {x * c, x * s};
}

// Auxiliary-function asymptotics (Abramowitz & Stegun 7.3.27-28) with
// min-term truncation. The phase pi x^2/2 is reduced mod 2pi exactly:
// x^2 is split into rounded and residual parts with fma before fmod 4.
FresnelCS fresnel_asymptotic(double x) {
  const double y = 1.0 / (M_PI * x * x);
  const double y2 = y * y;
  double fsum = 1.0;
  double t = 1.0;
  for (int m = 1; m < 40; ++m) {
    const double next = t * -((4.0 * m - 3.0) * (4.0 * m - 1.0) * y2);
    if (std::abs(next) >= std::abs(t)) break;
    fsum += next;
    t = next;
    if (std::abs(t) < 1e-19) break;
  }
  double gsum = 1.0;
  t = 1.0;
  for (int m = 1; m < 40; ++m) {
    const double next = t * -((4.0 * m - 1.0) * (4.0 * m + 1.0) * y2);
    if (std::abs(next) >= std::abs(t)) break;
    gsum += next;
    t = next;
    if (std::abs(t) < 1e-19) break;
  }
  const double f = fsum / (M_PI * x);
  const double g = gsum * y / (M_PI * x);

  const double hi = x * x;
  const double lo = std::fma(x, x, -hi);
  const double theta = (std::fmod(hi, 4.0) + lo) * (0.5 * M_PI);
  const double sn = std::sin(theta);
  const double cs = std::cos(theta);
  return {0.5 + f * sn - g * cs, 0.5 - f * cs - g * sn};
}

// Steepest-descent contour for the transition band: with E = C + iS,
//   E(x) = (1+i)/2 - e^{i pi x^2/2} e^{i pi/4}
//            Int_0^V e^{-pi v^2/2 - pi x v/sqrt2} e^{i pi x v/sqrt2} dv,
// V chosen so the dropped tail is below e^{-42}. The integrand is smooth
// with < 5 oscillations on (3, 4), well inside 32-point Gauss-Legendre.
FresnelCS fresnel_contour(double x) {
  const double V =
      -x * M_SQRT1_2 + std::sqrt(0.5 * x * x + 84.0 / M_PI);
  ComplexValue acc = 0.0;
  for (const auto& node : quad::gauss_legendre_32()) {
    const double v = 0.5 * V * (1.0 + node.x);
    const double damp = std::exp(-0.5 * M_PI * v * v - M_PI * x * v * M_SQRT1_2);
    const double phase = M_PI * x * v * M_SQRT1_2;
    acc += (0.5 * V * node.w) * damp * ComplexValue(std::cos(phase), std::sin(phase));
  }
  const ComplexValue tail =
      std::polar(1.0, 0.5 * M_PI * x * x + 0.25 * M_PI) * acc;
  const ComplexValue e = ComplexValue(0.5, 0.5) - tail;
  return {e.real(), e.imag()};
}

ComplexValue hankel1_series(double x) {
  const double h = 0.5 * x;
  double term = h;
  double j1 = term;
  double psi_a = -kEulerGamma;
  double psi_b = 1.0 - kEulerGamma;
  double ysum = term * (psi_a + psi_b);
  for (int m = 1; m < 60; ++m) {
    term *= -h * h / (m * (m + 1.0));
    psi_a += 1.0 / m;
    psi_b += 1.0 / (m + 1.0);
    j1 += term;
    ysum += term * (psi_a + psi_b);
    if (std::abs(term) < 1e-19) break;
  }
  const double y1 =
      (2.0 / M_PI) * std::log(h) * j1 - 2.0 / (M_PI * x) - ysum / M_PI;
  return {j1, y1};
}

// Stokes expansion H1(x) ~ sqrt(2/(pi x)) e^{i(x - 3pi/4)} sum_j i^j a_j,
// a_0 = 1, a_j = a_{j-1} (4 - (2j-1)^2)/(8 j x), truncated at the smallest
// term. sin/cos of x - 3pi/4 are recombined from libm sin(x), cos(x), whose
// argument reduction is exact for all double x.
ComplexValue hankel1_asymptotic(double x) {
  ComplexValue sum = 1.0;
  ComplexValue ipow(0.0, 1.0);
  double a = 1.0;
  for (int j = 1; j < 40; ++j) {
    const double next = a * (4.0 - (2.0 * j - 1.0) * (2.0 * j - 1.0)) /
                        (8.0 * j * x);
    if (std::abs(next) >= std::abs(a)) break;
    a = next;
    sum += ipow * a;
    ipow *= ComplexValue(0.0, 1.0);
    if (std::abs(a) < 1e-19) break;
  }
  const double sx = std::sin(x);
  const double cx = std::cos(x);
  const double cos_chi = (sx - cx) * M_SQRT1_2;
  const double sin_chi = -(sx + cx) * M_SQRT1_2;
  return std::sqrt(2.0 / (M_PI * x)) * ComplexValue(cos_chi, sin_chi) * sum;
}

// Exact binomial coefficient; arguments kept small enough that the
// stepwise-exact multiplicative form never overflows 128 bits.
unsigned __int128 binomial_u128(int n, int k) {
  if (k < 0 || k > n) return 0;
  if (k > n - k) k = n - k;
  unsigned __int128 r = 1;
  for (int i = 1; i <= k; ++i) {
    r = r * static_cast<unsigned>(n - k + i) / static_cast<unsigned>(i);
  }
  return r;
}

long double factorial_l(int n) {
  long double r = 1.0L;
  for (int i = 2; i <= n; ++i) r *= i;
  return r;
}

}  // namespace

FresnelCS fresnel(double x) {
  if (!std::isfinite(x)) throw std::domain_error("fresnel: non-finite argument");
  const double ax = std::abs(x);
  FresnelCS r;
  if (ax <= kFresnelSeriesMax) {
    return fresnel_series(x);  // odd series, sign handled by x itself
  } else if (ax < kFresnelAsymptoticMin) {
    r = fresnel_contour(ax);
  } else {
    r = fresnel_asymptotic(ax);
  }
  if (x < 0.0) {
    r.c = -r.c;
    r.s = -r.s;
  }
  return r;
}

ComplexValue fresnel_complex(double x) {
  const FresnelCS r = fresnel(x);
  return {r.c, r.s};
}

ComplexValue hankel1_order1(double x) {
  if (!(x > 0.0) || !std::isfinite(x))
    throw std::domain_error("hankel1_order1: argument must be positive");
  return x < kHankelSeam ? hankel1_series(x) : hankel1_asymptotic(x);
}

double laguerre(int n, int alpha, double x) {
  if (n < 0 || alpha < 0)
    throw std::domain_error("laguerre: need n >= 0 and alpha >= 0");
  if (n == 0) return 1.0;
  double lm1 = 1.0;
  double l = 1.0 + alpha - x;
  for (int k = 1; k < n; ++k) {
    const double lp1 =
        ((2.0 * k + 1.0 + alpha - x) * l - (k + alpha) * lm1) / (k + 1.0);
    lm1 = l;
    l = lp1;
  }
  return l;
}

std::vector<long double> laguerre_coefficients(int n, int alpha) {
  if (n < 0 || alpha < 0)
    throw std::domain_error("laguerre_coefficients: need n >= 0, alpha >= 0");
  std::vector<long double> coeff(n + 1);
  for (int k = 0; k <= n; ++k) {
    const long double b =
        static_cast<long double>(binomial_u128(n + alpha, n - k));
    coeff[k] = (k % 2 == 0 ? b : -b) / factorial_l(k);
  }
  return coeff;
}

std::vector<long double> laguerre_product_coefficients(int n, int alpha,
                                                       int m, int beta) {
  if (n < 0 || m < 0 || alpha < 0 || beta < 0)
    throw std::domain_error("laguerre_product_coefficients: negative index");
  if (n > 16 || m > 16 || alpha > 24 || beta > 24)
    throw std::domain_error("laguerre_product_coefficients: index too large");
  std::vector<long double> coeff(n + m + 1, 0.0L);
  for (int k = 0; k <= n + m; ++k) {
    unsigned __int128 acc = 0;
    for (int i = std::max(0, k - m); i <= std::min(k, n); ++i) {
      acc += binomial_u128(n + alpha, n - i) *
             binomial_u128(m + beta, m - (k - i)) * binomial_u128(k, i);
    }
    const long double v = static_cast<long double>(acc) / factorial_l(k);
    coeff[k] = (k % 2 == 0) ? v : -v;
  }
  return coeff;
}

long double gamma_half_l(int twice_x) {
  if (twice_x % 2 == 0) {
    const int m = twice_x / 2;
    if (m <= 0) throw std::domain_error("gamma_half: pole at non-positive integer");
    return factorial_l(m - 1);
  }
  // Odd twice_x: walk from Gamma(1/2) = sqrt(pi).
  constexpr long double kSqrtPi = 1.77245385090551602729817L;
  long double g = kSqrtPi;
  if (twice_x > 1) {
    for (int t = 1; t < twice_x; t += 2) g *= t * 0.5L;
  } else {
    for (int t = 1; t > twice_x; t -= 2) g /= (t - 2) * 0.5L;
  }
  return g;
}

double gamma_half(int twice_x) { return static_cast<double>(gamma_half_l(twice_x)); }

double talmi(int p) {
  if (p < 0) throw std::domain_error("talmi: need p >= 0");
  return 0.5 * gamma_half(2 * p + 3);
}

double talmi_half(double p) {
  if (!(p > -1.5)) throw std::domain_error("talmi_half: need p > -3/2");
  const double twice = 2.0 * p;
  const long long r = std::llround(twice);
  if (std::abs(twice - r) < 1e-12)
    return 0.5 * gamma_half(static_cast<int>(r) + 3);
  return 0.5 * std::tgamma(p + 1.5);
}

}  // namespace moldiff::specfun
