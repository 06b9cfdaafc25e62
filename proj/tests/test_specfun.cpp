#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "moldiff/quadrature.hpp"
#include "moldiff/specfun.hpp"

using moldiff::specfun::fresnel;
using moldiff::specfun::fresnel_complex;
using moldiff::specfun::gamma_half;
using moldiff::specfun::hankel1_order1;
using moldiff::specfun::laguerre;
using moldiff::specfun::laguerre_coefficients;
using moldiff::specfun::laguerre_product_coefficients;
using moldiff::specfun::talmi;
using moldiff::specfun::talmi_half;

namespace quad = moldiff::quad;

namespace {
constexpr double kPi = 3.14159265358979323846;

double fresnel_c_reference(double x) {
  const int panels = std::max(4, static_cast<int>(x * x) + 4);
  return quad::adaptive([](double t) { return std::cos(0.5 * kPi * t * t); },
                        quad::uniform_breaks(0.0, x, panels), 1e-13, 1e-13,
                        2000)
      .value;
}

double fresnel_s_reference(double x) {
  const int panels = std::max(4, static_cast<int>(x * x) + 4);
  return quad::adaptive([](double t) { return std::sin(0.5 * kPi * t * t); },
                        quad::uniform_breaks(0.0, x, panels), 1e-13, 1e-13,
                        2000)
      .value;
}

double bessel_j1_reference(double x) {
  return quad::adaptive(
             [x](double theta) { return std::cos(theta - x * std::sin(theta)); },
             quad::uniform_breaks(0.0, kPi, std::max(8, static_cast<int>(x))),
             1e-13, 1e-13, 2000)
             .value /
         kPi;
}

double bessel_y1_reference(double x) {
  const double oscillatory =
      quad::adaptive(
          [x](double theta) { return std::sin(x * std::sin(theta) - theta); },
          quad::uniform_breaks(0.0, kPi, std::max(8, static_cast<int>(x))),
          1e-13, 1e-13, 2000)
          .value;
  const double t_max = std::asinh(40.0 / x);
  const double tail =
      quad::adaptive(
          [x](double t) { return std::sinh(t) * std::exp(-x * std::sinh(t)); },
          quad::uniform_breaks(0.0, t_max, 24), 1e-14, 1e-13, 2000)
          .value;
  return (oscillatory - 2.0 * tail) / kPi;
}
}  // namespace

TEST_CASE("fresnel matches tabulated values at x = 1") {
  const auto e = fresnel(1.0);
  CHECK(e.c == doctest::Approx(0.7798934003768228).epsilon(1e-12));
  CHECK(e.s == doctest::Approx(0.4382591473903548).epsilon(1e-12));
}

TEST_CASE("fresnel is odd bit for bit") {
  for (double x : {0.2, 0.9, 1.7, 3.5, 4.4, 7.9, 55.0, 1234.5}) {
    const auto plus = fresnel(x);
    const auto minus = fresnel(-x);
    CHECK(minus.c == -plus.c);
    CHECK(minus.s == -plus.s);
  }
}

TEST_CASE("fresnel tends to 1/2 with the 1/(pi x) envelope") {
  const auto e = fresnel(1e4);
  CHECK(std::fabs(e.c - 0.5) < 4e-5);
  CHECK(std::fabs(e.s - 0.5) < 4e-5);
  const auto far = fresnel(1e3);
  CHECK(std::fabs(far.c - 0.5) < 4e-4);
  CHECK(std::fabs(far.s - 0.5) < 4e-4);
}

TEST_CASE("fresnel branches join continuously at the seams") {
  for (double seam : {3.0, 4.0}) {
    const auto lo = fresnel(seam - 1e-12);
    const auto hi = fresnel(seam + 1e-12);
    CHECK(std::fabs(lo.c - hi.c) < 1e-10);
    CHECK(std::fabs(lo.s - hi.s) < 1e-10);
  }
}

TEST_CASE("fresnel agrees with direct quadrature of the defining integral") {
  for (double x : {0.3, 0.7, 1.5, 2.5, 3.2, 3.7, 4.5, 6.0, 8.0}) {
    const auto e = fresnel(x);
    CHECK(e.c == doctest::Approx(fresnel_c_reference(x)).epsilon(5e-11));
    CHECK(e.s == doctest::Approx(fresnel_s_reference(x)).epsilon(5e-11));
  }
}

TEST_CASE("fresnel rejects non-finite input") {
  CHECK_THROWS_AS(fresnel(std::nan("")), std::domain_error);
  CHECK_THROWS_AS(fresnel(INFINITY), std::domain_error);
}

TEST_CASE("fresnel_complex packs C + iS") {
  const auto e = fresnel(2.3);
  const auto z = fresnel_complex(2.3);
  CHECK(z.real() == e.c);
  CHECK(z.imag() == e.s);
}

TEST_CASE("hankel1_order1 matches tabulated J1, Y1 at x = 1") {
  const auto h = hankel1_order1(1.0);
  CHECK(h.real() == doctest::Approx(0.4400505857449335).epsilon(1e-12));
  CHECK(h.imag() == doctest::Approx(-0.7812128213002887).epsilon(1e-12));
}

TEST_CASE("hankel1_order1 matches integral representations") {
  for (double x : {0.5, 2.0, 5.0, 10.0, 13.0, 20.0, 60.0}) {
    const auto h = hankel1_order1(x);
    CHECK(h.real() == doctest::Approx(bessel_j1_reference(x)).epsilon(2e-10));
    CHECK(h.imag() == doctest::Approx(bessel_y1_reference(x)).epsilon(2e-9));
  }
}

TEST_CASE("hankel1_order1 satisfies the Wronskian identity") {
  const double h = 1e-6;
  for (double x : {5.0, 30.0, 200.0}) {
    const auto hp = hankel1_order1(x + h);
    const auto hm = hankel1_order1(x - h);
    const auto h0 = hankel1_order1(x);
    const std::complex<double> deriv = (hp - hm) / (2.0 * h);
    // J1 Y1' - J1' Y1 = Im(conj(H1) H1') = 2/(pi x)
    const double wronskian = (std::conj(h0) * deriv).imag();
    CHECK(wronskian == doctest::Approx(2.0 / (kPi * x)).epsilon(1e-6));
  }
}

TEST_CASE("hankel1_order1 modulus decays as sqrt(2/(pi x))") {
  const double x = 1e5;
  const double modulus = std::abs(hankel1_order1(x)) * std::sqrt(x);
  CHECK(modulus == doctest::Approx(std::sqrt(2.0 / kPi)).epsilon(1e-8));
}

TEST_CASE("hankel1_order1 is continuous at the series/asymptotic seam") {
  const double seam = moldiff::specfun::kHankelSeam;
  const auto lo = hankel1_order1(seam - 1e-12);
  const auto hi = hankel1_order1(seam + 1e-12);
  CHECK(std::abs(lo - hi) < 1e-10);
}

TEST_CASE("hankel1_order1 rejects non-positive arguments") {
  CHECK_THROWS_AS(hankel1_order1(0.0), std::domain_error);
  CHECK_THROWS_AS(hankel1_order1(-2.0), std::domain_error);
  CHECK_THROWS_AS(hankel1_order1(std::nan("")), std::domain_error);
}

TEST_CASE("laguerre recurrence agrees with exact coefficients") {
  for (int n = 0; n <= 10; ++n) {
    for (int alpha : {0, 1, 2, 4, 6}) {
      const auto coeffs = laguerre_coefficients(n, alpha);
      for (double x : {0.3, 1.7, 4.2}) {
        long double horner = 0.0L;
        for (std::size_t k = coeffs.size(); k-- > 0;) {
          horner = horner * x + coeffs[k];
        }
        CHECK(laguerre(n, alpha, x) ==
              doctest::Approx(static_cast<double>(horner)).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("laguerre hits exact rational points") {
  // L_2^0(x) = 1 - 2x + x^2/2 so L_2^0(2) = -1
  CHECK(laguerre(2, 0, 2.0) == doctest::Approx(-1.0).epsilon(1e-15));
  CHECK(laguerre(0, 3, 17.0) == 1.0);
  CHECK(laguerre(1, 2, 3.0) == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("laguerre_product_coefficients reproduce pointwise products") {
  for (int n : {0, 1, 3, 4}) {
    for (int m : {0, 2, 4}) {
      for (int alpha : {0, 1, 3}) {
        for (int beta : {0, 2}) {
          const auto coeffs = laguerre_product_coefficients(n, alpha, m, beta);
          for (double x : {0.4, 1.3, 2.8}) {
            long double horner = 0.0L;
            for (std::size_t k = coeffs.size(); k-- > 0;) {
              horner = horner * x + coeffs[k];
            }
            const double direct = laguerre(n, alpha, x) * laguerre(m, beta, x);
            CHECK(static_cast<double>(horner) ==
                  doctest::Approx(direct).epsilon(1e-12));
          }
        }
      }
    }
  }
}

TEST_CASE("gamma_half walks the half-integer lattice exactly") {
  const double sqrt_pi = std::sqrt(kPi);
  CHECK(gamma_half(1) == doctest::Approx(sqrt_pi).epsilon(1e-15));
  CHECK(gamma_half(2) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(gamma_half(4) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(gamma_half(6) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(gamma_half(7) == doctest::Approx(1.875 * sqrt_pi).epsilon(1e-14));
  CHECK(gamma_half(-1) == doctest::Approx(-2.0 * sqrt_pi).epsilon(1e-14));
  CHECK(gamma_half(-3) == doctest::Approx(4.0 / 3.0 * sqrt_pi).epsilon(1e-14));
  CHECK_THROWS_AS(gamma_half(0), std::domain_error);
  CHECK_THROWS_AS(gamma_half(-2), std::domain_error);
}

TEST_CASE("talmi integrals match their defining quadrature") {
  CHECK(talmi(0) == doctest::Approx(0.25 * std::sqrt(kPi)).epsilon(1e-14));
  for (int p = 0; p <= 12; ++p) {
    const double reference =
        quad::adaptive(
            [p](double u) {
              return std::exp(-u * u) * std::pow(u, 2 * p + 2);
            },
            quad::uniform_breaks(0.0, 12.0, 48), 1e-13, 1e-12, 2000)
            .value;
    CHECK(talmi(p) == doctest::Approx(reference).epsilon(1e-10));
  }
  CHECK_THROWS_AS(talmi(-1), std::domain_error);
}

TEST_CASE("talmi_half extends the integer lattice") {
  for (int p = 0; p <= 8; ++p) {
    CHECK(talmi_half(p) == doctest::Approx(talmi(p)).epsilon(1e-13));
  }
  CHECK(talmi_half(-1.0) == doctest::Approx(0.5 * std::sqrt(kPi)).epsilon(1e-14));
  CHECK(talmi_half(0.5) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK_THROWS_AS(talmi_half(-1.5), std::domain_error);
}

TEST_CASE("gauss-kronrod panel integrates degree-20 exactly") {
  const auto unit = quad::gk15([](double) { return 1.0; }, -1.0, 1.0);
  CHECK(unit.value == doctest::Approx(2.0).epsilon(1e-14));
  const auto poly = quad::gk15([](double x) { return std::pow(x, 20.0); },
                               0.0, 1.0);
  CHECK(poly.value == doctest::Approx(1.0 / 21.0).epsilon(1e-13));
}

TEST_CASE("adaptive quadrature handles smooth and oscillatory integrands") {
  const auto smooth = quad::adaptive([](double x) { return std::sin(x); }, 0.0,
                                     kPi, 1e-12, 1e-12, 500);
  CHECK(smooth.converged);
  CHECK(smooth.value == doctest::Approx(2.0).epsilon(1e-12));
  const auto oscillatory =
      quad::adaptive([](double x) { return std::cos(x); },
                     quad::uniform_breaks(0.0, 40.0 * kPi, 80), 1e-11, 0.0,
                     2000);
  CHECK(oscillatory.converged);
  CHECK(std::fabs(oscillatory.value) < 1e-10);
}

TEST_CASE("gauss-legendre nodes integrate high-degree polynomials") {
  const auto& rule = quad::gauss_legendre_32();
  double weight_sum = 0.0;
  double moment = 0.0;
  for (const auto& node : rule) {
    weight_sum += node.w;
    moment += node.w * std::pow(node.x, 62.0);
  }
  CHECK(weight_sum == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(moment == doctest::Approx(2.0 / 63.0).epsilon(1e-12));
  const auto odd = quad::gauss_legendre(7);
  CHECK(odd[3].x == 0.0);
}
