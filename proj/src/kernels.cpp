#include "moldiff/kernels.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "moldiff/specfun.hpp"

namespace moldiff::kernels {

ModeWavenumber mode_wavenumber(const Scenario& scenario, InternalState state) {
  ModeWavenumber mode;
  mode.state = state;
  const double k0 = scenario.k0();
  const int dn = state.energy_index() - scenario.initial.energy_index();
  if (dn == 0) {
    mode.k = k0;
    mode.k_squared = k0 * k0;
    mode.classification = Classification::propagating;
    return mode;
  }
  if (scenario.a == 0.0) {
    mode.k = 0.0;
    mode.k_squared = -std::numeric_limits<double>::infinity();
    mode.classification = Classification::evanescent;
    return mode;
  }
  const double mass_ratio =
      (scenario.m1 + scenario.m2) * (scenario.m1 + scenario.m2) /
      (scenario.m1 * scenario.m2);
  mode.k_squared = k0 * k0 - 2.0 * mass_ratio * dn / (scenario.a * scenario.a);
  if (mode.k_squared > 0.0) {
    mode.k = std::sqrt(mode.k_squared);
    mode.classification = Classification::propagating;
  } else {
    mode.k = 0.0;
    mode.classification = Classification::evanescent;
  }
  return mode;
}

ComplexValue kernel_exact(const ModeWavenumber& mode, double x, double z) {
  if (!(z > 0.0)) throw std::domain_error("kernel_exact: need Z > 0");
  if (!mode.propagating())
    throw std::domain_error("kernel_exact: evanescent mode");
  const double r = std::hypot(x, z);
  const ComplexValue h = specfun::hankel1_order1(mode.k * r);
  const double pref = 0.5 * mode.k * z / r;
  return {-pref * h.imag(), pref * h.real()};
}

ComplexValue kernel_paraxial(const ModeWavenumber& mode, double x, double z) {
  if (!(z > 0.0)) throw std::domain_error("kernel_paraxial: need Z > 0");
  if (!mode.propagating())
    throw std::domain_error("kernel_paraxial: evanescent mode");
  const double amp = std::sqrt(mode.k / (2.0 * M_PI * z));
  const double phase = mode.k * (z + 0.5 * x * x / z) - 0.25 * M_PI;
  return {amp * std::cos(phase), amp * std::sin(phase)};
}

ComplexValue kernel(KernelKind kind, const ModeWavenumber& mode, double x,
                    double z) {
  return kind == KernelKind::exact ? kernel_exact(mode, x, z)
                                   : kernel_paraxial(mode, x, z);
}

ComplexValue moshinsky0(const ModeWavenumber& mode, double x, double z) {
  if (!(z > 0.0)) throw std::domain_error("moshinsky0: need Z > 0");
  if (!mode.propagating())
    throw std::domain_error("moshinsky0: evanescent mode");
  const double w = std::sqrt(mode.k / (M_PI * z)) * x;
  const ComplexValue e = specfun::fresnel_complex(w);
  const double kz = mode.k * z;
  const ComplexValue rot(std::cos(kz), std::sin(kz));
  constexpr ComplexValue half_sqrt_mi(0.5, -0.5);  // sqrt(-i/2)
  return half_sqrt_mi * rot * (ComplexValue(0.5, 0.5) + e);
}

ComplexValue moshinsky_slit(const ModeWavenumber& mode, double x, double z) {
  return moshinsky0(mode, x + 0.5, z) - moshinsky0(mode, x - 0.5, z);
}

ComplexValue kernel_slit(const ModeWavenumber& mode, double x, double z,
                         KernelKind kind) {
  return kernel(kind, mode, x + 0.5, z) + kernel(kind, mode, x - 0.5, z);
}

EdgeGeometry edge_geometry(double r_prime, double theta_prime, double m1,
                           double m2) {
  if (!(m1 > 0.0) || !(m2 > 0.0))
    throw std::domain_error("edge_geometry: masses must be positive");
  if (r_prime < 0.0) throw std::domain_error("edge_geometry: need r' >= 0");
  const double c = std::cos(theta_prime);
  const double total = m1 + m2;
  const double t1 = m2 * c / total;
  const double t2 = -m1 * c / total;
  EdgeGeometry eg;
  eg.s_minus = std::max(t1, t2);
  eg.s_plus = std::min(t1, t2);
  eg.x_minus = r_prime * eg.s_minus - 0.5;
  eg.x_plus = r_prime * eg.s_plus + 0.5;
  return eg;
}

ComplexValue moshinsky_slit_first_order(const ModeWavenumber& mode, double x,
                                        double z, double r_prime,
                                        double theta_prime, double m1,
                                        double m2, KernelKind kind) {
  const EdgeGeometry eg = edge_geometry(r_prime, theta_prime, m1, m2);
  return moshinsky_slit(mode, x, z) -
         r_prime * (eg.s_minus * kernel(kind, mode, x + 0.5, z) -
                    eg.s_plus * kernel(kind, mode, x - 0.5, z));
}

}  // namespace moldiff::kernels
