#include "moldiff/oracle.hpp"

#include <cmath>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <type_traits>

#include "moldiff/kernels.hpp"
#include "moldiff/molecule.hpp"
#include "moldiff/quadrature.hpp"

namespace moldiff::oracle {

namespace {

constexpr double kPhaseBudget = 1.5;       // rad per initial panel
constexpr double kEvanescentExponent = 36.0;  // e^{-36} < 1e-15 integrand floor
constexpr double kMaxPanels = 2.0e6;

void check_mode(const ModeWavenumber& mode, const char* who) {
  if (!mode.propagating() || !(mode.k > 0.0))
    throw std::domain_error(std::string(who) + ": propagating mode required");
}

template <typename T>
T require(const quad::Estimate<T>& est, const char* who) {
  if (!est.converged) {
    ComplexValue achieved;
    if constexpr (std::is_same_v<T, ComplexValue>)
      achieved = est.value;
    else
      achieved = ComplexValue(est.value, 0.0);
    throw convergence_error(std::string(who) + ": quadrature did not converge",
                            achieved, est.error);
  }
  return est.value;
}

int panel_count(double total_phase) {
  const double n = std::ceil(std::abs(total_phase) / kPhaseBudget);
  return static_cast<int>(std::min(kMaxPanels, n)) + 4;
}

}  // namespace

KernelParts kernel_quadrature_parts(const ModeWavenumber& mode, double x,
                                    double z, const QuadratureSpec& spec) {
  check_mode(mode, "kernel_quadrature");
  if (!(z > 0.0)) throw std::domain_error("kernel_quadrature: need Z > 0");
  const double k = mode.k;
  const double ax = std::abs(x);

  // Propagating band, q = k sin(phi):
  //   (k/pi) Int_0^{pi/2} cos(k X sin phi) e^{i k Z cos phi} cos phi dphi.
  const double kr = k * std::hypot(ax, z);
  auto band = [k, ax, z](double phi) -> ComplexValue {
    const double arg = k * z * std::cos(phi);
    return (k / M_PI) * std::cos(k * ax * std::sin(phi)) * std::cos(phi) *
           ComplexValue(std::cos(arg), std::sin(arg));
  };
  const auto prop = quad::adaptive(
      band, quad::uniform_breaks(0.0, 0.5 * M_PI, panel_count(kr * 0.5 * M_PI)),
      0.5 * spec.abs_tol, 0.5 * spec.rel_tol, spec.max_subdivisions);

  // Evanescent branch, q = k cosh(t):
  //   (k/pi) Int_0^{t_max} cos(k X cosh t) sinh t e^{-k Z sinh t} dt,
  // truncated where the integrand bound e^{-k Z sinh t} is negligible (or at
  // the requested cutoff); the dropped tail is bounded analytically by
  // e^{-k Z sinh t_max}/(pi Z) and charged to the error estimate.
  double t_max;
  if (spec.oscillatory_cutoff > 0.0) {
    if (spec.oscillatory_cutoff < 4.0 * k)
      throw std::domain_error(
          "kernel_quadrature: oscillatory_cutoff must be >= 4k");
    t_max = std::acosh(spec.oscillatory_cutoff / k);
  } else {
    t_max = std::asinh(kEvanescentExponent / (k * z));
  }
  const double tail_bound = std::exp(-k * z * std::sinh(t_max)) / (M_PI * z);
  auto branch = [k, ax, z](double t) -> double {
    const double sh = std::sinh(t);
    return (k / M_PI) * std::cos(k * ax * std::cosh(t)) * sh *
           std::exp(-k * z * sh);
  };
  const double ev_phase =
      k * ax * (std::cosh(t_max) - 1.0) + k * z * std::sinh(t_max);
  const auto evan = quad::adaptive(
      branch, quad::uniform_breaks(0.0, t_max, panel_count(ev_phase)),
      0.5 * spec.abs_tol, 0.5 * spec.rel_tol, spec.max_subdivisions);

  KernelParts parts;
  parts.propagating = prop.value;
  parts.evanescent = ComplexValue(evan.value, 0.0);
  parts.error = prop.error + evan.error + tail_bound;
  if (!prop.converged || !evan.converged)
    throw convergence_error("kernel_quadrature: quadrature did not converge",
                            parts.propagating + parts.evanescent, parts.error);
  return parts;
}

Result kernel_quadrature(const ModeWavenumber& mode, double x, double z,
                         const QuadratureSpec& spec) {
  const KernelParts parts = kernel_quadrature_parts(mode, x, z, spec);
  return {parts.propagating + parts.evanescent, parts.error};
}

namespace {

// T(s) = Int_s^inf e^{i pi t^2/2} dt for s >= 0, on the descent contour
// t = s + v e^{i pi/4}:
//   T(s) = e^{i pi s^2/2} e^{i pi/4}
//          Int_0^V e^{-pi v^2/2 - pi s v/sqrt2} e^{i pi s v/sqrt2} dv,
// with V placed where the damping reaches e^{-42}.
ComplexValue fresnel_tail_quad(double s, const QuadratureSpec& spec,
                               double* err_acc) {
  const double upper = -s * M_SQRT1_2 + std::sqrt(0.5 * s * s + 84.0 / M_PI);
  auto f = [s](double v) -> ComplexValue {
    const double damp =
        std::exp(-0.5 * M_PI * v * v - M_PI * s * v * M_SQRT1_2);
    const double ph = M_PI * s * v * M_SQRT1_2;
    return damp * ComplexValue(std::cos(ph), std::sin(ph));
  };
  const auto est = quad::adaptive(
      f, quad::uniform_breaks(0.0, upper, panel_count(M_PI * s * upper * M_SQRT1_2)),
      spec.abs_tol, spec.rel_tol, spec.max_subdivisions);
  const ComplexValue inner = require(est, "moshinsky0_quadrature");
  *err_acc += est.error + 1e-18;
  return std::polar(1.0, 0.5 * M_PI * s * s + 0.25 * M_PI) * inner;
}

}  // namespace

Result moshinsky0_quadrature(const ModeWavenumber& mode, double x, double z,
                             const QuadratureSpec& spec) {
  check_mode(mode, "moshinsky0_quadrature");
  if (!(z > 0.0)) throw std::domain_error("moshinsky0_quadrature: need Z > 0");
  // After u = sqrt(pi Z/k) t the aperture integral is a pure Fresnel phase:
  //   M0 = sqrt(-i/2) e^{ikZ} Int_{-inf}^{w} e^{i pi t^2/2} dt,
  //   w = sqrt(k/(pi Z)) X.
  const double w = std::sqrt(mode.k / (M_PI * z)) * x;
  double err = 0.0;
  ComplexValue j;
  if (w < 0.0) {
    j = fresnel_tail_quad(-w, spec, &err);
  } else {
    j = 2.0 * fresnel_tail_quad(0.0, spec, &err) -
        fresnel_tail_quad(w, spec, &err);
  }
  const double kz = mode.k * z;
  const ComplexValue pref =
      ComplexValue(0.5, -0.5) * ComplexValue(std::cos(kz), std::sin(kz));
  return {pref * j, std::abs(pref) * err};
}

Result moshinsky_variable_limits_quadrature(const Scenario& scenario, double x,
                                            double z, double r_prime,
                                            double theta_prime,
                                            const ModeWavenumber& mode,
                                            KernelKind kind,
                                            const QuadratureSpec& spec) {
  scenario.validate();
  check_mode(mode, "moshinsky_variable_limits_quadrature");
  if (!(z > 0.0))
    throw std::domain_error("moshinsky_variable_limits_quadrature: need Z > 0");
  if (!(scenario.a > 0.0))
    throw std::domain_error(
        "moshinsky_variable_limits_quadrature: need oscillator length a > 0");
  const EdgeGeometry eg =
      kernels::edge_geometry(r_prime, theta_prime, scenario.m1, scenario.m2);
  if (eg.blocked()) return {ComplexValue(0.0, 0.0), 0.0};

  const double lo = x - eg.x_plus;
  const double hi = x - eg.x_minus;
  double phase_span;
  if (kind == KernelKind::exact) {
    const double rlo = std::hypot(lo, z);
    const double rhi = std::hypot(hi, z);
    phase_span = (lo < 0.0 && hi > 0.0) ? mode.k * (rlo + rhi - 2.0 * z)
                                        : mode.k * std::abs(rhi - rlo);
  } else {
    phase_span = (lo < 0.0 && hi > 0.0)
                     ? 0.5 * mode.k * (lo * lo + hi * hi) / z
                     : 0.5 * mode.k * std::abs(hi * hi - lo * lo) / z;
  }
  auto f = [&](double u) { return kernels::kernel(kind, mode, u, z); };
  const auto est =
      quad::adaptive(f, quad::uniform_breaks(lo, hi, panel_count(phase_span)),
                     spec.abs_tol, spec.rel_tol, spec.max_subdivisions);
  const ComplexValue inner =
      require(est, "moshinsky_variable_limits_quadrature");
  const double radial =
      molecule::radial_wavefn(scenario.initial, r_prime, scenario.molecule());
  const ComplexValue phi_fac =
      radial * std::polar(1.0, scenario.initial.l * theta_prime);
  return {phi_fac * inner, std::abs(phi_fac) * est.error};
}

namespace {

RealResult angular_coeff_quadrature_impl(int l, int l0, double m1, double m2,
                                         const QuadratureSpec& spec,
                                         bool plus_branch) {
  if (!(m1 > 0.0) || !(m2 > 0.0))
    throw std::domain_error("angular coefficient quadrature: masses must be positive");
  const double total = m1 + m2;
  const int dl = l0 - l;
  auto f = [&](double theta) -> ComplexValue {
    const double c = std::cos(theta);
    const double t1 = m2 * c / total;
    const double t2 = -m1 * c / total;
    const double s = plus_branch ? std::min(t1, t2) : std::max(t1, t2);
    return s * std::polar(1.0, dl * theta);
  };
  // Piecewise smooth across the cos(theta) sign changes.
  const double bounds[4] = {0.0, 0.5 * M_PI, 1.5 * M_PI, 2.0 * M_PI};
  ComplexValue value = 0.0;
  double err = 0.0;
  for (int seg = 0; seg < 3; ++seg) {
    const double a = bounds[seg];
    const double b = bounds[seg + 1];
    const auto est = quad::adaptive(
        f, quad::uniform_breaks(a, b, panel_count((std::abs(dl) + 1.0) * (b - a))),
        spec.abs_tol / 3.0, spec.rel_tol, spec.max_subdivisions);
    value += require(est, "angular coefficient quadrature");
    err += est.error;
  }
  if (std::abs(value.imag()) > 1e-9)
    throw convergence_error(
        "angular coefficient quadrature: residual imaginary part", value,
        std::abs(value.imag()));
  return {value.real(), err + std::abs(value.imag())};
}

}  // namespace

RealResult angular_coeff_f_quadrature(int l, int l0, double m1, double m2,
                                      const QuadratureSpec& spec) {
  return angular_coeff_quadrature_impl(l, l0, m1, m2, spec, false);
}

RealResult angular_coeff_g_quadrature(int l, int l0, double m1, double m2,
                                      const QuadratureSpec& spec) {
  return angular_coeff_quadrature_impl(l, l0, m1, m2, spec, true);
}

RealResult matrix_element_quadrature(InternalState state, InternalState initial,
                                     const HarmonicMolecule& molecule,
                                     const QuadratureSpec& spec) {
  if (molecule.a == 0.0) return {0.0, 0.0};
  const double span = 2.0 * (state.n + initial.n) + std::abs(state.l) +
                      std::abs(initial.l) + 2.0;
  const double rmax = molecule.a * (7.0 + std::sqrt(span));
  auto f = [&](double r) {
    return r * r * molecule::radial_wavefn(state, r, molecule) *
           molecule::radial_wavefn(initial, r, molecule);
  };
  const auto est = quad::adaptive(f, quad::uniform_breaks(0.0, rmax, 16),
                                  spec.abs_tol * molecule.a, spec.rel_tol,
                                  spec.max_subdivisions);
  require(est, "matrix_element_quadrature");
  return {est.value, est.error};
}

RealResult density_quadrature(const Scenario& scenario, double x, double z,
                              const QuadratureSpec& spec) {
  scenario.validate();
  if (scenario.grating)
    throw std::domain_error("density_quadrature: single slit only");
  if (scenario.a == 0.0) {
    const ModeWavenumber mode =
        kernels::mode_wavenumber(scenario, scenario.initial);
    const Result a_plus = moshinsky0_quadrature(mode, x + 0.5, z, spec);
    const Result a_minus = moshinsky0_quadrature(mode, x - 0.5, z, spec);
    const ComplexValue m = a_plus.value - a_minus.value;
    return {std::norm(m), 2.0 * std::abs(m) * (a_plus.error + a_minus.error)};
  }

  const auto modes = molecule::enumerate_modes(scenario);
  const HarmonicMolecule mol = scenario.molecule();
  const double rmax = mol.a * 8.0;
  const auto gl_r = quad::gauss_legendre(32);
  const auto gl_t = quad::gauss_legendre(16);
  const double bounds[4] = {0.0, 0.5 * M_PI, 1.5 * M_PI, 2.0 * M_PI};

  double density = 0.0;
  double err = 0.0;
  for (const auto& mw : modes) {
    if (!mw.wavenumber.propagating()) continue;
    ComplexValue amp = 0.0;
    double amp_err = 0.0;
    for (const auto& rn : gl_r) {
      const double r = 0.5 * rmax * (1.0 + rn.x);
      const double wr = 0.5 * rmax * rn.w;
      const double proj = molecule::radial_wavefn(mw.state, r, mol) * r;
      for (int seg = 0; seg < 3; ++seg) {
        const double mid = 0.5 * (bounds[seg] + bounds[seg + 1]);
        const double half = 0.5 * (bounds[seg + 1] - bounds[seg]);
        for (const auto& tn : gl_t) {
          const double theta = mid + half * tn.x;
          const Result inner = moshinsky_variable_limits_quadrature(
              scenario, x, z, r, theta, mw.wavenumber, scenario.kernel, spec);
          const double weight = wr * half * tn.w * proj;
          amp += weight * std::polar(1.0, -mw.state.l * theta) * inner.value;
          amp_err += std::abs(weight) * inner.error;
        }
      }
    }
    density += std::norm(amp);
    err += 2.0 * std::abs(amp) * amp_err;
  }
  return {density, err};
}

namespace {

struct CheckReport {
  std::ostream& out;
  int passed = 0;
  int total = 0;

  void line(bool ok, const std::string& name, double measure, double bound) {
    ++total;
    if (ok) ++passed;
    std::ostringstream s;
    s.precision(2);
    s << (ok ? "[ok]   " : "[FAIL] ") << name << " (measure " << std::scientific
      << measure << ", bound " << bound << ")";
    out << s.str() << "\n";
  }
};

double rel_diff(ComplexValue got, ComplexValue want) {
  const double scale = std::max(std::abs(want), 1e-300);
  return std::abs(got - want) / scale;
}

}  // namespace

bool run_selfcheck(std::ostream& out) {
  CheckReport rep{out};

  {  // Quadrature table sanity: weights and high-degree exactness.
    double wsum = 0.0;
    for (int i = 0; i < 8; ++i)
      wsum += quad::kGK15Weights[i] * (i < 7 ? 2.0 : 1.0);
    auto poly = [](double t) { return std::pow(t, 20); };
    const auto est = quad::gk15(poly, 0.0, 1.0);
    const double dev = std::max(std::abs(wsum - 2.0),
                                std::abs(est.value - 1.0 / 21.0) * 21.0);
    rep.line(dev < 1e-13, "gauss-kronrod 7-15 table", dev, 1e-13);
  }

  Scenario crystal;
  crystal.lambda = 0.363;
  crystal.a = 0.335;
  const ModeWavenumber k_crystal =
      kernels::mode_wavenumber(crystal, crystal.initial);

  {  // Exact kernel vs angular-spectrum quadrature.
    const double pts[3][2] = {{0.0, 5.0}, {1.5, 2.0}, {3.0, 0.8}};
    double worst = 0.0;
    for (const auto& p : pts) {
      const Result q = kernel_quadrature(k_crystal, p[0], p[1]);
      worst = std::max(
          worst, rel_diff(kernels::kernel_exact(k_crystal, p[0], p[1]), q.value));
    }
    rep.line(worst < 1e-6, "exact kernel vs angular-spectrum quadrature", worst,
             1e-6);
  }

  Scenario fine;
  fine.lambda = 2.0 * M_PI / 500.0;
  fine.a = 0.0;
  const ModeWavenumber k_fine = kernels::mode_wavenumber(fine, fine.initial);

  {  // Half-plane amplitude vs direct kernel integration (both Fresnel
     // branches of the closed form get exercised).
    const double pts[4][2] = {{0.0, 40.0}, {1.5, 60.0}, {-2.0, 30.0}, {6.0, 50.0}};
    double worst = 0.0;
    for (const auto& p : pts) {
      const Result q = moshinsky0_quadrature(k_fine, p[0], p[1]);
      worst = std::max(
          worst, rel_diff(kernels::moshinsky0(k_fine, p[0], p[1]), q.value));
    }
    rep.line(worst < 1e-6, "half-plane amplitude vs kernel quadrature", worst,
             1e-6);
  }

  {  // Angular coefficients: closed form vs quadrature, two mass splits.
    const double masses[2][2] = {{20.0, 26.0}, {3.0, 11.0}};
    double worst = 0.0;
    for (const auto& m : masses) {
      for (int dl = 0; dl <= 4; dl += 2) {
        const RealResult fq = angular_coeff_f_quadrature(dl, 0, m[0], m[1]);
        const RealResult gq = angular_coeff_g_quadrature(dl, 0, m[0], m[1]);
        worst = std::max(worst,
                         std::abs(fq.value - molecule::angular_coeff_f(dl, 0)));
        worst = std::max(worst,
                         std::abs(gq.value - molecule::angular_coeff_g(dl, 0)));
        worst = std::max(worst, std::abs(fq.value + gq.value));
      }
    }
    rep.line(worst < 1e-9, "angular coefficients vs quadrature", worst, 1e-9);
  }

  {  // Matrix elements: Talmi series vs radial quadrature vs closed form.
    const HarmonicMolecule mol{0.7, 20.0, 26.0};
    const InternalState states[5] = {{0, 0}, {1, 0}, {0, 2}, {1, 2}, {0, 3}};
    double worst = 0.0;
    for (const auto& s : states) {
      const double series = molecule::reduced_matrix_element(s, {0, 0}, mol);
      const double closed = molecule::reduced_matrix_element_ground(s, mol);
      const RealResult q = matrix_element_quadrature(s, {0, 0}, mol);
      worst = std::max(worst, std::abs(series - q.value));
      worst = std::max(worst, std::abs(series - closed));
    }
    rep.line(worst < 1e-9, "reduced matrix elements, three routes", worst, 1e-9);
  }

  {  // Variable-limit oracle: theta' = pi/2 removes the edge shifts, so the
     // amplitude per unit wavefunction matches the r' = 0 one exactly.
    const double r_prime = 0.2;
    const Result shifted = moshinsky_variable_limits_quadrature(
        crystal, 0.7, 3.0, r_prime, 0.5 * M_PI, k_crystal);
    const Result centered = moshinsky_variable_limits_quadrature(
        crystal, 0.7, 3.0, 0.0, 0.0, k_crystal);
    const double phi_s =
        molecule::radial_wavefn(crystal.initial, r_prime, crystal.molecule());
    const double phi_c =
        molecule::radial_wavefn(crystal.initial, 0.0, crystal.molecule());
    const double worst =
        rel_diff(shifted.value / phi_s, centered.value / phi_c);
    rep.line(worst < 1e-8, "variable-limit geometry at theta' = pi/2", worst,
             1e-8);
  }

  {  // Point-particle density: closed form vs quadrature assembly.
    const Result plus = moshinsky0_quadrature(k_fine, 0.3 + 0.5, 60.0);
    const Result minus = moshinsky0_quadrature(k_fine, 0.3 - 0.5, 60.0);
    const double qd = std::norm(plus.value - minus.value);
    const double cd = std::norm(kernels::moshinsky_slit(k_fine, 0.3, 60.0));
    const double worst = std::abs(qd - cd) / std::max(cd, 1e-300);
    rep.line(worst < 1e-6, "point-particle slit density vs quadrature", worst,
             1e-6);
  }

  out << "selfcheck: " << rep.passed << "/" << rep.total << " checks passed\n";
  return rep.passed == rep.total;
}

}  // namespace moldiff::oracle
