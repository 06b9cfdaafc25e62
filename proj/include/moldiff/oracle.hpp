#pragma once

#include <iosfwd>

#include "moldiff/types.hpp"

// Brute-force quadrature oracles. Each closed form in kernels/, molecule/
// and pattern/ has an independent realization here that integrates the
// defining expression directly; tests and the shipped selfcheck compare the
// two routes. Cost grows with the accumulated phase k(|X| + Z), so these are
// for validation, not for field scans.

namespace moldiff::oracle {

struct QuadratureSpec {
  double abs_tol = 1e-10;
  double rel_tol = 1e-9;
  int max_subdivisions = 4000;
  // Upper limit (units 1/L) for the evanescent transverse-wavenumber branch.
  // 0 selects the automatic cutoff from the integrand bound e^{-qZ}
  // (truncate where q_max Z = 36, remainder folded into the error estimate).
  // A nonzero value must be >= 4k for the mode under test.
  double oscillatory_cutoff = 0.0;
};

struct Result {
  ComplexValue value;
  double error = 0.0;
};

struct RealResult {
  double value = 0.0;
  double error = 0.0;
};

// Angular-spectrum (Weyl) form of the half-space kernel,
//   K(X, Z) = (1/pi) Int_0^inf cos(qX) e^{i sqrt(k^2 - q^2) Z} dq,
// split into the propagating band q <= k (equal-phase panels, >= 16 samples
// per oscillation) and the evanescent branch q > k (cosh substitution).
// Throws convergence_error with the achieved estimate when the panel budget
// runs out.
Result kernel_quadrature(const ModeWavenumber& mode, double x, double z,
                         const QuadratureSpec& spec = {});

// Same computation with the two branches reported separately.
struct KernelParts {
  ComplexValue propagating;
  ComplexValue evanescent;
  double error = 0.0;
};
KernelParts kernel_quadrature_parts(const ModeWavenumber& mode, double x,
                                    double z, const QuadratureSpec& spec = {});

// Half-plane amplitude M0(X, Z) = Int_0^inf K_par(X - X', Z) dX' by direct
// integration of the paraxial kernel (rotated-contour tail for the infinite
// end; no Fresnel-function calls anywhere in this path).
Result moshinsky0_quadrature(const ModeWavenumber& mode, double x, double z,
                             const QuadratureSpec& spec = {});

// Variable-limit aperture integral for a frozen internal offset (r', theta'):
//   phi_{n0l0}(r', theta') Int_{X-}^{X+} K(X - X', Z) dX',
// the object the first-order edge expansion approximates. Exactly zero when
// the limits cross (blocked geometry).
Result moshinsky_variable_limits_quadrature(const Scenario& scenario, double x,
                                            double z, double r_prime,
                                            double theta_prime,
                                            const ModeWavenumber& mode,
                                            KernelKind kind = KernelKind::exact,
                                            const QuadratureSpec& spec = {});

// Angular coefficients from their defining integrals
//   f = Int_0^{2pi} S-(theta) e^{i(l0-l)theta} dtheta  (g with S+, negated
// sign convention), integrated piecewise across the |cos| kinks. A residual
// imaginary part above 1e-9 raises convergence_error.
RealResult angular_coeff_f_quadrature(int l, int l0, double m1, double m2,
                                      const QuadratureSpec& spec = {});
RealResult angular_coeff_g_quadrature(int l, int l0, double m1, double m2,
                                      const QuadratureSpec& spec = {});

// <n l||r'||n0 l0> = Int_0^inf r^2 R_{nl} R_{n0l0} dr by direct quadrature.
RealResult matrix_element_quadrature(InternalState state, InternalState initial,
                                     const HarmonicMolecule& molecule,
                                     const QuadratureSpec& spec = {});

// Center-of-mass marginal density by mode projection: for every propagating
// mode in the scenario's table, project the variable-limit amplitude onto
// phi_{nl} over (r', theta') and add |amplitude|^2. Single slit only; this
// is the reference the closed-form density is validated against.
RealResult density_quadrature(const Scenario& scenario, double x, double z,
                              const QuadratureSpec& spec = {});

// Fixed cross-validation suite (closed forms vs oracles at pinned points).
// Prints one line per check to `out`; returns true when everything passes.
bool run_selfcheck(std::ostream& out);

}  // namespace moldiff::oracle
