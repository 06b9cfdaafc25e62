#pragma once

#include <cmath>
#include <complex>
#include <cstdlib>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

// Shared vocabulary for the diffraction modules.
//
// Unit conventions: the slit width L is the unit of length, so positions X, Z
// and the oscillator length a are dimensionless multiples of L and wavenumbers
// carry units 1/L. Masses are in atomic mass units (only ratios ever enter).

namespace moldiff {

using ComplexValue = std::complex<double>;

// Thrown for malformed configuration input (bad flags, unreadable files,
// invalid grids). The CLI maps it to exit code 2.
class config_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Thrown for physically inconsistent scenarios (non-positive wavelength or
// masses, impossible geometry). The CLI maps it to exit code 3.
class physics_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Thrown when adaptive quadrature fails to reach the requested tolerance.
// Carries the best value achieved and its error estimate.
class convergence_error : public std::runtime_error {
 public:
  convergence_error(const std::string& what, ComplexValue achieved,
                    double error_estimate)
      : std::runtime_error(what),
        achieved(achieved),
        error_estimate(error_estimate) {}

  ComplexValue achieved;
  double error_estimate = 0.0;
};

// Internal 2-D oscillator state (n radial quanta, l angular momentum).
struct InternalState {
  int n = 0;
  int l = 0;

  // Energy index 2n + |l|; level spacing is one oscillator quantum per unit.
  int energy_index() const { return 2 * n + std::abs(l); }

  bool operator==(const InternalState& o) const { return n == o.n && l == o.l; }
};

// Rigid diatomic bound harmonically at oscillator length a (units of L).
// a = 0 is the point-particle limit and is accepted everywhere it does not
// divide a formula.
struct HarmonicMolecule {
  double a = 0.0;
  double m1 = 20.0;
  double m2 = 26.0;

  double total_mass() const { return m1 + m2; }
  double reduced_mass() const { return m1 * m2 / (m1 + m2); }
  double beta() const { return 1.0 / (a * a); }
};

enum class Classification { propagating, evanescent };

// Center-of-mass wavenumber of one internal channel,
//   k^2 = (2 pi / lambda)^2 - 2 (M/mu) (1/a^2) [(2n+|l|) - (2n0+|l0|)].
// k holds sqrt(k^2) for propagating modes and 0 for evanescent ones;
// k_squared keeps the signed value so diagnostics can report decay constants.
struct ModeWavenumber {
  double k = 0.0;
  double k_squared = 0.0;
  Classification classification = Classification::propagating;
  InternalState state;

  bool propagating() const {
    return classification == Classification::propagating;
  }
  // Decay constant sqrt(-k^2) for evanescent modes.
  double kappa() const { return k_squared < 0.0 ? std::sqrt(-k_squared) : 0.0; }
};

// Slit-edge geometry seen by a molecule with internal offset (r', theta'):
//   S- = max(m2 cos(theta')/M, -m1 cos(theta')/M),  S+ = min(...),
//   X-+ = r' S-+ -+ L/2  (lower/upper truncation limits of the aperture).
struct EdgeGeometry {
  double s_minus = 0.0;
  double s_plus = 0.0;
  double x_minus = 0.0;
  double x_plus = 0.0;

  // The slit is blocked for this offset when the limits cross.
  bool blocked() const { return x_minus > x_plus; }
};

// One internal mode with its first-order excitation weight.
struct ModeWeight {
  InternalState state;
  double radial_element = 0.0;  // <n l||r'||n0 l0>, proportional to a
  double angular_coeff = 0.0;   // f_{l l0}
  double combined = 0.0;        // radial_element * angular_coeff
  ModeWavenumber wavenumber;
};

// Mode-sum truncation controls.
struct Cutoffs {
  int n_max = 8;
  int delta_l_max = 8;
  double weight_floor = 1e-4;
};

enum class KernelKind { exact, paraxial };

struct GratingSpec {
  double d = 8.0;  // period, units of L
  int half_count = 20;  // N: slits at offsets k*d for k = -N..N
};

// A full physical configuration: one incident molecule on one aperture.
struct Scenario {
  double lambda = 0.363;  // de Broglie wavelength over L
  double a = 0.0;         // oscillator length over L
  double m1 = 20.0;
  double m2 = 26.0;
  InternalState initial;
  std::optional<GratingSpec> grating;  // nullopt = single slit
  KernelKind kernel = KernelKind::exact;
  Cutoffs cutoffs;

  double k0() const { return 2.0 * M_PI / lambda; }
  HarmonicMolecule molecule() const { return {a, m1, m2}; }

  // Throws physics_error on invalid physical input.
  void validate() const;
};

// Rectangular evaluation grid, inclusive endpoints.
struct GridSpec {
  double x_min = -3.0;
  double x_max = 3.0;
  int nx = 400;
  double z_min = 1e-3;
  double z_max = 20.0;
  int nz = 400;

  // Throws config_error on degenerate extents or counts.
  void validate() const;
};

struct ValidityWarning {
  enum class Severity { note, strong };
  Severity severity = Severity::note;
  std::string message;
};

// Closest approach to the slit plane the formulas are trusted at.
inline constexpr double kZMin = 1e-3;

// Sampled density with everything needed to reproduce and annotate the run.
struct DensityField {
  std::vector<double> xs;
  std::vector<double> zs;
  std::vector<double> values;  // row-major, Z outer: values[iz * nx + ix]
  std::vector<ModeWeight> modes;
  std::vector<ValidityWarning> warnings;
  double truncation_tail = 0.0;  // |weight|^2 fraction outside the cutoffs
  double elapsed_seconds = 0.0;

  double at(int iz, int ix) const {
    return values[static_cast<size_t>(iz) * xs.size() + ix];
  }
};

inline void Scenario::validate() const {
  if (!(lambda > 0.0) || !std::isfinite(lambda))
    throw physics_error("wavelength must be positive and finite");
  if (!(m1 > 0.0) || !(m2 > 0.0)) throw physics_error("masses must be positive");
  if (!(a >= 0.0) || !std::isfinite(a))
    throw physics_error("oscillator length must be nonnegative and finite");
  if (initial.n < 0) throw physics_error("initial state needs n >= 0");
  if (cutoffs.n_max < 0 || cutoffs.delta_l_max < 0)
    throw physics_error("mode cutoffs must be nonnegative");
  if (!(cutoffs.weight_floor >= 0.0) || cutoffs.weight_floor > 1.0)
    throw physics_error("weight floor must lie in [0, 1]");
  if (grating) {
    if (!(grating->d > 1.0))
      throw physics_error("grating period must exceed the slit width");
    if (grating->half_count < 0)
      throw physics_error("grating half-count must be nonnegative");
  }
}

inline void GridSpec::validate() const {
  if (nx < 2 || nz < 2) throw config_error("grid needs nx, nz >= 2");
  if (!(x_min < x_max)) throw config_error("grid needs x_min < x_max");
  if (!(z_min > 0.0) || !(z_min < z_max))
    throw config_error("grid needs 0 < z_min < z_max");
  if (z_min < kZMin)
    throw physics_error("z_min lies below the trusted minimum 1e-3");
}

}  // namespace moldiff
