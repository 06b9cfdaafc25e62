#pragma once

#include <vector>

#include "moldiff/types.hpp"

// Internal structure of the harmonically bound diatomic: 2-D oscillator
// eigenfunctions, first-order transition matrix elements, and the mode
// bookkeeping for the diffraction sums.

namespace moldiff::molecule {

// Radial factor of phi_{nl}(r, theta) = R_{nl}(r) e^{i l theta}, normalized
// so that Int |phi|^2 r dr dtheta = 1:
//   R_{nl}(r) = sqrt(beta n! / (pi (n+|l|)!)) (sqrt(beta) r)^{|l|}
//               e^{-beta r^2/2} L_n^{|l|}(beta r^2),  beta = 1/a^2.
double radial_wavefn(InternalState state, double r,
                     const HarmonicMolecule& molecule);

// Level energy (2n + |l| + 1) hbar omega expressed in units of
// hbar^2/(2 M L^2), i.e. (2n + |l| + 1) * 2 (M/mu) / a^2, so the kernel
// dispersion k^2 = k0^2 - (E_{nl} - E_{n0l0}) needs no further factors.
double energy(InternalState state, const HarmonicMolecule& molecule);

// Reduced radial matrix element <n l||r'||n0 l0> = Int_0^inf r^2 R R0 dr,
// evaluated through the Talmi-integral series. Proportional to a; zero for
// a point particle.
double reduced_matrix_element(InternalState state, InternalState initial,
                              const HarmonicMolecule& molecule);

// Closed form of the same element for the ground initial state (n0 = l0 = 0):
//   <n l||r'||0 0> = a Gamma(n + |l|/2 - 1/2) (l^2 - 1)
//                      sqrt(n!/(n+|l|)!) / (8 pi Gamma(n+1)),
// with the |l| = 1 cases taken as limits (a/(2 pi) for n = 0, else 0).
double reduced_matrix_element_ground(InternalState state,
                                     const HarmonicMolecule& molecule);

// Angular edge coefficients: f_{l l0} = Int_0^{2pi} S-(theta) e^{i(l0-l)theta}
// dtheta / (normalization carried by S-), which collapses to
//   f = cos(pi (l-l0)/2) * 2/(1 - (l-l0)^2)   for even l - l0,
//   f = 0                                      for odd l - l0,
// independent of the masses; g_{l l0} = -f_{l l0} exactly.
double angular_coeff_f(int l, int l0);
double angular_coeff_g(int l, int l0);

// Combined first-order weight <n l||r'||n0 l0> * f_{l l0}.
double mode_weight(InternalState state, InternalState initial,
                   const HarmonicMolecule& molecule);

// All modes with |l - l0| even and within the scenario cutoffs whose
// |combined| weight reaches weight_floor * max|combined|, sorted by
// descending |combined| (ties by energy index, then n, then l), each tagged
// with its wavenumber classification. A point particle yields exactly the
// initial mode with zero weight.
std::vector<ModeWeight> enumerate_modes(const Scenario& scenario);

// Fraction of summed |combined|^2 sitting just outside the cutoff box
// (n_max + 2, delta_l_max + 4 scan), reported with run summaries.
double truncation_tail_estimate(const Scenario& scenario);

}  // namespace moldiff::molecule
