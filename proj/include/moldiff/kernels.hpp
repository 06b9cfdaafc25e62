#pragma once

#include "moldiff/types.hpp"

// Free-propagation kernels and their edge-truncated (Moshinsky) integrals,
// for a slit of unit width centered on X = 0 in the plane Z = 0.

namespace moldiff::kernels {

// Center-of-mass wavenumber of the channel `state`:
//   k^2 = k0^2 - 2 (M/mu) (1/a^2) [(2n+|l|) - (2n0+|l0|)],  k0 = 2 pi/lambda.
// Channels sharing the initial energy index carry exactly k0. For a point
// particle (a = 0) every other channel is tagged evanescent.
ModeWavenumber mode_wavenumber(const Scenario& scenario, InternalState state);

// Exact half-space kernel K(X, Z) = i kZ/(2 sqrt(X^2+Z^2)) H1(k sqrt(X^2+Z^2)).
// Requires Z > 0 and a propagating mode (domain_error otherwise).
ComplexValue kernel_exact(const ModeWavenumber& mode, double x, double z);

// Paraxial kernel K(X, Z) = sqrt(k/(2 pi i Z)) e^{i k (Z + X^2/(2Z))}.
ComplexValue kernel_paraxial(const ModeWavenumber& mode, double x, double z);

ComplexValue kernel(KernelKind kind, const ModeWavenumber& mode, double x,
                    double z);

// Half-plane (single edge at X' = 0) Moshinsky amplitude in the paraxial
// regime:
//   M0(X, Z) = sqrt(-i/2) e^{ikZ} [(1 + i)/2 + C(w) + i S(w)],
//   w = sqrt(k/(pi Z)) X.
ComplexValue moshinsky0(const ModeWavenumber& mode, double x, double z);

// Slit amplitude M_L(X, Z) = M0(X + 1/2, Z) - M0(X - 1/2, Z), evaluated as
// exactly that difference.
ComplexValue moshinsky_slit(const ModeWavenumber& mode, double x, double z);

// Edge-anchored kernel sum K_L(X, Z) = K(X + 1/2, Z) + K(X - 1/2, Z).
ComplexValue kernel_slit(const ModeWavenumber& mode, double x, double z,
                         KernelKind kind = KernelKind::exact);

// Slit-edge truncation geometry for a frozen internal offset (r', theta'):
//   S- = max(m2 c/M, -m1 c/M), S+ = min(m2 c/M, -m1 c/M), c = cos(theta'),
//   X-+ = r' S-+ -+ 1/2.
EdgeGeometry edge_geometry(double r_prime, double theta_prime, double m1,
                           double m2);

// First-order slit amplitude for a frozen internal offset:
//   M = M_L(X, Z) - r' [S- K(X + 1/2, Z) - S+ K(X - 1/2, Z)].
// (The internal wavefunction factor is the caller's business.)
ComplexValue moshinsky_slit_first_order(const ModeWavenumber& mode, double x,
                                        double z, double r_prime,
                                        double theta_prime, double m1,
                                        double m2,
                                        KernelKind kind = KernelKind::exact);

}  // namespace moldiff::kernels
