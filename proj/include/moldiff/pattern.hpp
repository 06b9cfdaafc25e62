#pragma once

#include "moldiff/types.hpp"

// Center-of-mass density patterns behind single slits and finite periodic
// gratings, assembled from the first-order mode expansion:
//   rho(X, Z) = |M_{L,N}(k0) - w0 K_{L,N}(k0)|^2
//               + sum_{propagating modes != initial} w^2 |K_{L,N}(k_m)|^2,
// where M_{L,N} and K_{L,N} are the slit amplitudes summed over grating
// offsets, w = <n l||r'||n0 l0> f_{l l0}, and w0 is the initial-state weight.
// This grouping is algebraically identical to the expanded three-term form
// and keeps the density nonnegative in floating point.

namespace moldiff::pattern {

// Per-scenario mode bookkeeping shared by all points of a scan.
class ModeTable {
 public:
  explicit ModeTable(const Scenario& scenario);

  // Propagating modes merged by energy index (they share one wavenumber).
  // The initial-index group always comes first and its weight_sq_sum
  // excludes the initial state itself (that weight sits in the cross term).
  struct Group {
    ModeWavenumber wavenumber;
    double weight_sq_sum = 0.0;
  };

  const std::vector<ModeWeight>& modes() const { return modes_; }
  const std::vector<Group>& groups() const { return groups_; }
  double initial_weight() const { return initial_weight_; }
  const ModeWavenumber& initial_mode() const { return groups_[0].wavenumber; }
  double truncation_tail() const { return truncation_tail_; }

 private:
  std::vector<ModeWeight> modes_;
  std::vector<Group> groups_;
  double initial_weight_ = 0.0;
  double truncation_tail_ = 0.0;
};

// Density at one point; the scenario's geometry selects slit vs grating.
// Z below the trusted minimum (1e-3) raises domain_error.
double density(const Scenario& scenario, const ModeTable& table, double x,
               double z);
double density(const Scenario& scenario, double x, double z);

// Forced-geometry variants: the single-slit form ignores any grating spec,
// and a grating with N = 0 reproduces it bit for bit (same code path).
double density_single_slit(const Scenario& scenario, double x, double z);
double density_grating(const Scenario& scenario, double x, double z);

// Talbot revival length L_T = 2 d^2 / lambda.
double talbot_length(double d, double lambda);

struct FocusResult {
  double z_star = 0.0;
  double value = 0.0;
  bool on_boundary = false;
};

// Scan density along Z at fixed X, then refine the best sample with a
// parabolic fit through its neighbors. Ties keep the smaller Z; a maximum on
// the scan boundary is returned unrefined and flagged.
FocusResult find_focus(const Scenario& scenario, double x, double z_lo,
                       double z_hi, int samples);

struct Region {
  double x_max = 0.0;
  double z_min = kZMin;
  double z_max = 0.0;
};

// Applicability screening of the closed forms over a region:
//   lambda/L > 1          -> strong (edge expansion of the aperture fails),
//   lambda/Z_min > 0.5    -> strong, > 0.1 -> note (slit-plane proximity),
//   a/L >= 0.5            -> strong, >= 0.1 -> note (first-order truncation).
std::vector<ValidityWarning> validity_check(const Scenario& scenario,
                                            const Region& region);

// Dense scan over an inclusive grid, row-parallel over Z with contiguous
// blocks and positional writes: results are byte-identical for every thread
// count. threads <= 0 selects the hardware concurrency.
DensityField evaluate_grid(const Scenario& scenario, const GridSpec& grid,
                           int threads = 1);

}  // namespace moldiff::pattern
