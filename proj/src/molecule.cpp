#include "moldiff/molecule.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "moldiff/kernels.hpp"
#include "moldiff/specfun.hpp"

namespace moldiff::molecule {

namespace {

void check_state(InternalState s, const char* who) {
  if (s.n < 0) throw std::domain_error(std::string(who) + ": need n >= 0");
}

// sqrt(n! n0! / ((n+al)! (n0+al0)!)) in long double.
long double norm_ratio(int n, int al, int n0, int al0) {
  const long double lg = 0.5L * (std::lgammal(n + 1.0L) + std::lgammal(n0 + 1.0L) -
                                 std::lgammal(n + al + 1.0L) -
                                 std::lgammal(n0 + al0 + 1.0L));
  return std::exp(lg);
}

}  // namespace

double radial_wavefn(InternalState state, double r,
                     const HarmonicMolecule& molecule) {
  check_state(state, "radial_wavefn");
  if (!(molecule.a > 0.0))
    throw std::domain_error("radial_wavefn: need oscillator length a > 0");
  if (r < 0.0) throw std::domain_error("radial_wavefn: need r >= 0");
  const int al = std::abs(state.l);
  const double beta = molecule.beta();
  const double t = beta * r * r;
  const double norm = std::sqrt(
      beta / M_PI *
      std::exp(std::lgamma(state.n + 1.0) - std::lgamma(state.n + al + 1.0)));
  return norm * std::pow(std::sqrt(beta) * r, al) * std::exp(-0.5 * t) *
         specfun::laguerre(state.n, al, t);
}

double energy(InternalState state, const HarmonicMolecule& molecule) {
  check_state(state, "energy");
  if (!(molecule.a > 0.0))
    throw std::domain_error("energy: need oscillator length a > 0");
  const double mass_ratio = molecule.total_mass() / molecule.reduced_mass();
  return (state.energy_index() + 1.0) * 2.0 * mass_ratio /
         (molecule.a * molecule.a);
}

double reduced_matrix_element(InternalState state, InternalState initial,
                              const HarmonicMolecule& molecule) {
  check_state(state, "reduced_matrix_element");
  check_state(initial, "reduced_matrix_element");
  if (molecule.a == 0.0) return 0.0;
  const int al = std::abs(state.l);
  const int al0 = std::abs(initial.l);
  const auto coeff = specfun::laguerre_product_coefficients(state.n, al,
                                                            initial.n, al0);
  // T(k + (|l|+|l0|)/2) = Gamma(k + (|l|+|l0|+3)/2)/2; the argument doubled
  // is always an integer, so the exact half-integer recurrence applies for
  // both parities of |l|+|l0|.
  long double acc = 0.0L;
  for (size_t k = 0; k < coeff.size(); ++k) {
    acc += coeff[k] *
           (0.5L * specfun::gamma_half_l(2 * static_cast<int>(k) + al + al0 + 3));
  }
  const long double norm = norm_ratio(state.n, al, initial.n, al0);
  return static_cast<double>(molecule.a / M_PI * norm * acc);
}

double reduced_matrix_element_ground(InternalState state,
                                     const HarmonicMolecule& molecule) {
  check_state(state, "reduced_matrix_element_ground");
  if (molecule.a == 0.0) return 0.0;
  const int n = state.n;
  const int al = std::abs(state.l);
  long double g;
  if (al == 1) {
    // (l^2-1) Gamma(n + |l|/2 - 1/2) -> 4 for n = 0 and 0 for n >= 1.
    if (n != 0) return 0.0;
    g = 4.0L;
  } else {
    g = specfun::gamma_half_l(2 * n + al - 1) *
        (static_cast<long double>(state.l) * state.l - 1.0L);
  }
  const long double ratio =
      std::exp(0.5L * (std::lgammal(n + 1.0L) - std::lgammal(n + al + 1.0L)));
  const long double nfact = std::exp(std::lgammal(n + 1.0L));
  return static_cast<double>(molecule.a / (2.0L * M_PI) * g * ratio /
                             (4.0L * nfact));
}

double angular_coeff_f(int l, int l0) {
  const int dl = l - l0;
  if (dl % 2 != 0) return 0.0;
  const double zeta = ((dl / 2) % 2 == 0) ? 1.0 : -1.0;
  return zeta * 2.0 / (1.0 - static_cast<double>(dl) * dl);
}

double angular_coeff_g(int l, int l0) { return -angular_coeff_f(l, l0); }

double mode_weight(InternalState state, InternalState initial,
                   const HarmonicMolecule& molecule) {
  const double f = angular_coeff_f(state.l, initial.l);
  if (f == 0.0) return 0.0;
  return reduced_matrix_element(state, initial, molecule) * f;
}

namespace {

std::vector<ModeWeight> candidate_modes(const Scenario& sc, int n_max,
                                        int delta_l_max) {
  const HarmonicMolecule mol = sc.molecule();
  const int dl_even = delta_l_max - (delta_l_max % 2);
  std::vector<ModeWeight> all;
  all.reserve((n_max + 1) * (dl_even + 1));
  for (int n = 0; n <= n_max; ++n) {
    for (int dl = -dl_even; dl <= dl_even; dl += 2) {
      ModeWeight w;
      w.state = {n, sc.initial.l + dl};
      w.radial_element = reduced_matrix_element(w.state, sc.initial, mol);
      w.angular_coeff = angular_coeff_f(w.state.l, sc.initial.l);
      w.combined = w.radial_element * w.angular_coeff;
      w.wavenumber = kernels::mode_wavenumber(sc, w.state);
      all.push_back(w);
    }
  }
  return all;
}

double max_combined(const std::vector<ModeWeight>& modes) {
  double m = 0.0;
  for (const auto& w : modes) m = std::max(m, std::abs(w.combined));
  return m;
}

}  // namespace

std::vector<ModeWeight> enumerate_modes(const Scenario& scenario) {
  scenario.validate();
  if (scenario.a == 0.0) {
    ModeWeight w;
    w.state = scenario.initial;
    w.angular_coeff = angular_coeff_f(scenario.initial.l, scenario.initial.l);
    w.wavenumber = kernels::mode_wavenumber(scenario, scenario.initial);
    return {w};
  }
  auto all = candidate_modes(scenario, scenario.cutoffs.n_max,
                             scenario.cutoffs.delta_l_max);
  const double floor = scenario.cutoffs.weight_floor * max_combined(all);
  std::vector<ModeWeight> kept;
  for (const auto& w : all)
    if (std::abs(w.combined) >= floor) kept.push_back(w);
  if (kept.empty())
    throw physics_error("weight floor excludes every internal mode");
  std::sort(kept.begin(), kept.end(), [](const ModeWeight& a, const ModeWeight& b) {
    const double wa = std::abs(a.combined);
    const double wb = std::abs(b.combined);
    if (wa != wb) return wa > wb;
    if (a.state.energy_index() != b.state.energy_index())
      return a.state.energy_index() < b.state.energy_index();
    if (a.state.n != b.state.n) return a.state.n < b.state.n;
    return a.state.l < b.state.l;
  });
  return kept;
}

double truncation_tail_estimate(const Scenario& scenario) {
  scenario.validate();
  if (scenario.a == 0.0) return 0.0;
  const auto wide = candidate_modes(scenario, scenario.cutoffs.n_max + 2,
                                    scenario.cutoffs.delta_l_max + 4);
  const auto kept = enumerate_modes(scenario);
  double total = 0.0;
  for (const auto& w : wide) total += w.combined * w.combined;
  double inside = 0.0;
  for (const auto& w : kept) inside += w.combined * w.combined;
  if (total <= 0.0) return 0.0;
  return std::max(0.0, total - inside) / total;
}

}  // namespace moldiff::molecule
