#include "moldiff/pattern.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <stdexcept>
#include <thread>

#include "moldiff/kernels.hpp"
#include "moldiff/molecule.hpp"
#include "moldiff/specfun.hpp"

namespace moldiff::pattern {

namespace {

constexpr double kPi = 3.14159265358979323846;

std::vector<double> slit_offsets(const Scenario& scenario) {
  if (!scenario.grating) {
    return {0.0};
  }
  const int half = scenario.grating->half_count;
  std::vector<double> offsets;
  offsets.reserve(2 * static_cast<std::size_t>(half) + 1);
  for (int j = -half; j <= half; ++j) {
    offsets.push_back(j * scenario.grating->d);
  }
  return offsets;
}

// Slit amplitudes at one field point for every wavenumber group. The free
// amplitude sums Moshinsky slit functions over the offsets; the constant
// terms of the Fresnel combination cancel edge against edge, so only the
// difference of rotated-contour integrals survives under one prefactor.
struct EdgeRadii {
  double u = 0.0;
  double r = 0.0;
};

double density_point(const Scenario& scenario, const ModeTable& table,
                     const std::vector<double>& offsets, double x, double z) {
  if (!(z >= kZMin)) {
    throw std::domain_error("density: Z below the trusted minimum 1e-3");
  }

  const double k0 = table.initial_mode().k;
  const double scale = std::sqrt(k0 / (kPi * z));
  ComplexValue edge_sum = 0.0;
  std::vector<EdgeRadii> edges;
  edges.reserve(2 * offsets.size());
  for (double off : offsets) {
    const double up = x + off + 0.5;
    const double um = x + off - 0.5;
    edge_sum += specfun::fresnel_complex(scale * up) -
                specfun::fresnel_complex(scale * um);
    edges.push_back({up, std::hypot(up, z)});
    edges.push_back({um, std::hypot(um, z)});
  }
  const ComplexValue free_pref =
      ComplexValue(0.5, -0.5) * std::polar(1.0, k0 * z);
  const ComplexValue m_sum = free_pref * edge_sum;

  const double w0 = table.initial_weight();
  bool any_kernel = w0 != 0.0;
  for (const auto& group : table.groups()) {
    any_kernel = any_kernel || group.weight_sq_sum != 0.0;
  }
  if (!any_kernel) {
    return std::norm(m_sum);
  }

  double density = 0.0;
  bool first_group = true;
  for (const auto& group : table.groups()) {
    const double k = group.wavenumber.k;
    ComplexValue kernel_sum = 0.0;
    if (scenario.kernel == KernelKind::exact) {
      for (const auto& edge : edges) {
        kernel_sum += specfun::hankel1_order1(k * edge.r) / edge.r;
      }
      kernel_sum *= ComplexValue(0.0, 0.5 * k * z);
    } else {
      for (const auto& edge : edges) {
        kernel_sum += std::polar(1.0, 0.5 * k * edge.u * edge.u / z);
      }
      kernel_sum *= std::sqrt(k / (2.0 * kPi * z)) *
                    std::polar(1.0, k * z - 0.25 * kPi);
    }
    if (first_group) {
      density += std::norm(m_sum - w0 * kernel_sum);
      first_group = false;
    }
    density += group.weight_sq_sum * std::norm(kernel_sum);
  }
  return density;
}

}  // namespace

ModeTable::ModeTable(const Scenario& scenario) {
  scenario.validate();
  modes_ = molecule::enumerate_modes(scenario);
  truncation_tail_ = molecule::truncation_tail_estimate(scenario);
  const HarmonicMolecule mol = scenario.molecule();
  initial_weight_ = molecule::mode_weight(scenario.initial, scenario.initial, mol);

  std::map<int, double> weight_sq_by_index;
  const int initial_index = scenario.initial.energy_index();
  weight_sq_by_index[initial_index] = 0.0;
  for (const auto& mode : modes_) {
    if (!mode.wavenumber.propagating() || mode.state == scenario.initial) {
      continue;
    }
    weight_sq_by_index[mode.state.energy_index()] +=
        mode.combined * mode.combined;
  }

  groups_.reserve(weight_sq_by_index.size());
  for (const auto& [index, weight_sq] : weight_sq_by_index) {
    Group group;
    group.wavenumber =
        kernels::mode_wavenumber(scenario, InternalState{0, index});
    group.weight_sq_sum = weight_sq;
    if (index == initial_index) {
      groups_.insert(groups_.begin(), group);
    } else {
      groups_.push_back(group);
    }
  }
}

double density(const Scenario& scenario, const ModeTable& table, double x,
               double z) {
  return density_point(scenario, table, slit_offsets(scenario), x, z);
}

double density(const Scenario& scenario, double x, double z) {
  const ModeTable table(scenario);
  return density_point(scenario, table, slit_offsets(scenario), x, z);
}

double density_single_slit(const Scenario& scenario, double x, double z) {
  Scenario single = scenario;
  single.grating.reset();
  return density(single, x, z);
}

double density_grating(const Scenario& scenario, double x, double z) {
  if (!scenario.grating) {
    throw config_error("density_grating: scenario has no grating spec");
  }
  return density(scenario, x, z);
}

double talbot_length(double d, double lambda) {
  if (!(d > 0.0) || !(lambda > 0.0)) {
    throw std::domain_error("talbot_length: d and lambda must be positive");
  }
  return 2.0 * d * d / lambda;
}

FocusResult find_focus(const Scenario& scenario, double x, double z_lo,
                       double z_hi, int samples) {
  scenario.validate();
  if (!(z_lo >= kZMin) || !(z_hi > z_lo)) {
    throw config_error("find_focus: need 1e-3 <= z_lo < z_hi");
  }
  if (samples < 8) {
    throw config_error("find_focus: need at least 8 samples");
  }

  const ModeTable table(scenario);
  const auto offsets = slit_offsets(scenario);
  std::vector<double> zs(samples);
  std::vector<double> values(samples);
  const double step = (z_hi - z_lo) / (samples - 1);
  for (int i = 0; i < samples; ++i) {
    zs[i] = z_lo + step * i;
    values[i] = density_point(scenario, table, offsets, x, zs[i]);
  }

  std::size_t best = 0;
  for (std::size_t i = 1; i < zs.size(); ++i) {
    if (values[i] > values[best]) {
      best = i;
    }
  }
  if (best == 0 || best + 1 == zs.size()) {
    return {zs[best], values[best], true};
  }

  const double below = values[best - 1];
  const double center = values[best];
  const double above = values[best + 1];
  const double curvature = below - 2.0 * center + above;
  if (!(curvature < 0.0)) {
    return {zs[best], center, false};
  }
  const double shift = 0.5 * step * (below - above) / curvature;
  const double peak = center - 0.125 * (below - above) * (below - above) / curvature;
  return {zs[best] + shift, peak, false};
}

std::vector<ValidityWarning> validity_check(const Scenario& scenario,
                                            const Region& region) {
  scenario.validate();
  if (!(region.z_min > 0.0) || !(region.z_max >= region.z_min)) {
    throw config_error("validity_check: need 0 < z_min <= z_max");
  }

  std::vector<ValidityWarning> warnings;
  char text[192];
  if (scenario.lambda > 1.0) {
    std::snprintf(text, sizeof(text),
                  "wavelength exceeds the slit width (lambda/L = %.3g): the "
                  "edge expansion of the aperture field is unreliable",
                  scenario.lambda);
    warnings.push_back({ValidityWarning::Severity::strong, text});
  }
  const double lambda_over_z = scenario.lambda / region.z_min;
  if (lambda_over_z > 0.5) {
    std::snprintf(text, sizeof(text),
                  "lambda/Z = %.3g at Z_min = %.3g: the scan enters the slit "
                  "plane region where the propagation formulas break down",
                  lambda_over_z, region.z_min);
    warnings.push_back({ValidityWarning::Severity::strong, text});
  } else if (lambda_over_z > 0.1) {
    std::snprintf(text, sizeof(text),
                  "lambda/Z = %.3g at Z_min = %.3g: results nearest the slit "
                  "plane are qualitative",
                  lambda_over_z, region.z_min);
    warnings.push_back({ValidityWarning::Severity::note, text});
  }
  if (scenario.a >= 0.5) {
    std::snprintf(text, sizeof(text),
                  "molecule size comparable to the slit (a/L = %.3g): the "
                  "first-order internal correction is unreliable",
                  scenario.a);
    warnings.push_back({ValidityWarning::Severity::strong, text});
  } else if (scenario.a >= 0.1) {
    std::snprintf(text, sizeof(text),
                  "a/L = %.3g: the first-order truncation in the molecule "
                  "size is qualitative here",
                  scenario.a);
    warnings.push_back({ValidityWarning::Severity::note, text});
  }
  return warnings;
}

DensityField evaluate_grid(const Scenario& scenario, const GridSpec& grid,
                           int threads) {
  scenario.validate();
  grid.validate();
  const auto start_time = std::chrono::steady_clock::now();

  const ModeTable table(scenario);
  const auto offsets = slit_offsets(scenario);

  DensityField field;
  field.xs.resize(grid.nx);
  field.zs.resize(grid.nz);
  const double dx = (grid.x_max - grid.x_min) / (grid.nx - 1);
  const double dz = (grid.z_max - grid.z_min) / (grid.nz - 1);
  for (int i = 0; i < grid.nx; ++i) {
    field.xs[i] = grid.x_min + dx * i;
  }
  for (int i = 0; i < grid.nz; ++i) {
    field.zs[i] = grid.z_min + dz * i;
  }
  field.values.resize(static_cast<std::size_t>(grid.nx) * grid.nz);

  int worker_count = threads;
  if (worker_count <= 0) {
    worker_count = static_cast<int>(std::thread::hardware_concurrency());
  }
  worker_count = std::clamp(worker_count, 1, grid.nz);

  auto run_rows = [&](int row_begin, int row_end) {
    for (int iz = row_begin; iz < row_end; ++iz) {
      const double z = field.zs[iz];
      double* row = field.values.data() + static_cast<std::size_t>(iz) * grid.nx;
      for (int ix = 0; ix < grid.nx; ++ix) {
        row[ix] = density_point(scenario, table, offsets, field.xs[ix], z);
      }
    }
  };

  if (worker_count == 1) {
    run_rows(0, grid.nz);
  } else {
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(worker_count);
    const int base = grid.nz / worker_count;
    const int extra = grid.nz % worker_count;
    int row = 0;
    for (int t = 0; t < worker_count; ++t) {
      const int count = base + (t < extra ? 1 : 0);
      pool.emplace_back(
          [&, t](int begin, int end) {
            try {
              run_rows(begin, end);
            } catch (...) {
              errors[t] = std::current_exception();
            }
          },
          row, row + count);
      row += count;
    }
    for (auto& worker : pool) {
      worker.join();
    }
    for (const auto& error : errors) {
      if (error) {
        std::rethrow_exception(error);
      }
    }
  }

  field.modes = table.modes();
  field.truncation_tail = table.truncation_tail();
  const double x_span = std::max(std::fabs(grid.x_min), std::fabs(grid.x_max));
  field.warnings = validity_check(scenario, {x_span, grid.z_min, grid.z_max});
  field.elapsed_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                    start_time)
          .count();
  return field;
}

}  // namespace moldiff::pattern
