#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <cstring>
#include <stdexcept>
#include <vector>

#include "moldiff/kernels.hpp"
#include "moldiff/molecule.hpp"
#include "moldiff/oracle.hpp"
#include "moldiff/pattern.hpp"
#include "moldiff/types.hpp"

using namespace moldiff;

namespace {

Scenario crystal_molecule() {
  Scenario s;
  s.lambda = 0.363;
  s.a = 0.335;
  return s;
}

Scenario optic_point() {
  Scenario s;
  s.lambda = 3.89e-4;
  s.a = 0.0;
  return s;
}

}  // namespace

TEST_CASE("density is nonnegative across a coarse grid") {
  Scenario scenario = crystal_molecule();
  scenario.grating = GratingSpec{8.0, 5};
  const pattern::ModeTable table(scenario);
  for (int ix = 0; ix <= 16; ++ix) {
    for (int iz = 0; iz <= 12; ++iz) {
      const double x = -12.0 + 1.5 * ix;
      const double z = 0.5 + 29.0 * iz;
      CHECK(pattern::density(scenario, table, x, z) >= 0.0);
    }
  }
}

TEST_CASE("a point particle reduces to the bare slit amplitude") {
  Scenario scenario = crystal_molecule();
  scenario.a = 0.0;
  const auto mode = kernels::mode_wavenumber(scenario, scenario.initial);
  for (double x : {0.0, 0.7, -2.3}) {
    for (double z : {0.6, 3.0, 18.0}) {
      const double rho = pattern::density(scenario, x, z);
      const double bare = std::norm(kernels::moshinsky_slit(mode, x, z));
      CHECK(std::fabs(rho - bare) <= 1e-13 * bare);
    }
  }
  scenario.a = 1e-12;
  for (double x : {0.0, 0.7}) {
    const double rho = pattern::density(scenario, x, 3.0);
    const double bare = std::norm(kernels::moshinsky_slit(mode, x, 3.0));
    CHECK(std::fabs(rho - bare) <= 1e-8 * bare);
  }
}

TEST_CASE("single-slit density is even in X") {
  const Scenario scenario = crystal_molecule();
  const pattern::ModeTable table(scenario);
  for (double x : {0.25, 1.0, 2.5, 4.0}) {
    for (double z : {0.8, 5.0, 40.0}) {
      const double plus = pattern::density(scenario, table, x, z);
      const double minus = pattern::density(scenario, table, -x, z);
      CHECK(std::fabs(plus - minus) <= 1e-12 * plus);
    }
  }
}

TEST_CASE("a grating with N = 0 is the single slit, bit for bit") {
  Scenario scenario = crystal_molecule();
  scenario.grating = GratingSpec{8.0, 0};
  for (double x : {0.0, 1.3, -3.7}) {
    for (double z : {0.7, 6.0}) {
      const double grating = pattern::density_grating(scenario, x, z);
      const double single = pattern::density_single_slit(scenario, x, z);
      CHECK(grating == single);
    }
  }
}

TEST_CASE("density_grating demands a grating spec") {
  const Scenario scenario = crystal_molecule();
  CHECK_THROWS_AS(pattern::density_grating(scenario, 0.0, 1.0), config_error);
}

TEST_CASE("density rejects Z below the trusted minimum") {
  const Scenario scenario = crystal_molecule();
  CHECK_THROWS_AS(pattern::density(scenario, 0.0, 1e-4), std::domain_error);
  CHECK(pattern::density(scenario, 0.0, kZMin) >= 0.0);
}

TEST_CASE("grouped assembly equals the expanded three-term form") {
  Scenario scenario = crystal_molecule();
  SUBCASE("single slit") {}
  SUBCASE("small grating") { scenario.grating = GratingSpec{8.0, 1}; }

  const pattern::ModeTable table(scenario);
  std::vector<double> offsets = {0.0};
  if (scenario.grating) {
    offsets = {-scenario.grating->d, 0.0, scenario.grating->d};
  }
  const auto initial = table.initial_mode();
  const double w0 = table.initial_weight();
  for (double x : {0.2, 1.4, -2.6}) {
    for (double z : {0.9, 4.0, 25.0}) {
      ComplexValue m_sum = 0.0;
      for (double off : offsets) {
        m_sum += kernels::moshinsky_slit(initial, x + off, z);
      }
      ComplexValue k0_sum = 0.0;
      for (double off : offsets) {
        k0_sum += kernels::kernel_slit(initial, x + off, z, scenario.kernel);
      }
      double expanded = std::norm(m_sum) -
                        2.0 * w0 * std::real(std::conj(m_sum) * k0_sum);
      for (const auto& mode : table.modes()) {
        if (!mode.wavenumber.propagating()) continue;
        ComplexValue k_sum = 0.0;
        for (double off : offsets) {
          k_sum += kernels::kernel_slit(mode.wavenumber, x + off, z,
                                        scenario.kernel);
        }
        expanded += mode.combined * mode.combined * std::norm(k_sum);
      }
      const double grouped = pattern::density(scenario, table, x, z);
      CHECK(std::fabs(grouped - expanded) <= 1e-12 * grouped);
    }
  }
}

TEST_CASE("mode table: initial group first, then ascending energy index") {
  const Scenario scenario = crystal_molecule();
  const pattern::ModeTable table(scenario);
  REQUIRE(!table.groups().empty());
  const auto& groups = table.groups();
  CHECK(groups[0].wavenumber.k == scenario.k0());
  CHECK(table.initial_weight() ==
        molecule::mode_weight(scenario.initial, scenario.initial,
                              scenario.molecule()));
  for (std::size_t i = 1; i < groups.size(); ++i) {
    CHECK(groups[i].wavenumber.k < groups[i - 1].wavenumber.k);
    CHECK(groups[i].weight_sq_sum > 0.0);
    CHECK(groups[i].wavenumber.propagating());
  }
  // every propagating non-initial mode's weight is accounted for exactly once
  double total = 0.0;
  for (const auto& mode : table.modes()) {
    if (!mode.wavenumber.propagating() || mode.state == scenario.initial)
      continue;
    total += mode.combined * mode.combined;
  }
  double grouped = 0.0;
  for (const auto& g : groups) grouped += g.weight_sq_sum;
  CHECK(std::fabs(grouped - total) <= 1e-15 * total);
}

TEST_CASE("talbot_length follows 2 d^2 / lambda") {
  CHECK(pattern::talbot_length(8.0, 0.363) ==
        doctest::Approx(352.6170798898072).epsilon(1e-14));
  CHECK(pattern::talbot_length(2.0, 3.89e-4) ==
        doctest::Approx(20565.55269922879).epsilon(1e-14));
  CHECK_THROWS_AS(pattern::talbot_length(0.0, 0.5), std::domain_error);
  CHECK_THROWS_AS(pattern::talbot_length(4.0, 0.0), std::domain_error);
  CHECK_THROWS_AS(pattern::talbot_length(-4.0, 0.5), std::domain_error);
}

TEST_CASE("periodicity at a fractional Talbot plane, L1 over one period") {
  Scenario scenario = crystal_molecule();
  scenario.grating = GratingSpec{8.0, 20};
  const pattern::ModeTable table(scenario);
  const double lt = pattern::talbot_length(8.0, scenario.lambda);
  for (double frac : {0.5, 0.6}) {
    const double z = frac * lt;
    double discrepancy = 0.0;
    double reference = 0.0;
    for (int i = 0; i < 64; ++i) {
      const double x = -4.0 + 8.0 * i / 64.0;
      const double center = pattern::density(scenario, table, x, z);
      const double shifted = pattern::density(scenario, table, x + 8.0, z);
      discrepancy += std::fabs(center - shifted);
      reference += center;
    }
    CHECK(discrepancy / reference < 0.08);
  }
}

TEST_CASE("find_focus pins the single-slit axial maximum") {
  const Scenario scenario = optic_point();
  const auto focus = pattern::find_focus(scenario, 0.0, 850.0, 910.0, 400);
  CHECK(!focus.on_boundary);
  CHECK(std::fabs(focus.z_star - 878.8124) < 0.05);
  CHECK(std::fabs(focus.value - 1.8014164) < 1e-5);
  // the same maximum from a wide bracket, coarser but consistent
  const auto wide = pattern::find_focus(scenario, 0.0, 400.0, 2000.0, 400);
  CHECK(!wide.on_boundary);
  CHECK(std::fabs(wide.z_star - focus.z_star) < 0.5);
}

TEST_CASE("find_focus reports an unrefined boundary maximum") {
  const Scenario scenario = optic_point();
  const auto focus = pattern::find_focus(scenario, 0.0, 1000.0, 3000.0, 64);
  CHECK(focus.on_boundary);
  CHECK(focus.z_star == 1000.0);
  CHECK(focus.value == pattern::density(scenario, 0.0, 1000.0));
}

TEST_CASE("find_focus validates its scan parameters") {
  const Scenario scenario = optic_point();
  CHECK_THROWS_AS(pattern::find_focus(scenario, 0.0, 1e-4, 10.0, 100),
                  config_error);
  CHECK_THROWS_AS(pattern::find_focus(scenario, 0.0, 5.0, 5.0, 100),
                  config_error);
  CHECK_THROWS_AS(pattern::find_focus(scenario, 0.0, 1.0, 10.0, 7),
                  config_error);
}

TEST_CASE("find_focus lands on the grating revival near half Talbot") {
  Scenario scenario = crystal_molecule();
  scenario.a = 0.0;
  scenario.grating = GratingSpec{8.0, 20};
  const double lt = pattern::talbot_length(8.0, scenario.lambda);
  const auto revival =
      pattern::find_focus(scenario, 4.0, 160.0, 190.0, 601);
  CHECK(!revival.on_boundary);
  CHECK(std::fabs(revival.z_star / lt - 0.5) < 0.01);
  CHECK(revival.value > 1.85);
  CHECK(revival.value < 1.95);
}

TEST_CASE("validity screening flags the regimes it should") {
  pattern::Region far{16.0, 5.0, 400.0};
  const auto crystal_warnings = pattern::validity_check(crystal_molecule(), far);
  REQUIRE(crystal_warnings.size() == 1);
  CHECK(crystal_warnings[0].severity == ValidityWarning::Severity::note);
  CHECK(crystal_warnings[0].message.find("a/L") != std::string::npos);

  CHECK(pattern::validity_check(optic_point(), {3.0, 1.0, 20.0}).empty());

  Scenario slow = crystal_molecule();
  slow.lambda = 2.0;
  const auto strong = pattern::validity_check(slow, far);
  REQUIRE(!strong.empty());
  CHECK(strong[0].severity == ValidityWarning::Severity::strong);

  // slit-plane proximity escalates from note to strong
  const auto near_note =
      pattern::validity_check(crystal_molecule(), {3.0, 2.0, 20.0});
  CHECK(near_note.size() == 2);
  const auto near_strong =
      pattern::validity_check(crystal_molecule(), {3.0, 0.5, 20.0});
  REQUIRE(near_strong.size() == 2);
  CHECK(near_strong[0].severity == ValidityWarning::Severity::strong);

  CHECK_THROWS_AS(
      pattern::validity_check(crystal_molecule(), {3.0, 0.0, 20.0}),
      config_error);
  CHECK_THROWS_AS(
      pattern::validity_check(crystal_molecule(), {3.0, 5.0, 2.0}),
      config_error);
}

TEST_CASE("closed density tracks the brute-force oracle as a^2") {
  Scenario scenario;
  scenario.lambda = 0.05;
  scenario.kernel = KernelKind::paraxial;
  scenario.cutoffs.n_max = 4;
  scenario.cutoffs.delta_l_max = 4;
  scenario.cutoffs.weight_floor = 1e-3;

  double residual[2];
  int i = 0;
  for (double a : {0.02, 0.04}) {
    scenario.a = a;
    const double closed = pattern::density(scenario, 0.3, 2.0);
    const auto reference = oracle::density_quadrature(scenario, 0.3, 2.0);
    residual[i] = std::fabs(closed - reference.value);
    CHECK(residual[i] < 0.02 * reference.value);
    ++i;
  }
  const double ratio = residual[1] / residual[0];
  CHECK(ratio > 2.8);
  CHECK(ratio < 5.7);
}

TEST_CASE("evaluate_grid is byte-identical for every thread count") {
  Scenario scenario = crystal_molecule();
  scenario.grating = GratingSpec{8.0, 5};
  GridSpec grid;
  grid.x_min = -10.0;
  grid.x_max = 10.0;
  grid.nx = 41;
  grid.z_min = 0.5;
  grid.z_max = 120.0;
  grid.nz = 23;

  const auto one = pattern::evaluate_grid(scenario, grid, 1);
  REQUIRE(one.values.size() == 41u * 23u);
  CHECK(one.xs.front() == grid.x_min);
  CHECK(one.xs.back() == grid.x_max);
  CHECK(one.zs.front() == grid.z_min);
  CHECK(one.zs.back() == grid.z_max);

  for (int threads : {2, 5, 64}) {
    const auto many = pattern::evaluate_grid(scenario, grid, threads);
    REQUIRE(many.values.size() == one.values.size());
    CHECK(std::memcmp(many.values.data(), one.values.data(),
                      one.values.size() * sizeof(double)) == 0);
  }

  // spot-check the layout against direct evaluation
  const pattern::ModeTable table(scenario);
  CHECK(one.at(0, 0) == pattern::density(scenario, table, grid.x_min,
                                         grid.z_min));
  CHECK(one.at(22, 40) == pattern::density(scenario, table, grid.x_max,
                                           grid.z_max));
  CHECK(one.truncation_tail == table.truncation_tail());
  CHECK(one.modes.size() == table.modes().size());
  CHECK(one.elapsed_seconds >= 0.0);
}

TEST_CASE("evaluate_grid surfaces the validity warnings for its region") {
  Scenario scenario = crystal_molecule();
  GridSpec grid;
  grid.x_min = -2.0;
  grid.x_max = 2.0;
  grid.nx = 5;
  grid.z_min = 1.0;
  grid.z_max = 10.0;
  grid.nz = 4;
  const auto field = pattern::evaluate_grid(scenario, grid, 1);
  REQUIRE(field.warnings.size() == 2);  // lambda/Z note + a/L note
  for (const auto& warning : field.warnings) {
    CHECK(warning.severity == ValidityWarning::Severity::note);
  }
}
