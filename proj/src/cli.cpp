#include "moldiff/cli.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "moldiff/kernels.hpp"
#include "moldiff/molecule.hpp"
#include "moldiff/oracle.hpp"
#include "moldiff/pattern.hpp"
#include "moldiff/types.hpp"

namespace moldiff::cli {

namespace {

const char kUsage[] =
    "usage: moldiff <command> [--key value | --key=value]...\n"
    "\n"
    "commands:\n"
    "  single     density grid behind one slit\n"
    "  grating    density grid behind a periodic grating\n"
    "  carpet     grating grid over the first Talbot window [L_T/2, L_T]\n"
    "  focus      locate the axial density maximum along Z at fixed X\n"
    "  revivals   point vs molecule scan along Z at X = d/2\n"
    "  validate   applicability report for a scenario and region\n"
    "  selfcheck  run the built-in quadrature oracle suite\n"
    "\n"
    "common flags:\n"
    "  --preset NAME    near-field | optic-grate | nano | crystal\n"
    "  --config FILE    load key=value lines (a previous run's summary works)\n"
    "  --help           show this text\n"
    "\n"
    "keys: lambda_over_L a_over_L m1 m2 n0 l0 n_max delta_l_max weight_floor\n"
    "      kernel d N x_min x_max nx z_min z_max nz x samples threads\n"
    "      normalization heatmap_scale csv_path heatmap_path summary_path\n"
    "\n"
    "All lengths are in units of the slit width L. See README.md for the\n"
    "per-command defaults and the summary/config round-trip rules.\n";

std::string format_double(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) {
    return {};
  }
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

// Resolved configuration: every key is stored as the exact string that will
// be echoed into the summary, so a summary reloaded via --config reproduces
// the run bit for bit.
struct Options {
  std::string command;
  std::string preset;
  std::map<std::string, std::string> values;
  std::set<std::string> assigned;

  bool has(const std::string& key) const { return values.count(key) != 0; }

  void set(const std::string& key, const std::string& value, bool explicit_set) {
    values[key] = value;
    if (explicit_set) {
      assigned.insert(key);
    }
  }

  void set_default(const std::string& key, const std::string& value) {
    if (!assigned.count(key)) {
      values[key] = value;
    }
  }

  const std::string& get_string(const std::string& key) const {
    auto it = values.find(key);
    if (it == values.end()) {
      throw config_error("internal: key '" + key + "' was never materialized");
    }
    return it->second;
  }

  double get_double(const std::string& key) const {
    const std::string& text = get_string(key);
    char* end = nullptr;
    const double v = std::strtod(text.c_str(), &end);
    if (end == text.c_str() || *end != '\0') {
      throw config_error("invalid numeric value for " + key + ": '" + text + "'");
    }
    return v;
  }

  int get_int(const std::string& key) const {
    const std::string& text = get_string(key);
    char* end = nullptr;
    const long v = std::strtol(text.c_str(), &end, 10);
    if (end == text.c_str() || *end != '\0') {
      throw config_error("invalid integer value for " + key + ": '" + text + "'");
    }
    return static_cast<int>(v);
  }
};

const std::vector<std::string> kScenarioKeys = {
    "lambda_over_L", "a_over_L",    "m1",     "m2",          "n0",
    "l0",            "n_max",       "delta_l_max", "weight_floor", "kernel"};
const std::vector<std::string> kGratingKeys = {"d", "N"};
const std::vector<std::string> kGridKeys = {"x_min", "x_max", "nx",
                                            "z_min", "z_max", "nz"};
const std::vector<std::string> kScanKeys = {"x", "z_min", "z_max", "samples"};
const std::vector<std::string> kGridOutputKeys = {
    "threads",      "normalization", "heatmap_scale",
    "csv_path",     "heatmap_path",  "summary_path"};
const std::vector<std::string> kScanOutputKeys = {"threads", "normalization",
                                                  "csv_path", "summary_path"};

std::vector<std::string> allowed_keys(const std::string& command) {
  std::vector<std::string> keys;
  auto add = [&keys](const std::vector<std::string>& group) {
    for (const auto& k : group) {
      if (std::find(keys.begin(), keys.end(), k) == keys.end()) {
        keys.push_back(k);
      }
    }
  };
  if (command == "single") {
    add(kScenarioKeys);
    add(kGridKeys);
    add(kGridOutputKeys);
  } else if (command == "grating" || command == "carpet") {
    add(kScenarioKeys);
    add(kGratingKeys);
    add(kGridKeys);
    add(kGridOutputKeys);
  } else if (command == "focus") {
    add(kScenarioKeys);
    add(kGratingKeys);
    add(kScanKeys);
    add(kScanOutputKeys);
  } else if (command == "revivals") {
    add(kScenarioKeys);
    add(kGratingKeys);
    add(kScanKeys);
    add(kScanOutputKeys);
  } else if (command == "validate") {
    add(kScenarioKeys);
    add(kGratingKeys);
    add({"x_min", "x_max", "z_min", "z_max"});
    add({"summary_path"});
  } else if (command == "selfcheck") {
    // no keys
  } else {
    throw config_error("unknown command '" + command + "'");
  }
  return keys;
}

void check_key(const Options& options, const std::string& key) {
  const auto keys = allowed_keys(options.command);
  if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
    throw config_error("unknown key '" + key + "' for command '" +
                       options.command + "'");
  }
}

void apply_preset(Options& options, const std::string& name) {
  double lambda = 0.0;
  double a = 0.0;
  if (name == "near-field") {
    lambda = 9.64e-5;
    a = 1e-3;
  } else if (name == "optic-grate") {
    lambda = 3.89e-4;
    a = 4e-3;
  } else if (name == "nano") {
    lambda = 9.64e-4;
    a = 0.14;
  } else if (name == "crystal") {
    lambda = 0.363;
    a = 0.335;
  } else {
    throw config_error("unknown preset '" + name +
                       "' (near-field, optic-grate, nano, crystal)");
  }
  options.preset = name;
  options.set("lambda_over_L", format_double(lambda), true);
  options.set("a_over_L", format_double(a), true);
  options.set("m1", "20", true);
  options.set("m2", "26", true);
}

void load_config_file(Options& options, const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw config_error("cannot read config file '" + path + "'");
  }
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string text = trim(line);
    if (text.empty() || text[0] == '#') {
      continue;
    }
    const std::size_t eq = text.find('=');
    if (eq == std::string::npos) {
      throw config_error(path + ":" + std::to_string(line_no) +
                         ": expected key=value");
    }
    const std::string key = trim(text.substr(0, eq));
    const std::string value = trim(text.substr(eq + 1));
    if (key == "command") {
      if (options.command.empty()) {
        options.command = value;
        allowed_keys(options.command);
      }
      continue;
    }
    if (key == "config" || key == "preset") {
      throw config_error(path + ": key '" + key +
                         "' is only accepted as a command-line flag");
    }
    check_key(options, key);
    options.set(key, value, true);
  }
}

// Baseline defaults shared by every command; command- and parameter-dependent
// defaults are filled in by materialize_defaults once all sources applied.
void apply_base_defaults(Options& options) {
  options.set_default("lambda_over_L", "0.363");
  options.set_default("a_over_L", "0");
  options.set_default("m1", "20");
  options.set_default("m2", "26");
  options.set_default("n0", "0");
  options.set_default("l0", "0");
  options.set_default("n_max", "8");
  options.set_default("delta_l_max", "8");
  options.set_default("weight_floor", "0.0001");
  options.set_default("kernel", "exact");
  const auto keys = allowed_keys(options.command);
  auto allowed = [&keys](const char* k) {
    return std::find(keys.begin(), keys.end(), k) != keys.end();
  };
  if (allowed("threads")) {
    options.set_default("threads", "0");
  }
  if (allowed("normalization")) {
    options.set_default("normalization", "raw");
  }
  if (allowed("heatmap_scale")) {
    options.set_default("heatmap_scale", "log");
  }
  if (allowed("summary_path")) {
    options.set_default("summary_path", "");
  }
}

bool grating_enabled(const Options& options) {
  if (options.command == "grating" || options.command == "carpet" ||
      options.command == "revivals") {
    return true;
  }
  if (options.command == "focus" || options.command == "validate") {
    return options.assigned.count("d") != 0 || options.assigned.count("N") != 0;
  }
  return false;
}

void materialize_defaults(Options& options) {
  if (options.command == "selfcheck") {
    return;
  }
  apply_base_defaults(options);
  const bool with_grating = grating_enabled(options);
  if (with_grating) {
    options.set_default("d", "8");
    options.set_default("N", "20");
  }
  const double lambda = options.get_double("lambda_over_L");
  const double d = with_grating ? options.get_double("d") : 0.0;
  const double talbot =
      (with_grating && lambda > 0.0 && d > 0.0) ? 2.0 * d * d / lambda : 0.0;

  if (options.command == "single") {
    options.set_default("x_min", "-3");
    options.set_default("x_max", "3");
    options.set_default("nx", "400");
    options.set_default("z_min", "0.001");
    options.set_default("z_max", "20");
    options.set_default("nz", "400");
    options.set_default("csv_path", "single.csv");
    options.set_default("heatmap_path", "");
  } else if (options.command == "grating" || options.command == "carpet") {
    options.set_default("x_min", format_double(-2.0 * d));
    options.set_default("x_max", format_double(2.0 * d));
    options.set_default("nx", "400");
    if (options.command == "carpet") {
      options.set_default("z_min", format_double(0.5 * talbot));
      options.set_default("z_max", format_double(talbot));
      options.set_default("csv_path", "carpet.csv");
      options.set_default("heatmap_path", "carpet.pgm");
    } else {
      options.set_default("z_min", "0.001");
      options.set_default("z_max", format_double(talbot));
      options.set_default("csv_path", "grating.csv");
      options.set_default("heatmap_path", "");
    }
    options.set_default("nz", "400");
  } else if (options.command == "focus") {
    options.set_default("x", "0");
    if (lambda > 0.0) {
      options.set_default("z_min", format_double(0.1 / lambda));
      options.set_default("z_max", format_double(3.0 / lambda));
    }
    options.set_default("samples", "400");
    options.set_default("csv_path", "focus.csv");
  } else if (options.command == "revivals") {
    options.set_default("x", format_double(0.5 * d));
    options.set_default("z_min", format_double(0.35 * talbot));
    options.set_default("z_max", format_double(0.65 * talbot));
    options.set_default("samples", "1001");
    options.set_default("csv_path", "revivals.csv");
  } else if (options.command == "validate") {
    options.set_default("x_min", "-3");
    options.set_default("x_max", "3");
    options.set_default("z_min", "0.001");
    options.set_default("z_max", "20");
  }
}

Scenario make_scenario(const Options& options) {
  Scenario scenario;
  scenario.lambda = options.get_double("lambda_over_L");
  scenario.a = options.get_double("a_over_L");
  scenario.m1 = options.get_double("m1");
  scenario.m2 = options.get_double("m2");
  scenario.initial = InternalState{options.get_int("n0"), options.get_int("l0")};
  scenario.cutoffs.n_max = options.get_int("n_max");
  scenario.cutoffs.delta_l_max = options.get_int("delta_l_max");
  scenario.cutoffs.weight_floor = options.get_double("weight_floor");
  const std::string& kernel = options.get_string("kernel");
  if (kernel == "exact") {
    scenario.kernel = KernelKind::exact;
  } else if (kernel == "paraxial") {
    scenario.kernel = KernelKind::paraxial;
  } else {
    throw config_error("kernel must be 'exact' or 'paraxial', got '" + kernel +
                       "'");
  }
  if (grating_enabled(options)) {
    scenario.grating = GratingSpec{options.get_double("d"), options.get_int("N")};
  }
  scenario.validate();
  return scenario;
}

int resolve_threads(const Options& options) {
  int threads = options.get_int("threads");
  if (threads < 0) {
    throw config_error("threads must be >= 0");
  }
  if (threads == 0) {
    if (const char* env = std::getenv("MOLDIFF_THREADS")) {
      char* end = nullptr;
      const long v = std::strtol(env, &end, 10);
      if (end != env && *end == '\0' && v > 0) {
        return static_cast<int>(v);
      }
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
  }
  return threads;
}

std::ofstream open_output(const std::string& path, bool binary) {
  std::ofstream out(path, binary ? std::ios::binary : std::ios::out);
  if (!out) {
    throw config_error("cannot write to '" + path + "'");
  }
  return out;
}

void finish_output(std::ofstream& out, const std::string& path) {
  out.flush();
  if (!out) {
    throw config_error("write to '" + path + "' failed");
  }
}

void write_grid_csv(const std::string& path, const DensityField& field,
                    double scale) {
  auto out = open_output(path, false);
  out << "X_over_L,Z_over_L,density\n";
  char buf[160];
  for (std::size_t iz = 0; iz < field.zs.size(); ++iz) {
    for (std::size_t ix = 0; ix < field.xs.size(); ++ix) {
      std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g\n", field.xs[ix],
                    field.zs[iz], field.at(iz, ix) * scale);
      out << buf;
    }
  }
  finish_output(out, path);
}

void write_pgm(const std::string& path, const DensityField& field,
               bool log_scale) {
  const std::size_t nx = field.xs.size();
  const std::size_t nz = field.zs.size();
  double vmax = 0.0;
  for (double v : field.values) {
    vmax = std::max(vmax, v);
  }
  auto out = open_output(path, true);
  out << "P5\n" << nx << " " << nz << "\n65535\n";
  std::vector<unsigned char> row(2 * nx);
  for (std::size_t iz = nz; iz-- > 0;) {  // top row = largest Z
    for (std::size_t ix = 0; ix < nx; ++ix) {
      const double v = field.at(iz, ix);
      double t = 0.0;
      if (vmax > 0.0 && v > 0.0) {
        t = log_scale ? (std::log10(v / vmax) + 4.0) / 4.0 : v / vmax;
      }
      t = std::clamp(t, 0.0, 1.0);
      const unsigned pixel = static_cast<unsigned>(t * 65535.0 + 0.5);
      row[2 * ix] = static_cast<unsigned char>(pixel >> 8);
      row[2 * ix + 1] = static_cast<unsigned char>(pixel & 0xFF);
    }
    out.write(reinterpret_cast<const char*>(row.data()),
              static_cast<std::streamsize>(row.size()));
  }
  finish_output(out, path);
}

void append_config_block(std::ostringstream& text, const Options& options) {
  text << "command=" << options.command << "\n";
  for (const auto& key : allowed_keys(options.command)) {
    if (options.has(key)) {
      text << key << "=" << options.get_string(key) << "\n";
    }
  }
  if (!options.preset.empty()) {
    text << "# preset=" << options.preset << "\n";
  }
}

void append_warnings(std::ostringstream& text,
                     const std::vector<ValidityWarning>& warnings) {
  if (warnings.empty()) {
    text << "# warnings=none\n";
    return;
  }
  for (const auto& w : warnings) {
    text << "# warning["
         << (w.severity == ValidityWarning::Severity::strong ? "strong"
                                                             : "note")
         << "]: " << w.message << "\n";
  }
}

void append_mode_table(std::ostringstream& text,
                       const std::vector<ModeWeight>& modes,
                       double truncation_tail) {
  std::size_t propagating = 0;
  for (const auto& m : modes) {
    propagating += m.wavenumber.propagating() ? 1 : 0;
  }
  text << "# modes_kept=" << modes.size()
       << " propagating=" << propagating << "\n";
  char buf[192];
  const std::size_t shown = std::min<std::size_t>(modes.size(), 40);
  for (std::size_t i = 0; i < shown; ++i) {
    const auto& m = modes[i];
    if (m.wavenumber.propagating()) {
      std::snprintf(buf, sizeof(buf),
                    "# mode n=%d l=%d weight=%.6g k_over_invL=%.6g "
                    "class=propagating\n",
                    m.state.n, m.state.l, m.combined, m.wavenumber.k);
    } else {
      std::snprintf(buf, sizeof(buf),
                    "# mode n=%d l=%d weight=%.6g kappa_over_invL=%.6g "
                    "class=evanescent\n",
                    m.state.n, m.state.l, m.combined, m.wavenumber.kappa());
    }
    text << buf;
  }
  if (modes.size() > shown) {
    text << "# mode table truncated, " << modes.size() - shown
         << " more entries\n";
  }
  char tail[64];
  std::snprintf(tail, sizeof(tail), "# truncation_tail=%.6g\n", truncation_tail);
  text << tail;
}

void emit_summary(const Options& options, const std::string& body) {
  std::cout << body;
  const std::string path =
      options.has("summary_path") ? options.get_string("summary_path") : "";
  if (!path.empty()) {
    auto out = open_output(path, false);
    out << body;
    finish_output(out, path);
  }
}

int run_grid(const Options& options) {
  const Scenario scenario = make_scenario(options);
  GridSpec grid;
  grid.x_min = options.get_double("x_min");
  grid.x_max = options.get_double("x_max");
  grid.nx = options.get_int("nx");
  grid.z_min = options.get_double("z_min");
  grid.z_max = options.get_double("z_max");
  grid.nz = options.get_int("nz");
  grid.validate();

  const DensityField field =
      pattern::evaluate_grid(scenario, grid, resolve_threads(options));

  double peak = 0.0;
  std::size_t peak_index = 0;
  for (std::size_t i = 0; i < field.values.size(); ++i) {
    if (field.values[i] > peak) {
      peak = field.values[i];
      peak_index = i;
    }
  }
  const std::string& normalization = options.get_string("normalization");
  if (normalization != "raw" && normalization != "max1") {
    throw config_error("normalization must be 'raw' or 'max1'");
  }
  const double scale =
      (normalization == "max1" && peak > 0.0) ? 1.0 / peak : 1.0;

  const std::string csv_path = options.get_string("csv_path");
  if (!csv_path.empty()) {
    write_grid_csv(csv_path, field, scale);
  }
  const std::string heatmap_path =
      options.has("heatmap_path") ? options.get_string("heatmap_path") : "";
  if (!heatmap_path.empty()) {
    const std::string& hscale = options.get_string("heatmap_scale");
    if (hscale != "log" && hscale != "linear") {
      throw config_error("heatmap_scale must be 'log' or 'linear'");
    }
    write_pgm(heatmap_path, field, hscale == "log");
  }

  std::ostringstream text;
  append_config_block(text, options);
  if (scenario.grating) {
    text << "# talbot_length_L="
         << format_double(
                pattern::talbot_length(scenario.grating->d, scenario.lambda))
         << "\n";
  }
  const std::size_t iz = peak_index / field.xs.size();
  const std::size_t ix = peak_index % field.xs.size();
  text << "# peak_density_raw=" << format_double(peak)
       << " at X_over_L=" << format_double(field.xs[ix])
       << " Z_over_L=" << format_double(field.zs[iz]) << "\n";
  append_warnings(text, field.warnings);
  append_mode_table(text, field.modes, field.truncation_tail);
  emit_summary(options, text.str());
  std::cerr << "elapsed: " << field.elapsed_seconds << " s\n";
  return 0;
}

int run_focus(const Options& options) {
  const Scenario scenario = make_scenario(options);
  const double x = options.get_double("x");
  const double z_lo = options.get_double("z_min");
  const double z_hi = options.get_double("z_max");
  const int samples = options.get_int("samples");

  const auto focus = pattern::find_focus(scenario, x, z_lo, z_hi, samples);

  const pattern::ModeTable table(scenario);
  std::vector<double> zs(samples);
  std::vector<double> curve(samples);
  double curve_max = 0.0;
  for (int i = 0; i < samples; ++i) {
    zs[i] = z_lo + (z_hi - z_lo) * i / (samples - 1);
    curve[i] = pattern::density(scenario, table, x, zs[i]);
    curve_max = std::max(curve_max, curve[i]);
  }
  const std::string& normalization = options.get_string("normalization");
  if (normalization != "raw" && normalization != "max1") {
    throw config_error("normalization must be 'raw' or 'max1'");
  }
  const double scale =
      (normalization == "max1" && curve_max > 0.0) ? 1.0 / curve_max : 1.0;

  const std::string csv_path = options.get_string("csv_path");
  if (!csv_path.empty()) {
    auto out = open_output(csv_path, false);
    out << "Z_over_L,density\n";
    char buf[96];
    for (int i = 0; i < samples; ++i) {
      std::snprintf(buf, sizeof(buf), "%.17g,%.17g\n", zs[i], curve[i] * scale);
      out << buf;
    }
    finish_output(out, csv_path);
  }

  std::ostringstream text;
  append_config_block(text, options);
  if (scenario.grating) {
    text << "# talbot_length_L="
         << format_double(
                pattern::talbot_length(scenario.grating->d, scenario.lambda))
         << "\n";
  }
  text << "# z_star_L=" << format_double(focus.z_star) << "\n";
  text << "# z_star_density=" << format_double(focus.value) << "\n";
  text << "# on_boundary=" << (focus.on_boundary ? 1 : 0) << "\n";
  pattern::Region region{std::fabs(x), z_lo, z_hi};
  append_warnings(text, pattern::validity_check(scenario, region));
  const pattern::ModeTable& t = table;
  append_mode_table(text, t.modes(), t.truncation_tail());
  emit_summary(options, text.str());
  return 0;
}

int run_revivals(const Options& options) {
  const Scenario molecule = make_scenario(options);
  Scenario point = molecule;
  point.a = 0.0;

  const double x = options.get_double("x");
  const double z_lo = options.get_double("z_min");
  const double z_hi = options.get_double("z_max");
  const int samples = options.get_int("samples");
  if (samples < 2) {
    throw config_error("samples must be >= 2");
  }
  if (!(z_lo >= kZMin) || !(z_hi > z_lo)) {
    throw config_error("revivals: need 1e-3 <= z_min < z_max");
  }

  const pattern::ModeTable point_table(point);
  const pattern::ModeTable molecule_table(molecule);
  std::vector<double> zs(samples), rho_point(samples), rho_molecule(samples);
  double max_point = 0.0, max_molecule = 0.0;
  std::size_t peak_point = 0, peak_molecule = 0;
  for (int i = 0; i < samples; ++i) {
    zs[i] = z_lo + (z_hi - z_lo) * i / (samples - 1);
    rho_point[i] = pattern::density(point, point_table, x, zs[i]);
    rho_molecule[i] = pattern::density(molecule, molecule_table, x, zs[i]);
    if (rho_point[i] > max_point) {
      max_point = rho_point[i];
      peak_point = static_cast<std::size_t>(i);
    }
    if (rho_molecule[i] > max_molecule) {
      max_molecule = rho_molecule[i];
      peak_molecule = static_cast<std::size_t>(i);
    }
  }
  const std::string& normalization = options.get_string("normalization");
  if (normalization != "raw" && normalization != "max1") {
    throw config_error("normalization must be 'raw' or 'max1'");
  }
  const double scale_point =
      (normalization == "max1" && max_point > 0.0) ? 1.0 / max_point : 1.0;
  const double scale_molecule =
      (normalization == "max1" && max_molecule > 0.0) ? 1.0 / max_molecule
                                                      : 1.0;

  const std::string csv_path = options.get_string("csv_path");
  if (!csv_path.empty()) {
    auto out = open_output(csv_path, false);
    out << "Z_over_L,density_point,density_molecule\n";
    char buf[144];
    for (int i = 0; i < samples; ++i) {
      std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g\n", zs[i],
                    rho_point[i] * scale_point,
                    rho_molecule[i] * scale_molecule);
      out << buf;
    }
    finish_output(out, csv_path);
  }

  const double talbot =
      pattern::talbot_length(molecule.grating->d, molecule.lambda);
  std::ostringstream text;
  append_config_block(text, options);
  text << "# talbot_length_L=" << format_double(talbot) << "\n";
  text << "# half_talbot_L=" << format_double(0.5 * talbot) << "\n";
  text << "# peak_point_Z_over_L=" << format_double(zs[peak_point])
       << " density=" << format_double(max_point) << "\n";
  text << "# peak_molecule_Z_over_L=" << format_double(zs[peak_molecule])
       << " density=" << format_double(max_molecule) << "\n";
  pattern::Region region{std::fabs(x), z_lo, z_hi};
  append_warnings(text, pattern::validity_check(molecule, region));
  append_mode_table(text, molecule_table.modes(),
                    molecule_table.truncation_tail());
  emit_summary(options, text.str());
  return 0;
}

int run_validate(const Options& options) {
  const Scenario scenario = make_scenario(options);
  const double x_min = options.get_double("x_min");
  const double x_max = options.get_double("x_max");
  const double z_min = options.get_double("z_min");
  const double z_max = options.get_double("z_max");
  pattern::Region region{std::max(std::fabs(x_min), std::fabs(x_max)), z_min,
                         z_max};
  const auto warnings = pattern::validity_check(scenario, region);
  const pattern::ModeTable table(scenario);

  std::ostringstream text;
  append_config_block(text, options);
  char buf[96];
  std::snprintf(buf, sizeof(buf), "# ratio lambda_over_L=%.6g\n",
                scenario.lambda);
  text << buf;
  std::snprintf(buf, sizeof(buf), "# ratio lambda_over_Zmin=%.6g\n",
                scenario.lambda / z_min);
  text << buf;
  std::snprintf(buf, sizeof(buf), "# ratio a_over_L=%.6g\n", scenario.a);
  text << buf;
  append_warnings(text, warnings);
  append_mode_table(text, table.modes(), table.truncation_tail());
  emit_summary(options, text.str());
  return 0;
}

int dispatch(int argc, const char* const* argv) {
  std::vector<std::string> tokens;
  for (int i = 1; i < argc; ++i) {
    tokens.emplace_back(argv[i]);
  }
  if (tokens.empty()) {
    std::cerr << kUsage;
    return 2;
  }

  Options options;
  std::size_t first_flag = 0;
  if (!tokens[0].empty() && tokens[0].rfind("--", 0) != 0) {
    options.command = tokens[0];
    first_flag = 1;
  }

  // Flag pass: collect ordered key/value pairs, pulling out help, preset and
  // config so they can be applied in precedence order (defaults < preset <
  // config files < flags).
  std::vector<std::pair<std::string, std::string>> flags;
  std::string preset_name;
  std::vector<std::string> config_files;
  for (std::size_t i = first_flag; i < tokens.size(); ++i) {
    const std::string& token = tokens[i];
    if (token == "--help" || token == "-h" || token == "help") {
      std::cout << kUsage;
      return 0;
    }
    if (token.rfind("--", 0) != 0) {
      std::cerr << "error: unexpected argument '" << token << "'\n" << kUsage;
      return 2;
    }
    std::string key;
    std::string value;
    const std::string body = token.substr(2);
    const std::size_t eq = body.find('=');
    if (eq != std::string::npos) {
      key = body.substr(0, eq);
      value = body.substr(eq + 1);
    } else {
      key = body;
      if (i + 1 >= tokens.size()) {
        std::cerr << "error: flag --" << key << " expects a value\n";
        return 2;
      }
      value = tokens[++i];
    }
    if (key.empty()) {
      std::cerr << "error: malformed flag '" << token << "'\n";
      return 2;
    }
    if (key == "preset") {
      preset_name = value;
    } else if (key == "config") {
      config_files.push_back(value);
    } else {
      flags.emplace_back(key, value);
    }
  }

  if (options.command.empty() && config_files.empty()) {
    std::cerr << "error: missing command\n" << kUsage;
    return 2;
  }
  if (!options.command.empty()) {
    allowed_keys(options.command);  // validates the name
  }

  if (!preset_name.empty()) {
    apply_preset(options, preset_name);
  }
  for (const auto& file : config_files) {
    load_config_file(options, file);
  }
  if (options.command.empty()) {
    std::cerr << "error: no command given and no command= line in config\n";
    return 2;
  }
  if (options.command == "selfcheck") {
    if (!flags.empty() || !preset_name.empty()) {
      std::cerr << "error: selfcheck takes no flags\n";
      return 2;
    }
    return oracle::run_selfcheck(std::cout) ? 0 : 1;
  }
  for (const auto& [key, value] : flags) {
    check_key(options, key);
    options.set(key, value, true);
  }

  materialize_defaults(options);

  if (options.command == "single" || options.command == "grating" ||
      options.command == "carpet") {
    return run_grid(options);
  }
  if (options.command == "focus") {
    return run_focus(options);
  }
  if (options.command == "revivals") {
    return run_revivals(options);
  }
  if (options.command == "validate") {
    return run_validate(options);
  }
  throw config_error("unknown command '" + options.command + "'");
}

}  // namespace

int run(int argc, const char* const* argv) {
  try {
    return dispatch(argc, argv);
  } catch (const config_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const physics_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace moldiff::cli
