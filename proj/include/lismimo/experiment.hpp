#pragma once

#include <optional>
#include <string>
#include <vector>

#include "lismimo/network.hpp"
#include "lismimo/precoders.hpp"
#include "lismimo/scenario.hpp"

namespace lismimo {

/// Received power a perfect electrical aperture would collect from the
/// 4x4-wavelength LIS at 2 wavelengths: the surface subtends one sixth of the
/// full solid angle seen from the user.
double reference_aperture_power(double p_r);

/// One CSV row. Column order is fixed by csv_header().
struct ResultRow {
  std::string series;
  std::string param;
  double value = 0.0;
  long n = 0;
  long m = 0;
  double sum_capacity = 0.0;
  double sinr_min = 0.0;
  double sinr_max = 0.0;
  double p_t = 0.0;
  double p_l = 0.0;
  double p_rx_total = 0.0;
  double reference_aperture_power = 0.0;
  double spacing = 0.0;
  double efficiency = 0.0;
  bool ue_coupling = true;
  bool scattering = true;
  std::string precoder;
  bool converged = true;
  int iterations = 0;
  std::string status = "ok";
  double wall_time_s = 0.0;  // reported in the metadata sidecar, not in the CSV

  bool ok() const { return status == "ok"; }
};

/// Everything computed for one scenario.
struct RunOutcome {
  ScenarioConfig config;
  Geometry geometry;
  ImpedanceSystem system;
  ChannelModel channel;
  PrecoderSolution solution;
  std::optional<ReceiveState> receive;
  MetricsReport metrics;
  double r_p_min_eigenvalue = 0.0;
  double r_p_max_eigenvalue = 0.0;
  ResultRow row;
};

/// Builds the system, checks passivity, solves the configured precoder and
/// verifies budgets and (with scattering) energy conservation. Errors are
/// rethrown with the scenario hash attached.
RunOutcome run_detailed(const ScenarioConfig& config);
ResultRow run(const ScenarioConfig& config);

enum class SweepParam { Users, ElementsPerAxis, Efficiency, Spacing };

SweepParam parse_sweep_param(const std::string& name);
std::string to_string(SweepParam param);

/// Copy of `base` with the named parameter set to `value`. Throws ConfigError
/// when the value does not fit the scenario (e.g. a spacing that does not
/// divide the array length).
ScenarioConfig apply_sweep_value(const ScenarioConfig& base, SweepParam param, double value);

struct SweepSpec {
  std::string series;
  SweepParam param = SweepParam::Users;
  std::vector<double> values;
  ScenarioConfig base;
};

/// Runs every point of every spec, in parallel over `threads` workers. Rows
/// come back in spec order, then value order. A point that fails becomes an
/// error row; invalid sweep values throw ConfigError before anything runs.
std::vector<ResultRow> sweep(const std::vector<SweepSpec>& specs, int threads = 1);
std::vector<ResultRow> sweep(const SweepSpec& spec, int threads = 1);

/// Users 1..33 on the 4-wavelength line array, WMMSE, for spacings
/// {0.5, 0.1} x efficiencies {1, 0.8} x user coupling on/off.
std::vector<SweepSpec> fig2_recipe();

/// Square 4x4-wavelength arrays from 3x3 to 41x41 elements, one user at 2
/// wavelengths, MF, efficiencies {0.8, 0.99, 1} x scattering on/off.
std::vector<SweepSpec> fig3_recipe();

/// Elements per axis used by fig3_recipe().
std::vector<double> fig3_grid();

std::string csv_header();
std::string to_csv(const std::vector<ResultRow>& rows);

/// Writes header + rows (17 significant digits, LF endings). Throws Error
/// naming the path on I/O failure.
void emit_csv(const std::vector<ResultRow>& rows, const std::string& path);

/// Writes `<csv_path>.meta.json` with the config hash, build identifier and
/// wall times.
void emit_meta(const std::vector<ResultRow>& rows, const std::string& csv_path,
               const std::string& config_hash, double total_wall_time_s);

std::string build_identifier();

}  // namespace lismimo
