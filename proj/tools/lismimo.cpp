// Command-line front end: run one scenario, sweep a parameter, or reproduce
// the two figure recipes. Exit codes: 0 ok, 1 config/I-O error, 2 numerical
// or invariant failure (including any failed sweep row).
#include <chrono>
#include <cstdint>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "lismimo/errors.hpp"
#include "lismimo/experiment.hpp"
#include "lismimo/scenario.hpp"

namespace {

using Clock = std::chrono::steady_clock;

std::vector<double> parse_values(const std::string& list) {
  std::vector<double> values;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    while (used < item.size() && std::isspace(static_cast<unsigned char>(item[used]))) ++used;
    if (used == 0 || used != item.size()) {
      throw lismimo::ConfigError("bad value '" + item + "' in --values");
    }
    values.push_back(v);
  }
  if (values.empty()) throw lismimo::ConfigError("--values is empty");
  return values;
}

std::string combined_hash(const std::vector<lismimo::SweepSpec>& specs) {
  std::uint64_t h = 1469598103934665603ULL;
  for (const auto& s : specs) {
    h ^= lismimo::config_hash(s.base);
    h *= 1099511628211ULL;
  }
  return lismimo::hex_hash(h);
}

int finish(const std::vector<lismimo::ResultRow>& rows, const std::string& out,
           const std::string& hash, Clock::time_point start) {
  lismimo::emit_csv(rows, out);
  const double wall = std::chrono::duration<double>(Clock::now() - start).count();
  lismimo::emit_meta(rows, out, hash, wall);
  int failed = 0;
  for (const auto& r : rows) {
    if (!r.ok()) {
      ++failed;
      std::cerr << "row " << r.series << " " << r.param << "=" << r.value << ": " << r.status
                << "\n";
    }
  }
  if (failed > 0) {
    std::cerr << failed << " of " << rows.size() << " rows failed\n";
    return 2;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Near-field multi-user MIMO simulator for dense dipole arrays"};
  app.require_subcommand(1);
  int threads = 1;
  app.add_option("--threads", threads, "Worker threads for sweeps")
      ->check(CLI::PositiveNumber);

  std::string config_path, out, param, values;

  auto* run_cmd = app.add_subcommand("run", "Run one scenario");
  run_cmd->add_option("--config", config_path, "Scenario JSON")->required();
  run_cmd->add_option("--out", out, "Output CSV")->required();

  auto* sweep_cmd = app.add_subcommand("sweep", "Sweep one parameter of a scenario");
  sweep_cmd->add_option("--config", config_path, "Scenario JSON")->required();
  sweep_cmd->add_option("--param", param, "users | elements_per_axis | efficiency | spacing")
      ->required();
  sweep_cmd->add_option("--values", values, "Comma-separated values")->required();
  sweep_cmd->add_option("--out", out, "Output CSV")->required();

  auto* fig2_cmd = app.add_subcommand("fig2", "Sum capacity against number of users");
  fig2_cmd->add_option("--out", out, "Output CSV")->required();

  auto* fig3_cmd = app.add_subcommand("fig3", "Received power against array size");
  fig3_cmd->add_option("--out", out, "Output CSV")->required();

  // --threads is accepted after the subcommand as well
  for (auto* sub : {run_cmd, sweep_cmd, fig2_cmd, fig3_cmd}) {
    sub->add_option("--threads", threads, "Worker threads for sweeps")
        ->check(CLI::PositiveNumber);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  const auto start = Clock::now();
  try {
    if (*run_cmd) {
      const auto config = lismimo::load_scenario(config_path);
      auto row = lismimo::run(config);
      row.series = "run";
      row.param = "none";
      return finish({row}, out, lismimo::hex_hash(lismimo::config_hash(config)), start);
    }
    std::vector<lismimo::SweepSpec> specs;
    if (*sweep_cmd) {
      lismimo::SweepSpec spec;
      spec.base = lismimo::load_scenario(config_path);
      spec.param = lismimo::parse_sweep_param(param);
      spec.values = parse_values(values);
      spec.series = "sweep";
      specs.push_back(std::move(spec));
    } else if (*fig2_cmd) {
      specs = lismimo::fig2_recipe();
    } else {
      specs = lismimo::fig3_recipe();
    }
    const auto rows = lismimo::sweep(specs, threads);
    return finish(rows, out, combined_hash(specs), start);
  } catch (const lismimo::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const lismimo::NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 2;
  } catch (const lismimo::InvariantViolation& e) {
    std::cerr << "invariant violation: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
