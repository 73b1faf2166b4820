#include "lismimo/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <limits>
#include <sstream>
#include <thread>

#include "lismimo/errors.hpp"

namespace lismimo {
namespace {

constexpr double kBudgetSlack = 1e-8;
constexpr double kPassivitySlack = 1e-8;
constexpr double kEnergySlack = 1e-9;

std::string context(const ScenarioConfig& config) {
  return "scenario " + hex_hash(config_hash(config)) + ": ";
}

void check_invariants(const RunOutcome& out) {
  const auto& cfg = out.config;
  if (out.r_p_min_eigenvalue < -kPassivitySlack * out.r_p_max_eigenvalue) {
    std::ostringstream os;
    os << "R_P is not passive (eigenvalues " << out.r_p_min_eigenvalue << " .. "
       << out.r_p_max_eigenvalue << ")";
    throw InvariantViolation(os.str());
  }
  const auto& sol = out.solution;
  if (sol.achieved_p_t > cfg.constraints.p_r * (1.0 + kBudgetSlack)) {
    std::ostringstream os;
    os << "radiated power " << sol.achieved_p_t << " exceeds budget " << cfg.constraints.p_r;
    throw InvariantViolation(os.str());
  }
  if (sol.achieved_p_l > cfg.constraints.p_l * (1.0 + kBudgetSlack)) {
    std::ostringstream os;
    os << "ohmic loss " << sol.achieved_p_l << " exceeds budget " << cfg.constraints.p_l;
    throw InvariantViolation(os.str());
  }
  const double received = out.metrics.per_ue_rx_power.sum();
  if (cfg.scattering && received > out.metrics.p_t + kEnergySlack) {
    std::ostringstream os;
    os << "received power " << received << " exceeds radiated power " << out.metrics.p_t;
    throw InvariantViolation(os.str());
  }
  for (Eigen::Index m = 0; m < out.metrics.sinr.size(); ++m) {
    if (!(out.metrics.sinr(m) >= 0.0) || !std::isfinite(out.metrics.sinr(m))) {
      throw InvariantViolation("SINR is negative or non-finite");
    }
  }
}

RunOutcome run_unchecked(const ScenarioConfig& config) {
  config.validate();
  RunOutcome out;
  out.config = config;
  out.geometry = config.geometry();
  const PhysicalConfig phys(config.wavelength);
  const double r_l = loss_resistance_from_efficiency(config.efficiency, self_impedance_real(phys));
  out.system = assemble(out.geometry, phys, r_l, config.ue_coupling);
  out.channel = build_channel(out.system, config.scattering);

  Eigen::SelfAdjointEigenSolver<RMatrix> es(out.channel.r_p, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw NumericalError("eigenvalues of R_P did not converge");
  out.r_p_min_eigenvalue = es.eigenvalues().minCoeff();
  out.r_p_max_eigenvalue = es.eigenvalues().maxCoeff();

  if (config.precoder == PrecoderKind::Wmmse) {
    auto result = wmmse(out.channel.h, out.channel.r_p, r_l, config.constraints, config.wmmse);
    out.solution = std::move(result.solution);
    out.receive = std::move(result.state);
  } else {
    out.solution = mf_dual(out.channel.h, out.channel.r_p, r_l, config.constraints);
  }
  out.metrics = evaluate_metrics(out.channel.h, out.solution.b, out.channel.r_p, r_l,
                                 config.constraints.noise_variance, out.system.z0);
  check_invariants(out);

  ResultRow& row = out.row;
  row.n = static_cast<long>(out.system.lis_count());
  row.m = static_cast<long>(out.system.ue_count());
  row.value = std::numeric_limits<double>::quiet_NaN();
  row.sum_capacity = out.metrics.sum_capacity;
  row.sinr_min = out.metrics.sinr.minCoeff();
  row.sinr_max = out.metrics.sinr.maxCoeff();
  row.p_t = out.metrics.p_t;
  row.p_l = out.metrics.p_l;
  row.p_rx_total = out.metrics.per_ue_rx_power.sum();
  row.precoder = std::string(to_string(out.solution.method));
  row.converged = out.solution.converged;
  row.iterations = out.solution.iterations;
  return out;
}

void describe(ResultRow& row, const ScenarioConfig& config) {
  row.reference_aperture_power = reference_aperture_power(config.constraints.p_r);
  row.spacing = config.spacing();
  row.efficiency = config.efficiency;
  row.ue_coupling = config.ue_coupling;
  row.scattering = config.scattering;
}

bool is_integral(double v) { return std::isfinite(v) && v == std::floor(v); }

}  // namespace

double reference_aperture_power(double p_r) { return p_r / 6.0; }

RunOutcome run_detailed(const ScenarioConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  try {
    RunOutcome out = run_unchecked(config);
    describe(out.row, config);
    out.row.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return out;
  } catch (const ConfigError& e) {
    throw ConfigError(context(config) + e.what());
  } catch (const InvariantViolation& e) {
    throw InvariantViolation(context(config) + e.what());
  } catch (const NumericalError& e) {
    throw NumericalError(context(config) + e.what());
  }
}

ResultRow run(const ScenarioConfig& config) { return run_detailed(config).row; }

SweepParam parse_sweep_param(const std::string& name) {
  if (name == "users") return SweepParam::Users;
  if (name == "elements_per_axis") return SweepParam::ElementsPerAxis;
  if (name == "efficiency") return SweepParam::Efficiency;
  if (name == "spacing") return SweepParam::Spacing;
  throw ConfigError("unknown sweep parameter '" + name +
                    "' (expected users, elements_per_axis, efficiency or spacing)");
}

std::string to_string(SweepParam param) {
  switch (param) {
    case SweepParam::Users:
      return "users";
    case SweepParam::ElementsPerAxis:
      return "elements_per_axis";
    case SweepParam::Efficiency:
      return "efficiency";
    case SweepParam::Spacing:
      return "spacing";
  }
  return "unknown";
}

ScenarioConfig apply_sweep_value(const ScenarioConfig& base, SweepParam param, double value) {
  ScenarioConfig cfg = base;
  switch (param) {
    case SweepParam::Users: {
      auto* line = std::get_if<UeLineSpec>(&cfg.ue);
      if (line == nullptr) throw ConfigError("users sweep needs a 'line' ue spec");
      if (!is_integral(value) || value < 1) throw ConfigError("users must be a positive integer");
      line->count = static_cast<int>(value);
      break;
    }
    case SweepParam::ElementsPerAxis: {
      if (!is_integral(value) || value < 2) {
        throw ConfigError("elements_per_axis must be an integer >= 2");
      }
      const int count = static_cast<int>(value);
      if (auto* a = std::get_if<LinearArraySpec>(&cfg.array)) {
        a->count = count;
      } else {
        auto& p = std::get<PlanarArraySpec>(cfg.array);
        p.count_y = count;
        p.count_z = count;
      }
      break;
    }
    case SweepParam::Efficiency:
      cfg.efficiency = value;
      break;
    case SweepParam::Spacing: {
      if (!(value > 0.0)) throw ConfigError("spacing must be positive");
      auto count_for = [&](double length) {
        const double intervals = length / value;
        const double rounded = std::round(intervals);
        if (rounded < 1.0 || std::abs(intervals - rounded) > 1e-9 * std::max(1.0, intervals)) {
          std::ostringstream os;
          os << "spacing " << value << " does not divide array length " << length;
          throw ConfigError(os.str());
        }
        return static_cast<int>(rounded) + 1;
      };
      if (auto* a = std::get_if<LinearArraySpec>(&cfg.array)) {
        a->count = count_for(a->length);
      } else {
        auto& p = std::get<PlanarArraySpec>(cfg.array);
        p.count_y = count_for(p.len_y);
        p.count_z = count_for(p.len_z);
      }
      break;
    }
  }
  cfg.validate();
  return cfg;
}

std::vector<ResultRow> sweep(const std::vector<SweepSpec>& specs, int threads) {
  struct Point {
    const SweepSpec* spec;
    double value;
    ScenarioConfig config;
  };
  std::vector<Point> points;
  for (const auto& spec : specs) {
    if (spec.values.empty()) throw ConfigError("sweep '" + spec.series + "' has no values");
    for (double v : spec.values) {
      points.push_back({&spec, v, apply_sweep_value(spec.base, spec.param, v)});
    }
  }

  std::vector<ResultRow> rows(points.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < points.size(); i = next++) {
      const Point& p = points[i];
      ResultRow row;
      const auto start = std::chrono::steady_clock::now();
      try {
        row = run(p.config);
      } catch (const std::exception& e) {
        const char* kind = dynamic_cast<const InvariantViolation*>(&e) ? "invariant violation"
                           : dynamic_cast<const NumericalError*>(&e) ? "numerical error"
                           : dynamic_cast<const ConfigError*>(&e)    ? "config error"
                                                                     : "error";
        const double nan = std::numeric_limits<double>::quiet_NaN();
        row = ResultRow{};
        row.sum_capacity = row.sinr_min = row.sinr_max = nan;
        row.p_t = row.p_l = row.p_rx_total = nan;
        row.converged = false;
        row.status = std::string(kind) + ": " + e.what();
        describe(row, p.config);
        const Geometry g = p.config.geometry();
        row.n = static_cast<long>(g.lis_count());
        row.m = static_cast<long>(g.ue_count());
        row.wall_time_s =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      }
      row.series = p.spec->series;
      row.param = to_string(p.spec->param);
      row.value = p.value;
      rows[i] = std::move(row);
    }
  };

  const int count = std::clamp(threads, 1, static_cast<int>(std::max<std::size_t>(1, points.size())));
  if (count == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < count; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  return rows;
}

std::vector<ResultRow> sweep(const SweepSpec& spec, int threads) {
  return sweep(std::vector<SweepSpec>{spec}, threads);
}

std::vector<SweepSpec> fig2_recipe() {
  struct Variant {
    double spacing;
    double efficiency;
  };
  const Variant variants[] = {{0.5, 1.0}, {0.1, 1.0}, {0.1, 0.8}, {0.5, 0.8}};
  std::vector<double> users;
  for (int m = 1; m <= 33; ++m) users.push_back(m);

  std::vector<SweepSpec> specs;
  for (const auto& v : variants) {
    for (bool coupling : {true, false}) {
      ScenarioConfig cfg;
      cfg.array = LinearArraySpec{4.0, static_cast<int>(std::lround(4.0 / v.spacing)) + 1};
      cfg.ue = UeLineSpec{20.0, 10.0, 1};
      cfg.efficiency = v.efficiency;
      cfg.constraints = Constraints{1.0, 1.0, 1e-8};
      cfg.ue_coupling = coupling;
      cfg.scattering = true;
      cfg.precoder = PrecoderKind::Wmmse;
      cfg.wmmse = WmmseOptions{1000, 1e-8};
      std::ostringstream name;
      name << "d" << v.spacing << "_er" << v.efficiency << "_coupling-"
           << (coupling ? "on" : "off");
      specs.push_back({name.str(), SweepParam::Users, users, cfg});
    }
  }
  return specs;
}

std::vector<double> fig3_grid() { return {3, 5, 7, 9, 11, 13, 17, 21, 25, 29, 33, 37, 41}; }

std::vector<SweepSpec> fig3_recipe() {
  std::vector<SweepSpec> specs;
  for (double efficiency : {0.8, 0.99, 1.0}) {
    for (bool scattering : {true, false}) {
      ScenarioConfig cfg;
      cfg.array = PlanarArraySpec{4.0, 4.0, 3, 3};
      cfg.ue = UeLineSpec{2.0, 0.0, 1};
      cfg.efficiency = efficiency;
      cfg.constraints = Constraints{1.0, 1.0, 1e-8};
      cfg.ue_coupling = true;
      cfg.scattering = scattering;
      cfg.precoder = PrecoderKind::MfDual;
      std::ostringstream name;
      name << "er" << efficiency << "_scattering-" << (scattering ? "on" : "off");
      specs.push_back({name.str(), SweepParam::ElementsPerAxis, fig3_grid(), cfg});
    }
  }
  return specs;
}

}  // namespace lismimo
