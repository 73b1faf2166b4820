#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "helpers.hpp"
#include "lismimo/errors.hpp"
#include "lismimo/experiment.hpp"

using namespace lismimo;
using testing::rel;

namespace {

ScenarioConfig fig3_point(int count, double efficiency) {
  ScenarioConfig cfg;
  cfg.array = PlanarArraySpec{4, 4, count, count};
  cfg.ue = UeLineSpec{2, 0, 1};
  cfg.efficiency = efficiency;
  cfg.constraints = {1, 1, 1e-8};
  cfg.precoder = PrecoderKind::MfDual;
  return cfg;
}

ScenarioConfig small_wmmse() {
  ScenarioConfig cfg;
  cfg.array = LinearArraySpec{4, 9};
  cfg.ue = UeLineSpec{20, 10, 3};
  cfg.efficiency = 0.8;
  cfg.constraints = {1, 1, 1e-8};
  cfg.precoder = PrecoderKind::Wmmse;
  cfg.wmmse = {300, 1e-8};
  return cfg;
}

std::vector<std::string> split(const std::string& line) {
  // fields here never contain quotes except the status column
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string l;
  while (std::getline(ss, l)) out.push_back(l);
  return out;
}

}  // namespace

TEST_CASE("reference aperture power") {
  CHECK(reference_aperture_power(1.0) == 1.0 / 6.0);
  CHECK(reference_aperture_power(3.0) == 0.5);
}

TEST_CASE("fig3 point runs and conserves energy") {
  testing::WarningCapture quiet;
  const auto out = run_detailed(fig3_point(9, 1.0));
  const auto& row = out.row;
  CHECK(row.ok());
  CHECK(row.n == 81);
  CHECK(row.m == 1);
  CHECK(row.p_rx_total > 0.0);
  CHECK(row.p_rx_total < 1.0);
  CHECK(row.precoder == "mf-radiated");
  CHECK(row.reference_aperture_power == 1.0 / 6.0);
  CHECK(row.spacing == 0.5);
  CHECK(row.efficiency == 1.0);
  CHECK(out.r_p_min_eigenvalue > 0.0);
  CHECK(out.r_p_max_eigenvalue >= out.r_p_min_eigenvalue);
  CHECK(row.wall_time_s >= 0.0);
  CHECK_FALSE(out.receive.has_value());
}

TEST_CASE("single element and user far away matches the scalar chain") {
  ScenarioConfig cfg;
  cfg.array = LinearArraySpec{0.5, 2};
  cfg.ue = UeExplicitSpec{{{200, 0, 0}}};
  cfg.efficiency = 0.5;
  cfg.constraints = {1, 1e6, 1e-8};
  const auto out = run_detailed(cfg);
  // the two-element array collapses to the scalar chain when summed by hand
  const auto& h = out.channel.h;
  const auto& b = out.solution.b;
  const Complex y = (h * b)(0, 0);
  CHECK(rel(out.row.p_rx_total, std::norm(y) * out.system.z0) < 1e-14);

  // a true N = M = 1 chain through the explicit formulas
  const PhysicalConfig phys;
  const Complex z = mutual_impedance({200, 0, 0}, phys);
  const Complex h11 = -z / 2.0;
  const double r_p = 1.0 - (z * z / 2.0).real();
  // radiated budget binds: |b|^2 r_p = P_R
  const double rx = std::norm(h11) * (1.0 / r_p);
  ImpedanceSystem sys = assemble(Geometry{{{0, 0, 0}}, {{200, 0, 0}}}, phys, 1.0);
  const auto ch = build_channel(sys, true);
  CHECK(rel(ch.h(0, 0), h11) < 1e-14);
  CHECK(rel(ch.r_p(0, 0), r_p) < 1e-14);
  const auto sol = mf_dual(ch.h, ch.r_p, 1.0, {1, 1e6, 1e-8});
  CHECK(rel(precoded_rx_power(ch.h, sol.b, 1.0)(0), rx) < 1e-12);
}

TEST_CASE("run is deterministic") {
  const auto a = to_csv({run(small_wmmse())});
  const auto b = to_csv({run(small_wmmse())});
  CHECK(a == b);
}

TEST_CASE("errors carry the scenario hash and keep their type") {
  auto cfg = fig3_point(5, 0.8);
  cfg.constraints.p_r = -1;
  const std::string hash = hex_hash(config_hash(cfg));
  CHECK_THROWS_WITH_AS(run(cfg), doctest::Contains(hash.c_str()), ConfigError);
}

TEST_CASE("sweep parameters") {
  CHECK(parse_sweep_param("users") == SweepParam::Users);
  CHECK(parse_sweep_param("elements_per_axis") == SweepParam::ElementsPerAxis);
  CHECK(parse_sweep_param("efficiency") == SweepParam::Efficiency);
  CHECK(parse_sweep_param("spacing") == SweepParam::Spacing);
  CHECK_THROWS_AS(parse_sweep_param("users "), ConfigError);
  for (auto p : {SweepParam::Users, SweepParam::ElementsPerAxis, SweepParam::Efficiency,
                 SweepParam::Spacing}) {
    CHECK(parse_sweep_param(to_string(p)) == p);
  }

  const auto base = small_wmmse();
  CHECK(std::get<UeLineSpec>(apply_sweep_value(base, SweepParam::Users, 7).ue).count == 7);
  CHECK_THROWS_AS(apply_sweep_value(base, SweepParam::Users, 2.5), ConfigError);
  CHECK_THROWS_AS(apply_sweep_value(base, SweepParam::Users, 0), ConfigError);
  CHECK(std::get<LinearArraySpec>(apply_sweep_value(base, SweepParam::ElementsPerAxis, 17).array)
            .count == 17);
  CHECK(apply_sweep_value(base, SweepParam::Efficiency, 0.3).efficiency == 0.3);
  CHECK_THROWS_AS(apply_sweep_value(base, SweepParam::Efficiency, 1.5), ConfigError);
  CHECK(std::get<LinearArraySpec>(apply_sweep_value(base, SweepParam::Spacing, 0.1).array)
            .count == 41);
  CHECK(std::get<LinearArraySpec>(apply_sweep_value(base, SweepParam::Spacing, 0.5).array)
            .count == 9);
  CHECK_THROWS_AS(apply_sweep_value(base, SweepParam::Spacing, 0.3), ConfigError);
  CHECK_THROWS_AS(apply_sweep_value(base, SweepParam::Spacing, -0.5), ConfigError);

  const auto planar = apply_sweep_value(fig3_point(3, 0.8), SweepParam::ElementsPerAxis, 11);
  CHECK(std::get<PlanarArraySpec>(planar.array).count_z == 11);
  const auto explicit_ue = fig3_point(3, 0.8);
  auto e = explicit_ue;
  e.ue = UeExplicitSpec{{{2, 0, 0}}};
  CHECK_THROWS_AS(apply_sweep_value(e, SweepParam::Users, 2), ConfigError);
}

TEST_CASE("sweeps keep order and match single runs") {
  SweepSpec spec{"s", SweepParam::Users, {3, 1, 2}, small_wmmse()};
  const auto rows = sweep(spec, 2);
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].m == 3);
  CHECK(rows[1].m == 1);
  CHECK(rows[2].m == 2);
  for (const auto& r : rows) {
    CHECK(r.series == "s");
    CHECK(r.param == "users");
  }
  CHECK(rows[0].value == 3.0);

  SweepSpec one{"s", SweepParam::Users, {2}, small_wmmse()};
  auto single = sweep(one, 1);
  auto direct = run(apply_sweep_value(small_wmmse(), SweepParam::Users, 2));
  direct.series = "s";
  direct.param = "users";
  direct.value = 2;
  CHECK(to_csv(single) == to_csv({direct}));

  // threads do not change results
  CHECK(to_csv(sweep(spec, 1)) == to_csv(sweep(spec, 3)));

  SweepSpec empty{"s", SweepParam::Users, {}, small_wmmse()};
  CHECK_THROWS_AS(sweep(empty, 1), ConfigError);
  SweepSpec invalid{"s", SweepParam::Users, {1, -2}, small_wmmse()};
  CHECK_THROWS_AS(sweep(invalid, 1), ConfigError);
}

TEST_CASE("failing points become error rows") {
  // the user sits on the centre element for odd counts only
  ScenarioConfig cfg;
  cfg.array = LinearArraySpec{4, 9};
  cfg.ue = UeExplicitSpec{{{0, 0, 0}}};
  cfg.efficiency = 0.8;
  cfg.constraints = {1, 1, 1e-8};
  SweepSpec spec{"bad", SweepParam::ElementsPerAxis, {9, 10}, cfg};
  const auto rows = sweep(spec, 2);
  REQUIRE(rows.size() == 2);
  CHECK_FALSE(rows[0].ok());
  CHECK(rows[0].status.rfind("config error: ", 0) == 0);
  CHECK(rows[0].n == 9);
  CHECK(std::isnan(rows[0].sum_capacity));
  CHECK(rows[0].series == "bad");
  CHECK(rows[0].value == 9.0);
  CHECK(rows[1].ok());
  CHECK(rows[1].n == 10);
}

TEST_CASE("figure recipes") {
  const auto f2 = fig2_recipe();
  REQUIRE(f2.size() == 8);
  for (const auto& s : f2) {
    CHECK(s.param == SweepParam::Users);
    CHECK(s.values.size() == 33);
    CHECK(s.values.front() == 1.0);
    CHECK(s.values.back() == 33.0);
    CHECK(s.base.precoder == PrecoderKind::Wmmse);
    CHECK(s.base.wmmse.max_iter == 1000);
    CHECK(s.base.wmmse.tol == 1e-8);
    CHECK(s.base.constraints.p_r == 1.0);
    CHECK(s.base.constraints.p_l == 1.0);
    const auto& ue = std::get<UeLineSpec>(s.base.ue);
    CHECK(ue.distance_x == 20.0);
    CHECK(ue.length == 10.0);
    const auto& a = std::get<LinearArraySpec>(s.base.array);
    CHECK(a.length == 4.0);
    CHECK((a.count == 9 || a.count == 41));
  }
  CHECK(f2[0].series == "d0.5_er1_coupling-on");
  CHECK(f2[3].series == "d0.1_er1_coupling-off");

  const auto f3 = fig3_recipe();
  REQUIRE(f3.size() == 6);
  for (const auto& s : f3) {
    CHECK(s.param == SweepParam::ElementsPerAxis);
    CHECK(s.values.front() == 3.0);
    CHECK(s.values.back() == 41.0);
    CHECK(s.base.precoder == PrecoderKind::MfDual);
    const auto g = apply_sweep_value(s.base, s.param, 41).geometry();
    CHECK(g.lis_count() == 1681);
    CHECK(g.ue[0] == Position{2, 0, 0});
  }
  CHECK(f3[0].series == "er0.8_scattering-on");
  CHECK(f3[5].series == "er1_scattering-off");
}

TEST_CASE("CSV layout") {
  const std::string header = csv_header();
  CHECK(lines(to_csv({})).size() == 1);
  CHECK(to_csv({}) == header + "\n");

  auto row = run(fig3_point(5, 0.8));
  row.series = "a,b";
  row.param = "elements_per_axis";
  row.value = 5;
  const auto text = to_csv({row});
  const auto ls = lines(text);
  REQUIRE(ls.size() == 2);
  CHECK(text.find('\r') == std::string::npos);
  const auto names = split(ls[0]);
  const auto fields = split(ls[1]);
  REQUIRE(fields.size() == names.size());
  CHECK(names.size() == 20);
  CHECK(fields[0] == "a,b");

  // every floating column reproduces the stored double exactly
  auto col = [&](const char* name) {
    for (std::size_t i = 0; i < names.size(); ++i) {
      if (names[i] == name) return std::stod(fields[i]);
    }
    FAIL("missing column");
    return 0.0;
  };
  CHECK(col("sum_capacity") == row.sum_capacity);
  CHECK(col("sinr_min") == row.sinr_min);
  CHECK(col("p_t") == row.p_t);
  CHECK(col("p_l") == row.p_l);
  CHECK(col("p_rx_total") == row.p_rx_total);
  CHECK(col("reference_aperture_power") == row.reference_aperture_power);
  CHECK(col("efficiency") == row.efficiency);
  CHECK(col("n") == 25);
}

TEST_CASE("CSV and metadata files") {
  const std::string path = "lismimo_test_rows.csv";
  const auto rows = std::vector<ResultRow>{run(fig3_point(3, 0.8))};
  emit_csv(rows, path);
  emit_meta(rows, path, "00ff", 1.5);
  std::ifstream f(path);
  std::stringstream buf;
  buf << f.rdbuf();
  CHECK(buf.str() == to_csv(rows));
  std::ifstream m(path + ".meta.json");
  const auto meta = nlohmann::json::parse(m);
  CHECK(meta["config_hash"] == "00ff");
  CHECK(meta["build"] == build_identifier());
  CHECK(meta["total_wall_time_s"] == 1.5);
  CHECK(meta["wall_time_s"].size() == 1);
  std::remove(path.c_str());
  std::remove((path + ".meta.json").c_str());

  CHECK_THROWS_WITH_AS(emit_csv(rows, "/nonexistent/dir/out.csv"),
                       doctest::Contains("/nonexistent/dir/out.csv"), Error);
}
