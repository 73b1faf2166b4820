#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "lismimo/errors.hpp"
#include "lismimo/experiment.hpp"

#ifndef LISMIMO_VERSION
#define LISMIMO_VERSION "unknown"
#endif

namespace lismimo {
namespace {

std::string number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

const char* flag(bool b) { return b ? "true" : "false"; }

void write_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error("cannot open '" + path + "' for writing");
  f << content;
  f.flush();
  if (!f) throw Error("write failed for '" + path + "'");
}

}  // namespace

std::string csv_header() {
  return "series,param,value,n,m,sum_capacity,sinr_min,sinr_max,p_t,p_l,p_rx_total,"
         "reference_aperture_power,spacing,efficiency,ue_coupling,scattering,precoder,"
         "converged,iterations,status";
}

std::string to_csv(const std::vector<ResultRow>& rows) {
  std::ostringstream os;
  os << csv_header() << '\n';
  for (const auto& r : rows) {
    os << field(r.series) << ',' << field(r.param) << ',' << number(r.value) << ',' << r.n << ','
       << r.m << ',' << number(r.sum_capacity) << ',' << number(r.sinr_min) << ','
       << number(r.sinr_max) << ',' << number(r.p_t) << ',' << number(r.p_l) << ','
       << number(r.p_rx_total) << ',' << number(r.reference_aperture_power) << ','
       << number(r.spacing) << ',' << number(r.efficiency) << ',' << flag(r.ue_coupling) << ','
       << flag(r.scattering) << ',' << field(r.precoder) << ',' << flag(r.converged) << ','
       << r.iterations << ',' << field(r.status) << '\n';
  }
  return os.str();
}

void emit_csv(const std::vector<ResultRow>& rows, const std::string& path) {
  write_file(path, to_csv(rows));
}

void emit_meta(const std::vector<ResultRow>& rows, const std::string& csv_path,
               const std::string& config_hash, double total_wall_time_s) {
  nlohmann::json meta;
  meta["config_hash"] = config_hash;
  meta["build"] = build_identifier();
  meta["csv"] = csv_path;
  meta["rows"] = rows.size();
  meta["total_wall_time_s"] = total_wall_time_s;
  auto& times = meta["wall_time_s"] = nlohmann::json::array();
  std::size_t failed = 0;
  for (const auto& r : rows) {
    times.push_back(r.wall_time_s);
    if (!r.ok()) ++failed;
  }
  meta["failed_rows"] = failed;
  write_file(csv_path + ".meta.json", meta.dump(2) + "\n");
}

std::string build_identifier() {
  std::string id = "lismimo " LISMIMO_VERSION;
#if defined(__clang__)
  id += " clang " __clang_version__;
#elif defined(__GNUC__)
  id += " gcc " __VERSION__;
#endif
#ifdef NDEBUG
  id += " release";
#else
  id += " debug";
#endif
  return id;
}

}  // namespace lismimo
