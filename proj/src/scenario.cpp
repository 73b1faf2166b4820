#include "lismimo/scenario.hpp"

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <sstream>

#include <json.hpp>

#include "lismimo/errors.hpp"

namespace lismimo {
namespace {

using nlohmann::json;

void expect_keys(const json& j, const char* where, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) throw ConfigError(std::string(where) + " must be an object");
  for (const auto& [key, value] : j.items()) {
    bool known = false;
    for (const char* a : allowed) known = known || key == a;
    if (!known) throw ConfigError("unknown key '" + key + "' in " + where);
  }
}

const json& required(const json& j, const char* key, const char* where) {
  auto it = j.find(key);
  if (it == j.end()) throw ConfigError(std::string("missing key '") + key + "' in " + where);
  return *it;
}

double number(const json& j, const char* key, const char* where) {
  const json& v = required(j, key, where);
  if (!v.is_number()) throw ConfigError(std::string("'") + key + "' in " + where + " must be a number");
  return v.get<double>();
}

int integer(const json& j, const char* key, const char* where) {
  const json& v = required(j, key, where);
  if (!v.is_number_integer()) {
    throw ConfigError(std::string("'") + key + "' in " + where + " must be an integer");
  }
  return v.get<int>();
}

bool boolean(const json& j, const char* key, const char* where, bool fallback) {
  auto it = j.find(key);
  if (it == j.end()) return fallback;
  if (!it->is_boolean()) throw ConfigError(std::string("'") + key + "' in " + where + " must be a boolean");
  return it->get<bool>();
}

std::string text(const json& j, const char* key, const char* where) {
  const json& v = required(j, key, where);
  if (!v.is_string()) throw ConfigError(std::string("'") + key + "' in " + where + " must be a string");
  return v.get<std::string>();
}

ArraySpec parse_array(const json& j) {
  const std::string type = text(j, "type", "array");
  if (type == "linear") {
    expect_keys(j, "array", {"type", "length", "count"});
    return LinearArraySpec{number(j, "length", "array"), integer(j, "count", "array")};
  }
  if (type == "planar") {
    expect_keys(j, "array", {"type", "len_y", "len_z", "count_y", "count_z"});
    return PlanarArraySpec{number(j, "len_y", "array"), number(j, "len_z", "array"),
                           integer(j, "count_y", "array"), integer(j, "count_z", "array")};
  }
  throw ConfigError("array type must be 'linear' or 'planar', got '" + type + "'");
}

UeSpec parse_ue(const json& j) {
  const std::string type = text(j, "type", "ue");
  if (type == "line") {
    expect_keys(j, "ue", {"type", "distance_x", "length", "count"});
    return UeLineSpec{number(j, "distance_x", "ue"), number(j, "length", "ue"),
                      integer(j, "count", "ue")};
  }
  if (type == "explicit") {
    expect_keys(j, "ue", {"type", "positions"});
    const json& list = required(j, "positions", "ue");
    if (!list.is_array()) throw ConfigError("ue positions must be an array");
    UeExplicitSpec spec;
    for (const json& p : list) {
      if (!p.is_array() || p.size() != 3 || !p[0].is_number() || !p[1].is_number() ||
          !p[2].is_number()) {
        throw ConfigError("each ue position must be [x, y, z]");
      }
      spec.positions.push_back({p[0].get<double>(), p[1].get<double>(), p[2].get<double>()});
    }
    return spec;
  }
  throw ConfigError("ue type must be 'line' or 'explicit', got '" + type + "'");
}

void check_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError(std::string(what) + " must be positive");
}

}  // namespace

void ScenarioConfig::validate() const {
  check_positive(wavelength, "wavelength");
  if (const auto* a = std::get_if<LinearArraySpec>(&array)) {
    check_positive(a->length, "array length");
    if (a->count < 2) throw ConfigError("linear array count must be at least 2");
  } else {
    const auto& p = std::get<PlanarArraySpec>(array);
    check_positive(p.len_y, "array len_y");
    check_positive(p.len_z, "array len_z");
    if (p.count_y < 2 || p.count_z < 2) throw ConfigError("planar array counts must be at least 2");
  }
  if (const auto* u = std::get_if<UeLineSpec>(&ue)) {
    check_positive(u->distance_x, "ue distance_x");
    if (u->count < 1) throw ConfigError("ue count must be at least 1");
    if (!(u->length >= 0.0) || (u->count > 1 && !(u->length > 0.0))) {
      throw ConfigError("ue line length must be positive when more than one user is placed");
    }
  } else if (std::get<UeExplicitSpec>(ue).positions.empty()) {
    throw ConfigError("explicit ue list is empty");
  }
  if (!(efficiency > 0.0) || !(efficiency <= 1.0)) {
    throw ConfigError("efficiency must lie in (0, 1]");
  }
  constraints.validate();
  if (wmmse.max_iter < 1) throw ConfigError("precoder max_iter must be at least 1");
  if (!(wmmse.tol >= 0.0)) throw ConfigError("precoder tol must be non-negative");
}

Geometry ScenarioConfig::geometry() const {
  const double lam = wavelength;
  Geometry g;
  if (const auto* a = std::get_if<LinearArraySpec>(&array)) {
    g.lis = linear_array(a->length * lam, a->count);
  } else {
    const auto& p = std::get<PlanarArraySpec>(array);
    g.lis = planar_array(p.len_y * lam, p.len_z * lam, p.count_y, p.count_z);
  }
  if (const auto* u = std::get_if<UeLineSpec>(&ue)) {
    g.ue = ue_line(u->distance_x * lam, u->length * lam, u->count);
  } else {
    for (const auto& p : std::get<UeExplicitSpec>(ue).positions) {
      g.ue.push_back({p.x * lam, p.y * lam, p.z * lam});
    }
  }
  return g;
}

double ScenarioConfig::spacing() const {
  if (const auto* a = std::get_if<LinearArraySpec>(&array)) return a->length / (a->count - 1);
  const auto& p = std::get<PlanarArraySpec>(array);
  return p.len_y / (p.count_y - 1);
}

ScenarioConfig parse_scenario(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("malformed scenario JSON: ") + e.what());
  }
  expect_keys(doc, "scenario",
              {"wavelength", "array", "ue", "efficiency", "constraints", "toggles", "precoder"});

  ScenarioConfig cfg;
  if (doc.contains("wavelength")) cfg.wavelength = number(doc, "wavelength", "scenario");
  cfg.array = parse_array(required(doc, "array", "scenario"));
  cfg.ue = parse_ue(required(doc, "ue", "scenario"));
  cfg.efficiency = number(doc, "efficiency", "scenario");

  const json& c = required(doc, "constraints", "scenario");
  expect_keys(c, "constraints", {"P_R", "P_L", "sigma2"});
  cfg.constraints.p_r = number(c, "P_R", "constraints");
  cfg.constraints.p_l = number(c, "P_L", "constraints");
  cfg.constraints.noise_variance = number(c, "sigma2", "constraints");

  if (auto it = doc.find("toggles"); it != doc.end()) {
    expect_keys(*it, "toggles", {"ue_coupling", "scattering"});
    cfg.ue_coupling = boolean(*it, "ue_coupling", "toggles", true);
    cfg.scattering = boolean(*it, "scattering", "toggles", true);
  }

  if (auto it = doc.find("precoder"); it != doc.end()) {
    expect_keys(*it, "precoder", {"method", "max_iter", "tol"});
    const std::string method = text(*it, "method", "precoder");
    if (method == "mf-dual") {
      cfg.precoder = PrecoderKind::MfDual;
    } else if (method == "wmmse") {
      cfg.precoder = PrecoderKind::Wmmse;
    } else {
      throw ConfigError("precoder method must be 'mf-dual' or 'wmmse', got '" + method + "'");
    }
    if (it->contains("max_iter")) cfg.wmmse.max_iter = integer(*it, "max_iter", "precoder");
    if (it->contains("tol")) cfg.wmmse.tol = number(*it, "tol", "precoder");
  }

  cfg.validate();
  return cfg;
}

ScenarioConfig load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open scenario file " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_scenario(buf.str());
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

std::string to_json(const ScenarioConfig& cfg) {
  json doc;
  doc["wavelength"] = cfg.wavelength;
  if (const auto* a = std::get_if<LinearArraySpec>(&cfg.array)) {
    doc["array"] = {{"type", "linear"}, {"length", a->length}, {"count", a->count}};
  } else {
    const auto& p = std::get<PlanarArraySpec>(cfg.array);
    doc["array"] = {{"type", "planar"}, {"len_y", p.len_y}, {"len_z", p.len_z},
                    {"count_y", p.count_y}, {"count_z", p.count_z}};
  }
  if (const auto* u = std::get_if<UeLineSpec>(&cfg.ue)) {
    doc["ue"] = {{"type", "line"}, {"distance_x", u->distance_x}, {"length", u->length},
                 {"count", u->count}};
  } else {
    json list = json::array();
    for (const auto& p : std::get<UeExplicitSpec>(cfg.ue).positions) {
      list.push_back({p.x, p.y, p.z});
    }
    doc["ue"] = {{"type", "explicit"}, {"positions", list}};
  }
  doc["efficiency"] = cfg.efficiency;
  doc["constraints"] = {{"P_R", cfg.constraints.p_r},
                        {"P_L", cfg.constraints.p_l},
                        {"sigma2", cfg.constraints.noise_variance}};
  doc["toggles"] = {{"ue_coupling", cfg.ue_coupling}, {"scattering", cfg.scattering}};
  doc["precoder"] = {{"method", cfg.precoder == PrecoderKind::Wmmse ? "wmmse" : "mf-dual"},
                     {"max_iter", cfg.wmmse.max_iter},
                     {"tol", cfg.wmmse.tol}};
  return doc.dump();
}

std::uint64_t config_hash(const ScenarioConfig& config) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : to_json(config)) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex_hash(std::uint64_t h) {
  std::ostringstream os;
  os << std::hex;
  os.width(16);
  os.fill('0');
  os << h;
  return os.str();
}

}  // namespace lismimo
